// Copyright 2026 The gjoin Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace gjoin {

enum class ErrorCode {
  TypeConflict,
  UnknownAttribute,
  InvalidPredicate,
  UnsupportedPredicate,
  InvalidGraph,
  IoError,
  OversizeValue,
  BadMagic,
  VersionMismatch,
  TruncatedFile,
  IdOutOfRange,
  SpecMismatch,
  ParseError,
  AlreadyEnriched,
  Unreachable,
  InvalidArgument,
  Timeout,
};

inline std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::TypeConflict: return "TypeConflict";
    case ErrorCode::UnknownAttribute: return "UnknownAttribute";
    case ErrorCode::InvalidPredicate: return "InvalidPredicate";
    case ErrorCode::UnsupportedPredicate: return "UnsupportedPredicate";
    case ErrorCode::InvalidGraph: return "InvalidGraph";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::OversizeValue: return "OversizeValue";
    case ErrorCode::BadMagic: return "BadMagic";
    case ErrorCode::VersionMismatch: return "VersionMismatch";
    case ErrorCode::TruncatedFile: return "TruncatedFile";
    case ErrorCode::IdOutOfRange: return "IdOutOfRange";
    case ErrorCode::SpecMismatch: return "SpecMismatch";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::AlreadyEnriched: return "AlreadyEnriched";
    case ErrorCode::Unreachable: return "Unreachable";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::Timeout: return "Timeout";
  }
  return "Unknown";
}

/// Every failure in the library surfaces as an Error carrying a code that
/// callers (the CLI in particular) can branch on.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace gjoin
