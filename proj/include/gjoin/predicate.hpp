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

#include <algorithm>
#include <cstdint>
#include <cstring>
#include <functional>
#include <memory>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "gjoin/error.hpp"
#include "gjoin/graph.hpp"

namespace gjoin {

enum class Side : std::uint8_t { Left, Right };

inline std::string_view to_string(Side s) { return s == Side::Left ? "left" : "right"; }

// ---------------------------------------------------------------------------
// Predicates

/// u.left_i = v.right_i for every pair.
struct EquiConjunction {
  std::vector<std::pair<std::string, std::string>> pairs;
};

/// u.left_attr <= v.right_attr over Int64 attributes.
struct LessEqual {
  std::string left_attr;
  std::string right_attr;
};

/// (u.id, v.id) is an edge of a given edge set.
struct EdgeMembership {
  std::shared_ptr<const std::vector<Edge>> edges;  // sorted, unique

  static EdgeMembership of(const Graph& g) {
    return {std::make_shared<const std::vector<Edge>>(g.edges())};
  }
  static EdgeMembership of(std::vector<Edge> edges) {
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
    return {std::make_shared<const std::vector<Edge>>(std::move(edges))};
  }
};

struct GenericPredicate {
  std::function<bool(const VertexTuple&, const VertexTuple&)> fn;
};

using ThetaPredicate = std::variant<EquiConjunction, LessEqual, EdgeMembership, GenericPredicate>;

/// A predicate resolved against a concrete pair of schemas.
class BoundTheta {
 public:
  BoundTheta(ThetaPredicate theta, const Schema& left, const Schema& right) : theta_(std::move(theta)) {
    if (auto* eq = std::get_if<EquiConjunction>(&theta_)) {
      if (eq->pairs.empty()) throw Error(ErrorCode::InvalidPredicate, "equi-join predicate needs at least one pair");
      for (const auto& [l, r] : eq->pairs) {
        std::size_t li = left.index_of(l);
        std::size_t ri = right.index_of(r);
        if (left[li].type != right[ri].type) {
          throw Error(ErrorCode::TypeConflict, "equi-join attributes '" + l + "' and '" + r + "' differ in type");
        }
        pairs_.emplace_back(li, ri);
      }
    } else if (auto* le = std::get_if<LessEqual>(&theta_)) {
      std::size_t li = left.index_of(le->left_attr);
      std::size_t ri = right.index_of(le->right_attr);
      if (left[li].type != AttrType::Int64 || right[ri].type != AttrType::Int64) {
        throw Error(ErrorCode::InvalidPredicate, "less-equal predicate requires int64 attributes");
      }
      pairs_.emplace_back(li, ri);
    } else if (auto* em = std::get_if<EdgeMembership>(&theta_)) {
      if (!em->edges) throw Error(ErrorCode::InvalidPredicate, "edge-membership predicate without an edge set");
    } else if (!std::get<GenericPredicate>(theta_).fn) {
      throw Error(ErrorCode::InvalidPredicate, "generic predicate without a function");
    }
  }

  const ThetaPredicate& predicate() const noexcept { return theta_; }

  bool operator()(const VertexTuple& u, const VertexTuple& v) const {
    switch (theta_.index()) {
      case 0:
        for (const auto& [l, r] : pairs_) {
          if (u.values[l] != v.values[r]) return false;
        }
        return true;
      case 1:
        return std::get<std::int64_t>(u.values[pairs_[0].first]) <=
               std::get<std::int64_t>(v.values[pairs_[0].second]);
      case 2: {
        const auto& edges = *std::get<EdgeMembership>(theta_).edges;
        return std::binary_search(edges.begin(), edges.end(), Edge{u.id, v.id});
      }
      default:
        return std::get<GenericPredicate>(theta_).fn(u, v);
    }
  }

 private:
  ThetaPredicate theta_;
  std::vector<std::pair<std::size_t, std::size_t>> pairs_;
};

inline bool eval_theta(const BoundTheta& theta, const VertexTuple& u, const VertexTuple& v) { return theta(u, v); }

inline bool eval_theta(const ThetaPredicate& theta, const Schema& left, const Schema& right, const VertexTuple& u,
                       const VertexTuple& v) {
  return BoundTheta(theta, left, right)(u, v);
}

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  return s;
}

}  // namespace detail

/// Parses `eq:l=r,l=r,...` or `leq:l<=r`.
inline ThetaPredicate parse_predicate(std::string_view text) {
  text = detail::trim(text);
  auto bad = [&](const std::string& why) {
    return Error(ErrorCode::InvalidPredicate, "invalid predicate '" + std::string(text) + "': " + why);
  };
  if (text.starts_with("eq:")) {
    EquiConjunction eq;
    std::string_view rest = text.substr(3);
    while (true) {
      auto comma = rest.find(',');
      std::string_view item = detail::trim(rest.substr(0, comma));
      auto sep = item.find('=');
      if (sep == std::string_view::npos) throw bad("expected left=right");
      auto l = detail::trim(item.substr(0, sep));
      auto r = detail::trim(item.substr(sep + 1));
      if (l.empty() || r.empty()) throw bad("empty attribute name");
      eq.pairs.emplace_back(std::string(l), std::string(r));
      if (comma == std::string_view::npos) break;
      rest = rest.substr(comma + 1);
    }
    return eq;
  }
  if (text.starts_with("leq:")) {
    std::string_view item = text.substr(4);
    auto sep = item.find("<=");
    if (sep == std::string_view::npos) throw bad("expected left<=right");
    auto l = detail::trim(item.substr(0, sep));
    auto r = detail::trim(item.substr(sep + 2));
    if (l.empty() || r.empty()) throw bad("empty attribute name");
    return LessEqual{std::string(l), std::string(r)};
  }
  throw bad("expected 'eq:' or 'leq:' prefix");
}

inline std::string to_string(const ThetaPredicate& theta) {
  if (auto* eq = std::get_if<EquiConjunction>(&theta)) {
    std::string out = "eq:";
    for (std::size_t i = 0; i < eq->pairs.size(); ++i) {
      if (i) out += ',';
      out += eq->pairs[i].first + "=" + eq->pairs[i].second;
    }
    return out;
  }
  if (auto* le = std::get_if<LessEqual>(&theta)) return "leq:" + le->left_attr + "<=" + le->right_attr;
  if (std::holds_alternative<EdgeMembership>(theta)) return "edge";
  return "generic";
}

// ---------------------------------------------------------------------------
// Vertex hashing

inline constexpr std::uint64_t kFnvOffset = 14695981039346656037ull;
inline constexpr std::uint64_t kFnvPrime = 1099511628211ull;

inline std::uint64_t fnv1a(const void* data, std::size_t size, std::uint64_t h = kFnvOffset) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < size; ++i) {
    h ^= p[i];
    h *= kFnvPrime;
  }
  return h;
}

/// FNV-1a over the canonical bytes: Int64 as 8 little-endian bytes, Text as
/// its raw bytes.
inline std::uint64_t hash_value(const Value& v) {
  if (const auto* i = std::get_if<std::int64_t>(&v)) {
    unsigned char bytes[8];
    auto u = static_cast<std::uint64_t>(*i);
    for (int b = 0; b < 8; ++b) bytes[b] = static_cast<unsigned char>(u >> (8 * b));
    return fnv1a(bytes, 8);
  }
  const auto& s = std::get<std::string>(v);
  return fnv1a(s.data(), s.size());
}

inline std::uint64_t combine_hash(std::uint64_t h, std::uint64_t attr_hash) { return (h * kFnvPrime) ^ attr_hash; }

/// Order-preserving embedding of Int64 into unsigned order.
inline constexpr std::uint64_t monotone_key(std::int64_t v) {
  return static_cast<std::uint64_t>(v) ^ (std::uint64_t{1} << 63);
}

enum class HashKind : std::uint8_t {
  Plain,     // every vertex hashes to 0; used for graphs stored without a join in mind
  Equi,      // combined FNV-1a over an attribute list
  Monotone,  // order-preserving key of one Int64 attribute
};

/// The hash function of one operand: a kind plus the attributes it reads,
/// resolved against that operand's schema.
struct SideHash {
  HashKind kind = HashKind::Plain;
  std::vector<std::string> attrs;
  std::vector<std::size_t> indices;

  static SideHash plain() { return {}; }

  static SideHash bind(HashKind kind, std::vector<std::string> attrs, const Schema& schema) {
    SideHash h{kind, std::move(attrs), {}};
    for (const auto& a : h.attrs) h.indices.push_back(schema.index_of(a));
    if (kind == HashKind::Monotone &&
        (h.indices.size() != 1 || schema[h.indices[0]].type != AttrType::Int64)) {
      throw Error(ErrorCode::InvalidPredicate, "monotone hash needs exactly one int64 attribute");
    }
    if (kind == HashKind::Equi && h.indices.empty()) {
      throw Error(ErrorCode::InvalidPredicate, "equi hash needs at least one attribute");
    }
    return h;
  }

  std::uint64_t operator()(const std::vector<Value>& values) const {
    switch (kind) {
      case HashKind::Plain:
        return 0;
      case HashKind::Monotone:
        return monotone_key(std::get<std::int64_t>(values[indices[0]]));
      case HashKind::Equi:
        break;
    }
    std::uint64_t h = kFnvOffset;
    for (std::size_t i : indices) h = combine_hash(h, hash_value(values[i]));
    return h;
  }

  /// Textual identity stored next to an index, e.g. `eq:Year1,Organization1`.
  std::string fingerprint() const {
    if (kind == HashKind::Plain) return "plain";
    std::string out = kind == HashKind::Equi ? "eq:" : "leq:";
    for (std::size_t i = 0; i < attrs.size(); ++i) {
      if (i) out += ',';
      out += attrs[i];
    }
    return out;
  }

  static SideHash from_fingerprint(std::string_view fp, const Schema& schema) {
    if (fp == "plain") return plain();
    HashKind kind;
    if (fp.starts_with("eq:")) {
      kind = HashKind::Equi;
      fp.remove_prefix(3);
    } else if (fp.starts_with("leq:")) {
      kind = HashKind::Monotone;
      fp.remove_prefix(4);
    } else {
      throw Error(ErrorCode::InvalidArgument, "unrecognized hash fingerprint '" + std::string(fp) + "'");
    }
    std::vector<std::string> attrs;
    while (true) {
      auto comma = fp.find(',');
      attrs.emplace_back(fp.substr(0, comma));
      if (comma == std::string_view::npos) break;
      fp.remove_prefix(comma + 1);
    }
    return bind(kind, std::move(attrs), schema);
  }
};

struct HashSpec {
  HashKind kind = HashKind::Plain;
  SideHash left;
  SideHash right;

  const SideHash& side(Side s) const { return s == Side::Left ? left : right; }
};

/// Hash function pair that makes cogrouping sound for `theta`: equal hashes
/// for every equi-matching pair, or monotone keys for a less-equal predicate.
inline HashSpec derive_hash_spec(const ThetaPredicate& theta, const Schema& left, const Schema& right) {
  if (auto* eq = std::get_if<EquiConjunction>(&theta)) {
    BoundTheta validate(theta, left, right);
    std::vector<std::string> l, r;
    for (const auto& [a, b] : eq->pairs) {
      l.push_back(a);
      r.push_back(b);
    }
    return {HashKind::Equi, SideHash::bind(HashKind::Equi, std::move(l), left),
            SideHash::bind(HashKind::Equi, std::move(r), right)};
  }
  if (auto* le = std::get_if<LessEqual>(&theta)) {
    BoundTheta validate(theta, left, right);
    return {HashKind::Monotone, SideHash::bind(HashKind::Monotone, {le->left_attr}, left),
            SideHash::bind(HashKind::Monotone, {le->right_attr}, right)};
  }
  throw Error(ErrorCode::UnsupportedPredicate, "only equi and less-equal predicates can be hashed");
}

/// The hash of a single operand, for callers that only know one schema (the
/// indexer).
inline SideHash derive_side_hash(const ThetaPredicate& theta, const Schema& schema, Side side) {
  if (auto* eq = std::get_if<EquiConjunction>(&theta)) {
    if (eq->pairs.empty()) throw Error(ErrorCode::InvalidPredicate, "equi-join predicate needs at least one pair");
    std::vector<std::string> attrs;
    for (const auto& [a, b] : eq->pairs) attrs.push_back(side == Side::Left ? a : b);
    return SideHash::bind(HashKind::Equi, std::move(attrs), schema);
  }
  if (auto* le = std::get_if<LessEqual>(&theta)) {
    return SideHash::bind(HashKind::Monotone, {side == Side::Left ? le->left_attr : le->right_attr}, schema);
  }
  throw Error(ErrorCode::UnsupportedPredicate, "only equi and less-equal predicates can be hashed");
}

inline std::uint64_t hash_vertex(const VertexTuple& v, const HashSpec& spec, Side side) {
  return spec.side(side)(v.values);
}

}  // namespace gjoin
