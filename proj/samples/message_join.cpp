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

// Joins two small reply graphs on the user and message time, once with the
// nested-loop join and once through on-disk indexes, and prints the result.

#include <filesystem>
#include <iostream>

#include "gjoin/gjoin.hpp"

using namespace gjoin;

int main() {
  // posts by user, edge (u, v): u received a reply from v
  Graph first(Schema({{"User", AttrType::Text}, {"MsgTime1", AttrType::Int64}}),
              {{0, {Value{"Alice"}, Value{std::int64_t{1}}}},
               {1, {Value{"Bob"}, Value{std::int64_t{3}}}},
               {2, {Value{"Carl"}, Value{std::int64_t{2}}}}},
              {{0, 1}, {1, 0}, {2, 1}});
  Graph second(Schema({{"User", AttrType::Text}, {"MsgTime2", AttrType::Int64}}),
               {{0, {Value{"Dan"}, Value{std::int64_t{6}}}},
                {1, {Value{"Alice"}, Value{std::int64_t{7}}}},
                {2, {Value{"Bob"}, Value{std::int64_t{3}}}},
                {3, {Value{"Carl"}, Value{std::int64_t{2}}}}},
               {{0, 1}, {1, 2}, {2, 1}, {3, 2}});

  // The shared User attribute already forces equal users when merging.
  ThetaPredicate increasing = LessEqual{"MsgTime1", "MsgTime2"};

  std::cout << "nested-loop, conjunctive:\n";
  write_edge_list(basic_join(first, second, increasing, JoinSemantics::Conjunctive), std::cout);
  std::cout << "nested-loop, disjunctive:\n";
  write_edge_list(basic_join(first, second, increasing, JoinSemantics::Disjunctive), std::cout);

  auto dir = std::filesystem::temp_directory_path() / "gjoin-message-join";
  HashSpec spec = derive_hash_spec(increasing, first.schema(), second.schema());
  auto left = build_index(first, spec, Side::Left, dir / "left");
  auto right = build_index(second, spec, Side::Right, dir / "right");
  std::cout << "cogrouped, conjunctive:\n";
  write_edge_list(cogrouped_join(left, right, increasing), std::cout, true);
  std::filesystem::remove_all(dir);
  return 0;
}
