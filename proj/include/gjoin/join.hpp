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
#include <chrono>
#include <cstdint>
#include <optional>
#include <ranges>
#include <unordered_map>
#include <variant>
#include <vector>

#include "gjoin/bulk_graph.hpp"
#include "gjoin/error.hpp"
#include "gjoin/graph.hpp"
#include "gjoin/predicate.hpp"
#include "gjoin/storage.hpp"

namespace gjoin {

enum class JoinSemantics : std::uint8_t { Conjunctive, Disjunctive };

struct JoinOptions {
  /// Joins poll this between outer iterations and throw Timeout past it.
  std::optional<std::chrono::steady_clock::time_point> deadline;
};

namespace detail {

inline void check_deadline(const JoinOptions& options) {
  if (options.deadline && std::chrono::steady_clock::now() > *options.deadline) {
    throw Error(ErrorCode::Timeout, "join exceeded its deadline");
  }
}

inline void check_fingerprint(const IndexedGraph& g, const SideHash& expected, Side side) {
  if (g.hash_spec().fingerprint() != expected.fingerprint()) {
    throw Error(ErrorCode::SpecMismatch, std::string(to_string(side)) + " operand " + g.directory().string() +
                                             " is indexed with '" + g.hash_spec().fingerprint() + "', the join needs '" +
                                             expected.fingerprint() + "'");
  }
}

}  // namespace detail

/// Nested-loop join over in-memory graphs for any predicate and either edge
/// semantics. Every pair of V1 x V2 is tested; a result edge
/// (l+r) -> (ll+rr) exists iff (l,ll) in E1 AND/OR (r,rr) in E2.
inline BulkGraph basic_join(const Graph& g1, const Graph& g2, const ThetaPredicate& theta, JoinSemantics op,
                            const JoinOptions& options = {}) {
  MergePlan plan(g1.schema(), g2.schema());
  BoundTheta bound(theta, g1.schema(), g2.schema());
  BulkGraph result(plan.result_schema());

  for (const auto& l : g1.vertices()) {
    detail::check_deadline(options);
    for (const auto& r : g2.vertices()) {
      if (!bound(l, r) || !plan.compatible(l.values, r.values)) continue;
      result.add_vertex(l.id, r.id, [&] { return plan.merge_values(l.values, r.values); });
    }
  }

  const std::size_t n = result.vertex_count();
  if (op == JoinSemantics::Conjunctive) {
    for (VertexId z = 0; z < n; ++z) {
      const auto& zv = result.vertex(z);
      for (VertexId ll : g1.out(zv.left_id)) {
        for (VertexId rr : g2.out(zv.right_id)) {
          if (auto t = result.find(ll, rr)) result.add_edge(z, *t);
        }
      }
    }
    return result;
  }

  std::vector<std::vector<VertexId>> by_left(g1.vertex_count()), by_right(g2.vertex_count());
  for (VertexId z = 0; z < n; ++z) {
    by_left[result.vertex(z).left_id].push_back(z);
    by_right[result.vertex(z).right_id].push_back(z);
  }
  std::vector<VertexId> targets;
  for (VertexId z = 0; z < n; ++z) {
    const auto& zv = result.vertex(z);
    targets.clear();
    for (VertexId ll : g1.out(zv.left_id)) targets.insert(targets.end(), by_left[ll].begin(), by_left[ll].end());
    for (VertexId rr : g2.out(zv.right_id)) targets.insert(targets.end(), by_right[rr].begin(), by_right[rr].end());
    std::sort(targets.begin(), targets.end());
    targets.erase(std::unique(targets.begin(), targets.end()), targets.end());
    for (VertexId t : targets) result.add_edge(z, t);
  }
  return result;
}

/// Conjunctive equi-join over hash-sorted operands. Only hash groups present
/// on both sides are paired, and neighbor pairs are only considered when
/// their hashes are equal and shared.
inline BulkGraph cogrouped_equijoin(const IndexedGraph& g1, const IndexedGraph& g2, const EquiConjunction& theta,
                                    const JoinOptions& options = {}) {
  detail::check_fingerprint(g1, derive_side_hash(theta, g1.schema(), Side::Left), Side::Left);
  detail::check_fingerprint(g2, derive_side_hash(theta, g2.schema(), Side::Right), Side::Right);
  BoundTheta bound(theta, g1.schema(), g2.schema());
  MergePlan plan(g1.schema(), g2.schema());
  BulkGraph result(plan.result_schema());

  struct Shared {
    std::uint64_t hash;
    std::size_t left;
    std::size_t right;
  };
  std::vector<Shared> shared;
  for (std::size_t i = 0, j = 0; i < g1.hash_count() && j < g2.hash_count();) {
    std::uint64_t a = g1.hash_at(i), b = g2.hash_at(j);
    if (a < b) {
      ++i;
    } else if (b < a) {
      ++j;
    } else {
      shared.push_back({a, i++, j++});
    }
  }
  auto in_shared = [&](std::uint64_t h) {
    auto it = std::lower_bound(shared.begin(), shared.end(), h,
                               [](const Shared& s, std::uint64_t v) { return s.hash < v; });
    return it != shared.end() && it->hash == h;
  };

  auto matches = [&](const VertexTuple& u, const VertexTuple& v) {
    return bound(u, v) && plan.compatible(u.values, v.values);
  };
  auto add = [&](const VertexTuple& u, const VertexTuple& v) {
    return result.add_vertex(u.id, v.id, [&] { return plan.merge_values(u.values, v.values); });
  };

  for (const auto& group : shared) {
    detail::check_deadline(options);
    std::vector<StoredVertex> lefts = g1.group(group.left);
    std::vector<StoredVertex> rights = g2.group(group.right);
    for (const auto& u : lefts) {
      for (const auto& v : rights) {
        if (!matches(u.tuple, v.tuple)) continue;
        VertexId z = add(u.tuple, v.tuple);
        for (std::size_t a = 0; a < u.out.size(); ++a) {
          VertexId nu_id = u.out[a];
          std::uint64_t h = g1.hash_of(nu_id);
          if (!in_shared(h)) continue;
          std::optional<StoredVertex> nu;
          for (std::size_t b = 0; b < v.out.size(); ++b) {
            VertexId nv_id = v.out[b];
            if (g2.hash_of(nv_id) != h) continue;
            if (!nu) nu = g1.vertex_by_id(nu_id);
            StoredVertex nv = g2.vertex_by_id(nv_id);
            if (!matches(nu->tuple, nv.tuple)) continue;
            result.add_edge(z, add(nu->tuple, nv.tuple));
          }
        }
      }
    }
  }
  return result;
}

/// Conjunctive join for u.A <= v.B over monotone-hashed operands. Left
/// hashes are scanned ascending and, for each, right hashes descending until
/// the right hash drops below the left one.
inline BulkGraph cogrouped_leq_join(const IndexedGraph& g1, const IndexedGraph& g2, const LessEqual& theta,
                                    const JoinOptions& options = {}) {
  detail::check_fingerprint(g1, derive_side_hash(theta, g1.schema(), Side::Left), Side::Left);
  detail::check_fingerprint(g2, derive_side_hash(theta, g2.schema(), Side::Right), Side::Right);
  BoundTheta bound(theta, g1.schema(), g2.schema());
  MergePlan plan(g1.schema(), g2.schema());
  BulkGraph result(plan.result_schema());

  auto matches = [&](const VertexTuple& u, const VertexTuple& v) {
    return bound(u, v) && plan.compatible(u.values, v.values);
  };
  auto add = [&](const VertexTuple& u, const VertexTuple& v) {
    return result.add_vertex(u.id, v.id, [&] { return plan.merge_values(u.values, v.values); });
  };

  for (std::size_t i = 0; i < g1.hash_count(); ++i) {
    detail::check_deadline(options);
    const std::uint64_t h_left = g1.hash_at(i);
    for (const auto& u : g1.group(i)) {
      for (std::size_t j = g2.hash_count(); j-- > 0;) {
        if (h_left > g2.hash_at(j)) break;
        for (const auto& v : g2.group(j)) {
          if (!matches(u.tuple, v.tuple)) continue;
          VertexId z = add(u.tuple, v.tuple);
          for (std::size_t a = 0; a < u.out.size(); ++a) {
            VertexId nu_id = u.out[a];
            std::uint64_t h = g1.hash_of(nu_id);
            std::optional<StoredVertex> nu;
            for (std::size_t b = 0; b < v.out.size(); ++b) {
              VertexId nv_id = v.out[b];
              // Monotone keys: a larger left key can never satisfy <=.
              if (h > g2.hash_of(nv_id)) continue;
              if (!nu) nu = g1.vertex_by_id(nu_id);
              StoredVertex nv = g2.vertex_by_id(nv_id);
              if (!matches(nu->tuple, nv.tuple)) continue;
              result.add_edge(z, add(nu->tuple, nv.tuple));
            }
          }
        }
      }
    }
  }
  return result;
}

/// Dispatches to the cogrouped algorithm matching the predicate kind.
inline BulkGraph cogrouped_join(const IndexedGraph& g1, const IndexedGraph& g2, const ThetaPredicate& theta,
                                const JoinOptions& options = {}) {
  if (const auto* eq = std::get_if<EquiConjunction>(&theta)) return cogrouped_equijoin(g1, g2, *eq, options);
  if (const auto* le = std::get_if<LessEqual>(&theta)) return cogrouped_leq_join(g1, g2, *le, options);
  throw Error(ErrorCode::UnsupportedPredicate, "cogrouped joins need an equi or less-equal predicate");
}

/// Mean number of result vertices per distinct participating operand vertex;
/// 0 for an empty result.
inline double multiplicity(const BulkGraph& result, Side side) {
  if (result.vertex_count() == 0) return 0.0;
  std::unordered_map<VertexId, std::size_t> counts;
  for (const auto& v : result.vertices()) ++counts[side == Side::Left ? v.left_id : v.right_id];
  return static_cast<double>(result.vertex_count()) / static_cast<double>(counts.size());
}

}  // namespace gjoin
