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

#include <cstdint>
#include <optional>
#include <set>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "gjoin/graph.hpp"

namespace gjoin {

struct ResultVertex {
  VertexId left_id = 0;
  VertexId right_id = 0;
  VertexTuple tuple;  // tuple.id is the result id
};

namespace detail {

struct PairHash {
  std::size_t operator()(const std::pair<std::uint64_t, std::uint64_t>& p) const noexcept {
    std::uint64_t h = p.first * 0x9e3779b97f4a7c15ull;
    h ^= p.second + 0x7f4a7c159e3779b9ull + (h << 6) + (h >> 2);
    return static_cast<std::size_t>(h);
  }
};

}  // namespace detail

/// In-memory join result: an append-only adjacency list whose vertices are
/// keyed by their (left id, right id) provenance pair.
class BulkGraph {
 public:
  using ProvenancePair = std::pair<VertexId, VertexId>;

  BulkGraph() = default;
  explicit BulkGraph(Schema schema) : schema_(std::move(schema)) {}

  const Schema& schema() const noexcept { return schema_; }
  std::size_t vertex_count() const noexcept { return vertices_.size(); }
  std::size_t edge_count() const noexcept { return edges_.size(); }
  const std::vector<ResultVertex>& vertices() const noexcept { return vertices_; }
  const ResultVertex& vertex(VertexId id) const { return vertices_.at(id); }
  const std::vector<VertexId>& out(VertexId id) const { return out_.at(id); }

  std::optional<VertexId> find(VertexId left, VertexId right) const {
    auto it = ids_.find({left, right});
    if (it == ids_.end()) return std::nullopt;
    return it->second;
  }

  /// Result id of (left, right), inserting it with `make_values()` when new.
  template <typename MakeValues>
  VertexId add_vertex(VertexId left, VertexId right, MakeValues&& make_values) {
    auto [it, inserted] = ids_.try_emplace({left, right}, vertices_.size());
    if (inserted) {
      vertices_.push_back({left, right, VertexTuple{it->second, make_values()}});
      out_.emplace_back();
    }
    return it->second;
  }

  VertexId add_vertex(VertexId left, VertexId right, std::vector<Value> values) {
    return add_vertex(left, right, [&] { return std::move(values); });
  }

  bool add_edge(VertexId from, VertexId to) {
    if (!edges_.insert({from, to}).second) return false;
    out_[from].push_back(to);
    return true;
  }

  std::set<ProvenancePair> provenance_vertices() const {
    std::set<ProvenancePair> out;
    for (const auto& v : vertices_) out.insert({v.left_id, v.right_id});
    return out;
  }

  std::set<std::pair<ProvenancePair, ProvenancePair>> provenance_edges() const {
    std::set<std::pair<ProvenancePair, ProvenancePair>> out;
    for (const auto& v : vertices_) {
      for (VertexId t : out_[v.tuple.id]) {
        const auto& w = vertices_[t];
        out.insert({{v.left_id, v.right_id}, {w.left_id, w.right_id}});
      }
    }
    return out;
  }

  /// Same provenance vertex set and edge set; result ids may differ.
  bool equivalent(const BulkGraph& other) const {
    return provenance_vertices() == other.provenance_vertices() && provenance_edges() == other.provenance_edges();
  }

 private:
  Schema schema_;
  std::vector<ResultVertex> vertices_;
  std::vector<std::vector<VertexId>> out_;
  std::unordered_map<ProvenancePair, VertexId, detail::PairHash> ids_;
  std::unordered_set<std::pair<VertexId, VertexId>, detail::PairHash> edges_;
};

}  // namespace gjoin
