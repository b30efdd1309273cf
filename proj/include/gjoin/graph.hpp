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
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "gjoin/error.hpp"

namespace gjoin {

using VertexId = std::uint64_t;

enum class AttrType : std::uint8_t { Int64, Text };

inline std::string_view to_string(AttrType t) {
  return t == AttrType::Int64 ? "int64" : "text";
}

using Value = std::variant<std::int64_t, std::string>;

inline AttrType type_of(const Value& v) {
  return std::holds_alternative<std::int64_t>(v) ? AttrType::Int64 : AttrType::Text;
}

struct Attribute {
  std::string name;
  AttrType type = AttrType::Int64;

  bool operator==(const Attribute&) const = default;
};

/// Ordered list of uniquely named, typed attributes. The order drives hash
/// composition, merge layout and the on-disk record encoding.
class Schema {
 public:
  Schema() = default;

  explicit Schema(std::vector<Attribute> attributes) : attributes_(std::move(attributes)) {
    for (std::size_t i = 0; i < attributes_.size(); ++i) {
      for (std::size_t j = 0; j < i; ++j) {
        if (attributes_[i].name == attributes_[j].name) {
          throw Error(ErrorCode::InvalidArgument,
                      "duplicate attribute name '" + attributes_[i].name + "'");
        }
      }
    }
  }

  std::size_t size() const noexcept { return attributes_.size(); }
  bool empty() const noexcept { return attributes_.empty(); }
  const Attribute& operator[](std::size_t i) const { return attributes_[i]; }
  const std::vector<Attribute>& attributes() const noexcept { return attributes_; }
  auto begin() const noexcept { return attributes_.begin(); }
  auto end() const noexcept { return attributes_.end(); }

  std::optional<std::size_t> find(std::string_view name) const {
    for (std::size_t i = 0; i < attributes_.size(); ++i) {
      if (attributes_[i].name == name) return i;
    }
    return std::nullopt;
  }

  std::size_t index_of(std::string_view name) const {
    if (auto i = find(name)) return *i;
    throw Error(ErrorCode::UnknownAttribute, "unknown attribute '" + std::string(name) + "'");
  }

  bool operator==(const Schema&) const = default;

 private:
  std::vector<Attribute> attributes_;
};

struct VertexTuple {
  VertexId id = 0;
  std::vector<Value> values;

  bool operator==(const VertexTuple&) const = default;
};

inline bool conforms(const std::vector<Value>& values, const Schema& schema) {
  if (values.size() != schema.size()) return false;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (type_of(values[i]) != schema[i].type) return false;
  }
  return true;
}

struct Edge {
  VertexId source = 0;
  VertexId destination = 0;

  auto operator<=>(const Edge&) const = default;
};

/// Union preserving `a`'s order followed by the attributes of `b` not in `a`.
inline Schema schema_union(const Schema& a, const Schema& b) {
  std::vector<Attribute> out = a.attributes();
  for (const auto& attr : b) {
    if (auto i = a.find(attr.name)) {
      if (a[*i].type != attr.type) {
        throw Error(ErrorCode::TypeConflict, "attribute '" + attr.name + "' is " +
                                                 std::string(to_string(a[*i].type)) + " on the left and " +
                                                 std::string(to_string(attr.type)) + " on the right");
      }
      continue;
    }
    out.push_back(attr);
  }
  return Schema(std::move(out));
}

/// Precomputed layout for merging tuples of two fixed schemas. Built once per
/// join; `compatible` and `merge` are then cheap per-pair operations.
class MergePlan {
 public:
  MergePlan(const Schema& left, const Schema& right) : result_(schema_union(left, right)) {
    left_size_ = left.size();
    for (std::size_t j = 0; j < right.size(); ++j) {
      if (auto i = left.find(right[j].name)) {
        shared_.emplace_back(*i, j);
      } else {
        right_only_.push_back(j);
      }
    }
  }

  const Schema& result_schema() const noexcept { return result_; }
  const std::vector<std::pair<std::size_t, std::size_t>>& shared() const noexcept { return shared_; }

  /// True when the tuples agree on every shared attribute name.
  bool compatible(const std::vector<Value>& left, const std::vector<Value>& right) const {
    for (const auto& [l, r] : shared_) {
      if (left[l] != right[r]) return false;
    }
    return true;
  }

  std::vector<Value> merge_values(const std::vector<Value>& left, const std::vector<Value>& right) const {
    std::vector<Value> out;
    out.reserve(left_size_ + right_only_.size());
    out.insert(out.end(), left.begin(), left.end());
    for (std::size_t j : right_only_) out.push_back(right[j]);
    return out;
  }

  std::optional<std::vector<Value>> merge(const std::vector<Value>& left,
                                          const std::vector<Value>& right) const {
    if (!compatible(left, right)) return std::nullopt;
    return merge_values(left, right);
  }

 private:
  Schema result_;
  std::size_t left_size_ = 0;
  std::vector<std::pair<std::size_t, std::size_t>> shared_;
  std::vector<std::size_t> right_only_;
};

/// Merged tuple whose projections onto each input schema give back the
/// inputs; absent when a shared attribute disagrees. The result id is 0, ids
/// for join results are assigned by the result graph.
inline std::optional<VertexTuple> merge_vertices(const VertexTuple& left, const Schema& left_schema,
                                                 const VertexTuple& right, const Schema& right_schema) {
  MergePlan plan(left_schema, right_schema);
  auto values = plan.merge(left.values, right.values);
  if (!values) return std::nullopt;
  return VertexTuple{0, std::move(*values)};
}

/// Projection of a tuple over `from` onto the attributes of `to` (by name).
inline std::vector<Value> project(const std::vector<Value>& values, const Schema& from, const Schema& to) {
  std::vector<Value> out;
  out.reserve(to.size());
  for (const auto& attr : to) out.push_back(values[from.index_of(attr.name)]);
  return out;
}

/// Immutable attributed directed graph with dense 0-based vertex ids. Edges
/// form a set; adjacency is held in CSR form with ascending neighbor ids.
class Graph {
 public:
  Graph() = default;

  Graph(Schema schema, std::vector<VertexTuple> vertices, std::vector<Edge> edges)
      : schema_(std::move(schema)), vertices_(std::move(vertices)), edges_(std::move(edges)) {
    std::sort(vertices_.begin(), vertices_.end(),
              [](const VertexTuple& a, const VertexTuple& b) { return a.id < b.id; });
    for (std::size_t i = 0; i < vertices_.size(); ++i) {
      if (vertices_[i].id != i) {
        throw Error(ErrorCode::InvalidGraph, "vertex ids must be dense and unique, missing id " + std::to_string(i));
      }
      if (!conforms(vertices_[i].values, schema_)) {
        throw Error(ErrorCode::InvalidGraph, "vertex " + std::to_string(i) + " does not conform to the schema");
      }
    }
    std::sort(edges_.begin(), edges_.end());
    edges_.erase(std::unique(edges_.begin(), edges_.end()), edges_.end());
    for (const auto& e : edges_) {
      if (e.source >= vertices_.size() || e.destination >= vertices_.size()) {
        throw Error(ErrorCode::InvalidGraph, "edge (" + std::to_string(e.source) + "," +
                                                 std::to_string(e.destination) + ") references a missing vertex");
      }
    }
    build_adjacency();
  }

  const Schema& schema() const noexcept { return schema_; }
  std::size_t vertex_count() const noexcept { return vertices_.size(); }
  std::size_t edge_count() const noexcept { return edges_.size(); }
  const std::vector<VertexTuple>& vertices() const noexcept { return vertices_; }
  const VertexTuple& vertex(VertexId id) const { return vertices_.at(id); }
  const std::vector<Edge>& edges() const noexcept { return edges_; }

  std::span<const VertexId> out(VertexId id) const {
    return {out_targets_.data() + out_offsets_[id], out_offsets_[id + 1] - out_offsets_[id]};
  }
  std::span<const VertexId> in(VertexId id) const {
    return {in_sources_.data() + in_offsets_[id], in_offsets_[id + 1] - in_offsets_[id]};
  }

  bool has_edge(VertexId source, VertexId destination) const {
    if (source >= vertices_.size()) return false;
    auto o = out(source);
    return std::binary_search(o.begin(), o.end(), destination);
  }

  bool operator==(const Graph& other) const {
    return schema_ == other.schema_ && vertices_ == other.vertices_ && edges_ == other.edges_;
  }

 private:
  void build_adjacency() {
    const std::size_t n = vertices_.size();
    out_offsets_.assign(n + 1, 0);
    in_offsets_.assign(n + 1, 0);
    for (const auto& e : edges_) {
      ++out_offsets_[e.source + 1];
      ++in_offsets_[e.destination + 1];
    }
    for (std::size_t i = 0; i < n; ++i) {
      out_offsets_[i + 1] += out_offsets_[i];
      in_offsets_[i + 1] += in_offsets_[i];
    }
    out_targets_.resize(edges_.size());
    in_sources_.resize(edges_.size());
    std::vector<std::size_t> out_fill(out_offsets_.begin(), out_offsets_.end() - 1);
    std::vector<std::size_t> in_fill(in_offsets_.begin(), in_offsets_.end() - 1);
    // edges_ is sorted by (source, destination), so both lists come out ascending.
    for (const auto& e : edges_) out_targets_[out_fill[e.source]++] = e.destination;
    for (const auto& e : edges_) in_sources_[in_fill[e.destination]++] = e.source;
  }

  Schema schema_;
  std::vector<VertexTuple> vertices_;
  std::vector<Edge> edges_;
  std::vector<std::size_t> out_offsets_{0};
  std::vector<VertexId> out_targets_;
  std::vector<std::size_t> in_offsets_{0};
  std::vector<VertexId> in_sources_;
};

}  // namespace gjoin
