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
#include <filesystem>
#include <fstream>
#include <numeric>
#include <ostream>
#include <string>
#include <vector>

#include "gjoin/bulk_graph.hpp"
#include "gjoin/error.hpp"
#include "gjoin/graph.hpp"

namespace gjoin {

namespace detail {

inline void escape_into(std::string& out, std::string_view s) {
  static const char* hex = "0123456789ABCDEF";
  for (char c : s) {
    if (c == '%' || c == ',' || c == '=' || c == '\t' || c == '\n' || c == '\r') {
      out += '%';
      out += hex[(static_cast<unsigned char>(c) >> 4) & 0xf];
      out += hex[static_cast<unsigned char>(c) & 0xf];
    } else {
      out += c;
    }
  }
}

}  // namespace detail

/// Writes the result as text: a `#vertices <n>` block of
/// `resultId<TAB>leftId<TAB>rightId<TAB>attr=value,...` lines followed by an
/// `#edges <m>` block of `source<TAB>destination` lines. Text values escape
/// `%` `,` `=` TAB CR LF as %XX.
///
/// With `canonical`, result ids are renumbered by ascending (leftId, rightId)
/// and edges are sorted, so two algorithms producing the same graph write the
/// same bytes.
inline void write_edge_list(const BulkGraph& result, std::ostream& out, bool canonical = false) {
  const std::size_t n = result.vertex_count();
  std::vector<VertexId> order(n);
  std::iota(order.begin(), order.end(), VertexId{0});
  if (canonical) {
    std::sort(order.begin(), order.end(), [&](VertexId a, VertexId b) {
      const auto& x = result.vertex(a);
      const auto& y = result.vertex(b);
      return std::pair(x.left_id, x.right_id) < std::pair(y.left_id, y.right_id);
    });
  }
  std::vector<VertexId> renamed(n);
  for (std::size_t k = 0; k < n; ++k) renamed[order[k]] = k;

  const Schema& schema = result.schema();
  std::string line;
  out << "#vertices " << n << '\n';
  for (std::size_t k = 0; k < n; ++k) {
    const auto& v = result.vertex(order[k]);
    line = std::to_string(k) + '\t' + std::to_string(v.left_id) + '\t' + std::to_string(v.right_id) + '\t';
    for (std::size_t a = 0; a < schema.size(); ++a) {
      if (a) line += ',';
      line += schema[a].name;
      line += '=';
      if (const auto* i = std::get_if<std::int64_t>(&v.tuple.values[a])) {
        line += std::to_string(*i);
      } else {
        detail::escape_into(line, std::get<std::string>(v.tuple.values[a]));
      }
    }
    out << line << '\n';
  }

  std::vector<std::pair<VertexId, VertexId>> edges;
  edges.reserve(result.edge_count());
  for (std::size_t k = 0; k < n; ++k) {
    for (VertexId t : result.out(order[k])) edges.emplace_back(k, renamed[t]);
  }
  if (canonical) std::sort(edges.begin(), edges.end());
  out << "#edges " << edges.size() << '\n';
  for (const auto& [s, d] : edges) out << s << '\t' << d << '\n';
}

inline void write_edge_list(const BulkGraph& result, const std::filesystem::path& path, bool canonical = false) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoError, "cannot create " + path.string());
  write_edge_list(result, out, canonical);
  if (!out) throw Error(ErrorCode::IoError, "write failed for " + path.string());
}

/// The result as an ordinary graph over A1 u A2 (vertex id = result id), so
/// it can be stored and joined again.
inline Graph to_graph(const BulkGraph& result) {
  std::vector<VertexTuple> vertices;
  std::vector<Edge> edges;
  vertices.reserve(result.vertex_count());
  for (const auto& v : result.vertices()) {
    vertices.push_back(v.tuple);
    for (VertexId t : result.out(v.tuple.id)) edges.push_back({v.tuple.id, t});
  }
  return Graph(result.schema(), std::move(vertices), std::move(edges));
}

}  // namespace gjoin
