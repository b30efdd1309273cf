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
#include <filesystem>
#include <fstream>
#include <istream>
#include <random>
#include <sstream>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "gjoin/error.hpp"
#include "gjoin/graph.hpp"

namespace gjoin {

/// A graph with dense ids plus, for each dense id, the id it had in the
/// source it was derived from.
struct DerivedGraph {
  Graph graph;
  std::vector<VertexId> original_ids;
};

// ---------------------------------------------------------------------------
// Edge lists

/// Whitespace-separated id pairs, one per line; `#` starts a comment line.
/// Ids are re-mapped densely in ascending order of the original id and
/// duplicate pairs collapse.
inline DerivedGraph parse_edge_list(std::istream& in) {
  std::vector<std::pair<std::uint64_t, std::uint64_t>> raw;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream fields(line);
    std::string a, b, extra;
    fields >> a >> b;
    auto parse_id = [&](const std::string& s) -> std::uint64_t {
      if (s.empty() || s.find_first_not_of("0123456789") != std::string::npos) {
        throw Error(ErrorCode::ParseError, "line " + std::to_string(line_no) + ": expected two vertex ids, got '" +
                                               line + "'");
      }
      try {
        return std::stoull(s);
      } catch (const std::exception&) {
        throw Error(ErrorCode::ParseError, "line " + std::to_string(line_no) + ": vertex id out of range");
      }
    };
    std::uint64_t s = parse_id(a), d = parse_id(b);
    if (fields >> extra) {
      throw Error(ErrorCode::ParseError, "line " + std::to_string(line_no) + ": trailing data after the id pair");
    }
    raw.emplace_back(s, d);
  }

  std::vector<std::uint64_t> ids;
  ids.reserve(raw.size() * 2);
  for (const auto& [s, d] : raw) {
    ids.push_back(s);
    ids.push_back(d);
  }
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  auto dense = [&](std::uint64_t id) {
    return static_cast<VertexId>(std::lower_bound(ids.begin(), ids.end(), id) - ids.begin());
  };
  std::vector<VertexTuple> vertices(ids.size());
  for (std::size_t i = 0; i < ids.size(); ++i) vertices[i].id = i;
  std::vector<Edge> edges;
  edges.reserve(raw.size());
  for (const auto& [s, d] : raw) edges.push_back({dense(s), dense(d)});
  return {Graph(Schema{}, std::move(vertices), std::move(edges)), std::move(ids)};
}

inline DerivedGraph parse_edge_list(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
  return parse_edge_list(in);
}

/// `provenance.tsv`: a header line then `denseId<TAB>originalId` per vertex.
inline void write_provenance(const std::filesystem::path& path, const std::vector<VertexId>& original_ids) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoError, "cannot create " + path.string());
  out << "denseId\toriginalId\n";
  for (std::size_t i = 0; i < original_ids.size(); ++i) out << i << '\t' << original_ids[i] << '\n';
  if (!out) throw Error(ErrorCode::IoError, "write failed for " + path.string());
}

inline std::vector<VertexId> read_provenance(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
  std::string header;
  std::getline(in, header);
  std::vector<VertexId> out;
  VertexId dense, original;
  while (in >> dense >> original) {
    if (dense != out.size()) throw Error(ErrorCode::ParseError, path.string() + ": provenance ids are not dense");
    out.push_back(original);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Randomness. std::*_distribution output differs between standard libraries,
// so draws are done directly on the (fully specified) mt19937_64 stream.

namespace detail {

inline std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

/// Uniform in [0, n), n > 0.
inline std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t n) {
  const std::uint64_t threshold = (0 - n) % n;
  while (true) {
    std::uint64_t x = rng();
    if (x >= threshold) return x % n;
  }
}

inline double uniform_unit(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

}  // namespace detail

// ---------------------------------------------------------------------------
// Enrichment

struct EnrichmentConfig {
  std::uint64_t seed = 1;
  std::uint64_t organizations = 50;
  std::int64_t year_min = 1990;
  std::int64_t year_max = 2016;
  std::string suffix = "1";
};

inline Schema enrichment_schema(const std::string& suffix) {
  return Schema({{"IP" + suffix, AttrType::Text},
                 {"Organization" + suffix, AttrType::Text},
                 {"Year" + suffix, AttrType::Int64}});
}

/// Attaches IP, Organization and Year attributes. Each vertex draws from its
/// own stream keyed by (seed, id), so the values do not depend on the suffix
/// or on the other vertices.
inline Graph enrich(const Graph& g, const EnrichmentConfig& cfg) {
  if (!g.schema().empty()) throw Error(ErrorCode::AlreadyEnriched, "graph already carries attributes");
  if (cfg.organizations < 1) throw Error(ErrorCode::InvalidArgument, "need at least one organization");
  if (cfg.year_min > cfg.year_max) throw Error(ErrorCode::InvalidArgument, "empty year range");
  const auto year_span = static_cast<std::uint64_t>(cfg.year_max) - static_cast<std::uint64_t>(cfg.year_min) + 1;

  std::vector<VertexTuple> vertices;
  vertices.reserve(g.vertex_count());
  for (VertexId id = 0; id < g.vertex_count(); ++id) {
    std::mt19937_64 rng(detail::mix64(cfg.seed ^ detail::mix64(id)));
    std::string ip;
    for (int octet = 0; octet < 4; ++octet) {
      if (octet) ip += '.';
      ip += std::to_string(detail::uniform_below(rng, 256));
    }
    std::string org = "Org" + std::to_string(detail::uniform_below(rng, cfg.organizations));
    // year_span wraps to 0 only for the full Int64 range
    std::uint64_t offset = year_span == 0 ? rng() : detail::uniform_below(rng, year_span);
    auto year = static_cast<std::int64_t>(static_cast<std::uint64_t>(cfg.year_min) + offset);
    vertices.push_back({id, {Value{std::move(ip)}, Value{std::move(org)}, Value{year}}});
  }
  return Graph(enrichment_schema(cfg.suffix), std::move(vertices), g.edges());
}

// ---------------------------------------------------------------------------
// Sampling

struct SampleConfig {
  VertexId start = 0;
  std::uint64_t seed = 1;
  std::size_t target_size = 1;
  double restart_probability = 0.15;
  double budget_factor = 100.0;
};

/// Induced subgraph of `g` on `keep` (any order), re-identified densely in
/// ascending order of the source id.
inline DerivedGraph induced_subgraph(const Graph& g, std::vector<VertexId> keep) {
  std::sort(keep.begin(), keep.end());
  keep.erase(std::unique(keep.begin(), keep.end()), keep.end());
  std::unordered_map<VertexId, VertexId> dense;
  dense.reserve(keep.size());
  std::vector<VertexTuple> vertices;
  vertices.reserve(keep.size());
  for (std::size_t i = 0; i < keep.size(); ++i) {
    dense.emplace(keep[i], i);
    vertices.push_back({i, g.vertex(keep[i]).values});
  }
  std::vector<Edge> edges;
  for (std::size_t i = 0; i < keep.size(); ++i) {
    for (VertexId d : g.out(keep[i])) {
      if (auto it = dense.find(d); it != dense.end()) edges.push_back({i, it->second});
    }
  }
  return {Graph(g.schema(), std::move(vertices), std::move(edges)), std::move(keep)};
}

/// Random walk with restart from `cfg.start` over out-edges until
/// `cfg.target_size` distinct vertices were visited; returns the induced
/// subgraph on them. Throws Unreachable when the step budget
/// (budget_factor * target_size * max(1, average out-degree)) runs out first.
inline DerivedGraph random_walk_sample(const Graph& g, const SampleConfig& cfg) {
  if (cfg.start >= g.vertex_count()) {
    throw Error(ErrorCode::InvalidArgument, "start vertex " + std::to_string(cfg.start) + " does not exist");
  }
  if (cfg.target_size < 1 || cfg.target_size > g.vertex_count()) {
    throw Error(ErrorCode::InvalidArgument, "sample size " + std::to_string(cfg.target_size) + " outside [1, " +
                                                std::to_string(g.vertex_count()) + "]");
  }
  const double avg_degree =
      std::max(1.0, static_cast<double>(g.edge_count()) / static_cast<double>(g.vertex_count()));
  const auto budget = static_cast<std::uint64_t>(cfg.budget_factor * static_cast<double>(cfg.target_size) * avg_degree);

  std::mt19937_64 rng(cfg.seed);
  std::unordered_set<VertexId> seen{cfg.start};
  std::vector<VertexId> visited{cfg.start};
  VertexId current = cfg.start;
  for (std::uint64_t steps = 0; visited.size() < cfg.target_size && steps < budget; ++steps) {
    auto out = g.out(current);
    if (out.empty() || detail::uniform_unit(rng) < cfg.restart_probability) {
      current = cfg.start;
      continue;
    }
    current = out[detail::uniform_below(rng, out.size())];
    if (seen.insert(current).second) visited.push_back(current);
  }
  if (visited.size() < cfg.target_size) {
    throw Error(ErrorCode::Unreachable, "random walk reached only " + std::to_string(visited.size()) + " of " +
                                            std::to_string(cfg.target_size) + " vertices within " +
                                            std::to_string(budget) + " steps");
  }
  return induced_subgraph(g, std::move(visited));
}

}  // namespace gjoin
