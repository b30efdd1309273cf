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
#include <filesystem>
#include <functional>
#include <iomanip>
#include <numeric>
#include <optional>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "gjoin/error.hpp"
#include "gjoin/ingest.hpp"
#include "gjoin/join.hpp"
#include "gjoin/predicate.hpp"
#include "gjoin/storage.hpp"

namespace gjoin {

/// Mean after dropping exactly one smallest and one largest sample.
inline double trimmed_mean(std::span<const double> samples) {
  if (samples.size() < 3) {
    throw Error(ErrorCode::InvalidArgument, "trimmed mean needs at least 3 runs, got " + std::to_string(samples.size()));
  }
  std::vector<double> sorted(samples.begin(), samples.end());
  std::sort(sorted.begin(), sorted.end());
  double sum = std::accumulate(sorted.begin() + 1, sorted.end() - 1, 0.0);
  return sum / static_cast<double>(sorted.size() - 2);
}

/// Wall-clock milliseconds spent in `fn`.
template <typename Fn>
double time_ms(Fn&& fn) {
  auto start = std::chrono::steady_clock::now();
  fn();
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
}

/// Sum of the regular files in `dir`, each rounded up to whole blocks, in KB.
inline double block_size_kb(const std::filesystem::path& dir, std::uint64_t block_bytes = 4096) {
  if (block_bytes == 0) throw Error(ErrorCode::InvalidArgument, "block size must be positive");
  std::uint64_t total = 0;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    std::uint64_t size = entry.file_size();
    total += (size + block_bytes - 1) / block_bytes * block_bytes;
  }
  return static_cast<double>(total) / 1024.0;
}

struct BenchConfig {
  std::vector<std::size_t> sizes;
  std::string predicate;
  std::size_t runs = 10;
  std::chrono::seconds timeout{4 * 3600};
  std::uint64_t block_bytes = 4096;
  std::uint64_t seed = 1;
  VertexId start_vertex = 0;
  EnrichmentConfig enrichment;  // suffix is ignored: operands get "1" and "2"
  bool time_basic = true;
  std::filesystem::path work_dir;
};

/// One row per operand size; times are trimmed means in milliseconds.
struct BenchReport {
  std::size_t left_size = 0;
  std::size_t right_size = 0;
  double store_index_ms_left = 0;
  double store_index_ms_right = 0;
  double join_ms_cogrouped = 0;
  std::optional<double> join_ms_basic;
  std::size_t result_vertices = 0;
  std::size_t result_edges = 0;
  double avg_multiplicity = 0;
  double block_size_kb_left = 0;
  double block_size_kb_right = 0;
  std::size_t runs = 0;
  std::string status = "ok";
};

inline constexpr char kBenchCsvHeader[] =
    "left_size,right_size,store_index_ms_left,store_index_ms_right,join_ms_cogrouped,join_ms_basic,"
    "result_vertices,result_edges,avg_multiplicity,block_size_kb_left,block_size_kb_right,runs,trim,status";

inline void write_bench_csv(std::span<const BenchReport> rows, std::ostream& out) {
  out << kBenchCsvHeader << '\n';
  for (const auto& r : rows) {
    std::ostringstream line;
    line << std::fixed << std::setprecision(3);
    line << r.left_size << ',' << r.right_size << ',' << r.store_index_ms_left << ',' << r.store_index_ms_right << ','
         << r.join_ms_cogrouped << ',';
    if (r.join_ms_basic) line << *r.join_ms_basic;
    line << ',' << r.result_vertices << ',' << r.result_edges << ',' << r.avg_multiplicity << ','
         << r.block_size_kb_left << ',' << r.block_size_kb_right << ',' << r.runs << ",drop-min-max,";
    std::string status = r.status;
    std::replace(status.begin(), status.end(), ',', ';');
    std::replace(status.begin(), status.end(), '\n', ' ');
    line << status;
    out << line.str() << '\n';
  }
}

namespace detail {

class ScratchDir {
 public:
  explicit ScratchDir(std::filesystem::path path) : path_(std::move(path)) {
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ScratchDir(const ScratchDir&) = delete;
  ScratchDir& operator=(const ScratchDir&) = delete;
  ~ScratchDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  const std::filesystem::path& path() const noexcept { return path_; }

 private:
  std::filesystem::path path_;
};

}  // namespace detail

/// Measures one operand pair: indexing time per operand, cogrouped join time
/// and optionally basic join time, each as a trimmed mean over `cfg.runs`.
/// Every run indexes into a fresh directory so no run sees an earlier one's
/// files.
inline BenchReport bench_operands(const Graph& left, const Graph& right, const BenchConfig& cfg,
                                  const std::filesystem::path& scratch) {
  if (cfg.runs < 3) throw Error(ErrorCode::InvalidArgument, "at least 3 runs are needed for a trimmed mean");
  BenchReport row;
  row.left_size = left.vertex_count();
  row.right_size = right.vertex_count();
  row.runs = cfg.runs;
  ThetaPredicate theta = parse_predicate(cfg.predicate);
  HashSpec spec = derive_hash_spec(theta, left.schema(), right.schema());
  JoinOptions options{std::chrono::steady_clock::now() + cfg.timeout};

  std::vector<double> store_left, store_right, join_cogrouped, join_basic;
  for (std::size_t run = 0; run < cfg.runs; ++run) {
    detail::check_deadline(options);
    detail::ScratchDir dir(scratch / ("run" + std::to_string(run)));
    store_left.push_back(time_ms([&] { build_index(left, spec, Side::Left, dir.path() / "left"); }));
    store_right.push_back(time_ms([&] { build_index(right, spec, Side::Right, dir.path() / "right"); }));
    if (run == 0) {
      row.block_size_kb_left = block_size_kb(dir.path() / "left", cfg.block_bytes);
      row.block_size_kb_right = block_size_kb(dir.path() / "right", cfg.block_bytes);
    }
  }
  for (std::size_t run = 0; run < cfg.runs; ++run) {
    detail::check_deadline(options);
    detail::ScratchDir dir(scratch / ("join" + std::to_string(run)));
    build_index(left, spec, Side::Left, dir.path() / "left");
    build_index(right, spec, Side::Right, dir.path() / "right");
    auto g1 = IndexedGraph::open(dir.path() / "left");
    auto g2 = IndexedGraph::open(dir.path() / "right");
    BulkGraph result;
    join_cogrouped.push_back(time_ms([&] { result = cogrouped_join(g1, g2, theta, options); }));
    row.result_vertices = result.vertex_count();
    row.result_edges = result.edge_count();
    row.avg_multiplicity = multiplicity(result, Side::Left);
  }
  if (cfg.time_basic) {
    for (std::size_t run = 0; run < cfg.runs; ++run) {
      detail::check_deadline(options);
      join_basic.push_back(time_ms([&] { basic_join(left, right, theta, JoinSemantics::Conjunctive, options); }));
    }
    row.join_ms_basic = trimmed_mean(join_basic);
  }
  row.store_index_ms_left = trimmed_mean(store_left);
  row.store_index_ms_right = trimmed_mean(store_right);
  row.join_ms_cogrouped = trimmed_mean(join_cogrouped);
  return row;
}

/// Full pipeline per size: parse, enrich twice (suffixes 1 and 2, same seed),
/// sample both operands from the same start vertex with different walk seeds,
/// then bench_operands. A failing or timed-out size is reported in its row.
inline std::vector<BenchReport> run_benchmark(const std::filesystem::path& edge_list, const BenchConfig& cfg) {
  if (cfg.runs < 3) throw Error(ErrorCode::InvalidArgument, "at least 3 runs are needed for a trimmed mean");
  if (!std::is_sorted(cfg.sizes.begin(), cfg.sizes.end())) {
    throw Error(ErrorCode::InvalidArgument, "benchmark sizes must be ascending");
  }
  parse_predicate(cfg.predicate);
  DerivedGraph source = parse_edge_list(edge_list);
  EnrichmentConfig e1 = cfg.enrichment, e2 = cfg.enrichment;
  e1.suffix = "1";
  e2.suffix = "2";
  Graph left_source = enrich(source.graph, e1);
  Graph right_source = enrich(source.graph, e2);

  std::filesystem::path work = cfg.work_dir.empty()
                                   ? std::filesystem::temp_directory_path() / ("gjoin-bench-" + std::to_string(::getpid()))
                                   : cfg.work_dir;
  detail::ScratchDir scratch(work);
  std::vector<BenchReport> rows;
  for (std::size_t size : cfg.sizes) {
    try {
      auto left = random_walk_sample(left_source, {cfg.start_vertex, cfg.seed, size});
      auto right = random_walk_sample(right_source, {cfg.start_vertex, cfg.seed + 1, size});
      rows.push_back(bench_operands(left.graph, right.graph, cfg, scratch.path() / std::to_string(size)));
    } catch (const Error& e) {
      BenchReport row;
      row.left_size = row.right_size = size;
      row.runs = cfg.runs;
      row.status = e.code() == ErrorCode::Timeout ? "timeout" : "failed: " + std::string(e.what());
      rows.push_back(row);
    }
  }
  return rows;
}

}  // namespace gjoin
