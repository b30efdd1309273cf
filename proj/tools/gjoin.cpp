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

// gjoin command line: dataset preparation, indexing, joins and benchmarks.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "gjoin/gjoin.hpp"

namespace fs = std::filesystem;

namespace {

constexpr int kExitFailure = 1;
constexpr int kExitUsage = 2;
constexpr int kExitSpecMismatch = 3;

int exit_code_for(gjoin::ErrorCode code) {
  using gjoin::ErrorCode;
  switch (code) {
    case ErrorCode::SpecMismatch:
      return kExitSpecMismatch;
    case ErrorCode::UnknownAttribute:
    case ErrorCode::InvalidPredicate:
    case ErrorCode::UnsupportedPredicate:
    case ErrorCode::TypeConflict:
    case ErrorCode::InvalidArgument:
    case ErrorCode::AlreadyEnriched:
      return kExitUsage;
    default:
      return kExitFailure;
  }
}

/// Copies the provenance of `from` to `to`, optionally re-mapped through the
/// dense ids in `selected`.
void carry_provenance(const fs::path& from, const fs::path& to, const std::vector<gjoin::VertexId>& selected) {
  fs::path source = from / "provenance.tsv";
  std::vector<gjoin::VertexId> ids = selected;
  if (fs::exists(source)) {
    auto original = gjoin::read_provenance(source);
    for (auto& id : ids) id = original.at(id);
  }
  gjoin::write_provenance(to / "provenance.tsv", ids);
}

std::vector<gjoin::VertexId> identity(std::size_t n) {
  std::vector<gjoin::VertexId> ids(n);
  for (std::size_t i = 0; i < n; ++i) ids[i] = i;
  return ids;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Graph joins over hash-sorted secondary-memory indexes"};
  app.require_subcommand(1);

  // parse
  std::string parse_in, parse_out;
  auto* parse = app.add_subcommand("parse", "Read a whitespace-separated edge list into a graph directory");
  parse->add_option("input", parse_in, "Edge list file")->required();
  parse->add_option("--out", parse_out, "Output graph directory")->required();

  // enrich
  std::string enrich_in, enrich_out;
  gjoin::EnrichmentConfig enrich_cfg;
  auto* enrich = app.add_subcommand("enrich", "Attach IP, Organization and Year attributes");
  enrich->add_option("graph", enrich_in, "Input graph directory")->required();
  enrich->add_option("--out", enrich_out, "Output graph directory")->required();
  enrich->add_option("--seed", enrich_cfg.seed, "Attribute seed");
  enrich->add_option("--suffix", enrich_cfg.suffix, "Suffix appended to attribute names")->check(
      CLI::IsMember({"1", "2"}));
  enrich->add_option("--organizations", enrich_cfg.organizations, "Distinct organizations")->check(
      CLI::PositiveNumber);
  enrich->add_option("--year-min", enrich_cfg.year_min, "First employment year");
  enrich->add_option("--year-max", enrich_cfg.year_max, "Last employment year");

  // sample
  std::string sample_in, sample_out;
  gjoin::SampleConfig sample_cfg;
  auto* sample = app.add_subcommand("sample", "Random-walk sample an induced subgraph");
  sample->add_option("graph", sample_in, "Input graph directory")->required();
  sample->add_option("--out", sample_out, "Output graph directory")->required();
  sample->add_option("--size", sample_cfg.target_size, "Number of vertices to collect")->required();
  sample->add_option("--seed", sample_cfg.seed, "Walk seed");
  sample->add_option("--start", sample_cfg.start, "Start vertex (dense id)");
  sample->add_option("--restart", sample_cfg.restart_probability, "Restart probability")->check(CLI::Range(0.0, 1.0));
  sample->add_option("--budget-factor", sample_cfg.budget_factor, "Step budget per target vertex and unit degree");

  // index
  std::string index_in, index_out, index_pred, index_side = "left";
  auto* index = app.add_subcommand("index", "Sort a graph by the hash a join predicate needs");
  index->add_option("graph", index_in, "Input graph directory")->required();
  index->add_option("--out", index_out, "Output index directory")->required();
  index->add_option("--predicate", index_pred, "eq:l=r,... or leq:l<=r")->required();
  index->add_option("--side", index_side, "Operand side")->check(CLI::IsMember({"left", "right"}));

  // join
  std::string join_left, join_right, join_pred, join_algo = "cogrouped", join_sem = "and", join_export, join_graph;
  bool join_canonical = false;
  auto* join = app.add_subcommand("join", "Join two graph directories");
  join->add_option("left", join_left, "Left operand directory")->required();
  join->add_option("right", join_right, "Right operand directory")->required();
  join->add_option("--predicate", join_pred, "eq:l=r,... or leq:l<=r")->required();
  join->add_option("--algorithm", join_algo, "basic or cogrouped")->check(CLI::IsMember({"basic", "cogrouped"}));
  join->add_option("--semantics", join_sem, "and (conjunctive) or or (disjunctive)")->check(
      CLI::IsMember({"and", "or"}));
  join->add_option("--export", join_export, "Write the result as a text edge list");
  join->add_flag("--canonical", join_canonical, "Number result vertices by (leftId, rightId) in the export");
  join->add_option("--graph-out", join_graph, "Store the result as a graph directory");

  // bench
  std::string bench_in, bench_out, bench_sizes;
  gjoin::BenchConfig bench_cfg;
  long long timeout_secs = 4 * 3600;
  bool no_basic = false;
  auto* bench = app.add_subcommand("bench", "Run the sampling/indexing/join benchmark");
  bench->add_option("edges", bench_in, "Source edge list")->required();
  bench->add_option("--sizes", bench_sizes, "Comma-separated operand sizes, ascending")->required();
  bench->add_option("--predicate", bench_cfg.predicate, "eq:... or leq:...")
      ->default_val("eq:Year1=Year2,Organization1=Organization2");
  bench->add_option("--runs", bench_cfg.runs, "Repetitions per measurement (>= 3)")->default_val(10);
  bench->add_option("--timeout-secs", timeout_secs, "Per-size time limit")->default_val(4 * 3600);
  bench->add_option("--block-size", bench_cfg.block_bytes, "Block size for on-disk size accounting")->default_val(4096);
  bench->add_option("--seed", bench_cfg.seed, "Walk seed of the left operand (right uses seed+1)");
  bench->add_option("--attr-seed", bench_cfg.enrichment.seed, "Attribute seed");
  bench->add_option("--start", bench_cfg.start_vertex, "Start vertex of both walks");
  bench->add_option("--organizations", bench_cfg.enrichment.organizations, "Distinct organizations");
  bench->add_flag("--no-basic", no_basic, "Skip timing the nested-loop join");
  bench->add_option("--work-dir", bench_cfg.work_dir, "Scratch directory for per-run indexes");
  bench->add_option("--out", bench_out, "CSV output file (default stdout)");

  // stats
  std::string stats_in;
  std::uint64_t stats_block = 4096;
  auto* stats = app.add_subcommand("stats", "Describe a graph directory");
  stats->add_option("graph", stats_in, "Graph directory")->required();
  stats->add_option("--block-size", stats_block, "Block size for on-disk size accounting");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (*parse) {
      auto parsed = gjoin::parse_edge_list(fs::path(parse_in));
      gjoin::write_graph(parsed.graph, parse_out);
      gjoin::write_provenance(fs::path(parse_out) / "provenance.tsv", parsed.original_ids);
      std::cout << "vertices=" << parsed.graph.vertex_count() << " edges=" << parsed.graph.edge_count() << '\n';
    } else if (*enrich) {
      auto g = gjoin::load_graph(enrich_in);
      auto enriched = gjoin::enrich(g, enrich_cfg);
      gjoin::write_graph(enriched, enrich_out);
      carry_provenance(enrich_in, enrich_out, identity(enriched.vertex_count()));
      std::cout << "vertices=" << enriched.vertex_count() << " attributes=" << enriched.schema().size() << '\n';
    } else if (*sample) {
      auto g = gjoin::load_graph(sample_in);
      if (sample_cfg.target_size > g.vertex_count()) {
        std::cerr << "error: --size " << sample_cfg.target_size << " exceeds the " << g.vertex_count()
                  << " source vertices\n";
        return kExitUsage;
      }
      auto sampled = gjoin::random_walk_sample(g, sample_cfg);
      gjoin::write_graph(sampled.graph, sample_out);
      carry_provenance(sample_in, sample_out, sampled.original_ids);
      std::cout << "vertices=" << sampled.graph.vertex_count() << " edges=" << sampled.graph.edge_count() << '\n';
    } else if (*index) {
      auto g = gjoin::load_graph(index_in);
      auto side = index_side == "right" ? gjoin::Side::Right : gjoin::Side::Left;
      auto hash = gjoin::derive_side_hash(gjoin::parse_predicate(index_pred), g.schema(), side);
      double ms = gjoin::time_ms([&] { gjoin::build_index(g, hash, side, index_out); });
      if (fs::exists(fs::path(index_in) / "provenance.tsv") && fs::path(index_in) != fs::path(index_out)) {
        fs::copy_file(fs::path(index_in) / "provenance.tsv", fs::path(index_out) / "provenance.tsv",
                      fs::copy_options::overwrite_existing);
      }
      std::cout << "index_ms=" << ms << " hashes=" << gjoin::IndexedGraph::open(index_out).hash_count() << '\n';
    } else if (*join) {
      if (join_algo == "cogrouped" && join_sem == "or") {
        std::cerr << "error: disjunctive requires basic\n";
        return kExitUsage;
      }
      auto theta = gjoin::parse_predicate(join_pred);
      gjoin::BulkGraph result;
      double ms = 0;
      if (join_algo == "cogrouped") {
        auto g1 = gjoin::IndexedGraph::open(join_left);
        auto g2 = gjoin::IndexedGraph::open(join_right);
        ms = gjoin::time_ms([&] { result = gjoin::cogrouped_join(g1, g2, theta); });
      } else {
        auto g1 = gjoin::load_graph(join_left);
        auto g2 = gjoin::load_graph(join_right);
        auto op = join_sem == "or" ? gjoin::JoinSemantics::Disjunctive : gjoin::JoinSemantics::Conjunctive;
        ms = gjoin::time_ms([&] { result = gjoin::basic_join(g1, g2, theta, op); });
      }
      if (!join_export.empty()) gjoin::write_edge_list(result, fs::path(join_export), join_canonical);
      if (!join_graph.empty()) gjoin::write_graph(gjoin::to_graph(result), join_graph);
      std::cout << "join_ms=" << ms << " vertices=" << result.vertex_count() << " edges=" << result.edge_count()
                << " avg_multiplicity=" << gjoin::multiplicity(result, gjoin::Side::Left) << '\n';
    } else if (*bench) {
      for (std::size_t pos = 0; pos <= bench_sizes.size();) {
        auto comma = bench_sizes.find(',', pos);
        if (comma == std::string::npos) comma = bench_sizes.size();
        std::string item = bench_sizes.substr(pos, comma - pos);
        if (item.empty() || item.find_first_not_of("0123456789") != std::string::npos) {
          std::cerr << "error: bad size '" << item << "' in --sizes\n";
          return kExitUsage;
        }
        bench_cfg.sizes.push_back(std::stoull(item));
        pos = comma + 1;
      }
      bench_cfg.timeout = std::chrono::seconds(timeout_secs);
      bench_cfg.time_basic = !no_basic;
      auto rows = gjoin::run_benchmark(bench_in, bench_cfg);
      if (bench_out.empty()) {
        gjoin::write_bench_csv(rows, std::cout);
      } else {
        std::ofstream out(bench_out, std::ios::trunc);
        if (!out) throw gjoin::Error(gjoin::ErrorCode::IoError, "cannot create " + bench_out);
        gjoin::write_bench_csv(rows, out);
      }
    } else if (*stats) {
      auto g = gjoin::IndexedGraph::open(stats_in);
      std::size_t edges = 0;
      for (gjoin::VertexId id = 0; id < g.vertex_count(); ++id) edges += g.vertex_by_id(id).out.size();
      std::cout << "vertices=" << g.vertex_count() << " edges=" << edges << " hashes=" << g.hash_count()
                << " hash=" << g.hash_spec().fingerprint() << " side=" << gjoin::to_string(g.side())
                << " block_kb=" << gjoin::block_size_kb(stats_in, stats_block) << '\n';
      std::cout << "schema=";
      for (std::size_t i = 0; i < g.schema().size(); ++i) {
        std::cout << (i ? "," : "") << g.schema()[i].name << ':' << gjoin::to_string(g.schema()[i].type);
      }
      std::cout << '\n';
    }
  } catch (const gjoin::Error& e) {
    std::string message = e.what();
    if (e.code() == gjoin::ErrorCode::UnknownAttribute && message.rfind("unknown attribute", 0) != 0) {
      message = "unknown attribute: " + message;
    }
    std::cerr << "error: " << message << '\n';
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitFailure;
  }
  return 0;
}
