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

#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdio>
#include <map>

#include "gjoin/ingest.hpp"
#include "gjoin/storage.hpp"
#include "test_support.hpp"

#ifndef GJOIN_CLI_PATH
#error "GJOIN_CLI_PATH must name the gjoin executable"
#endif

namespace gjoin {
namespace {

using testing::TempDir;

struct Run {
  int status = -1;
  std::string output;  // stdout and stderr interleaved
};

Run gjoin_cli(const std::string& args) {
  std::string command = std::string("'") + GJOIN_CLI_PATH + "' " + args + " 2>&1";
  Run run;
  FILE* pipe = ::popen(command.c_str(), "r");
  if (!pipe) return run;
  char buf[4096];
  std::size_t n;
  while ((n = std::fread(buf, 1, sizeof buf, pipe)) > 0) run.output.append(buf, n);
  int raw = ::pclose(pipe);
  run.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  return run;
}

std::string q(const std::filesystem::path& p) { return "'" + p.string() + "'"; }

std::map<std::string, std::string> directory_bytes(const std::filesystem::path& dir) {
  std::map<std::string, std::string> out;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    out[entry.path().filename().string()] = testing::read_bytes(entry.path());
  }
  return out;
}

/// parse -> enrich (left with suffix 1, right with suffix 2) in `dir`.
class CliPipelineTest : public ::testing::Test {
 protected:
  void SetUp() override {
    testing::write_synthetic_edge_list(dir / "edges.txt", 1500, 6, 77);
    ASSERT_EQ(gjoin_cli("parse " + q(dir / "edges.txt") + " --out " + q(dir / "raw")).status, 0);
    ASSERT_EQ(gjoin_cli("enrich " + q(dir / "raw") + " --out " + q(dir / "g1") + " --seed 3 --suffix 1").status, 0);
    ASSERT_EQ(gjoin_cli("enrich " + q(dir / "raw") + " --out " + q(dir / "g2") + " --seed 3 --suffix 2").status, 0);
  }

  TempDir dir;
  const std::string eq = "eq:Year1=Year2,Organization1=Organization2";
};

TEST_F(CliPipelineTest, ParseWritesGraphAndProvenance) {
  auto g = load_graph(dir / "raw");
  EXPECT_EQ(g.vertex_count(), 1500u);
  auto ids = read_provenance(dir / "raw" / "provenance.tsv");
  ASSERT_EQ(ids.size(), 1500u);
  EXPECT_EQ(ids[0], 7u);
  EXPECT_EQ(ids[1], 10u);
  EXPECT_EQ(read_provenance(dir / "g1" / "provenance.tsv"), ids);
}

TEST_F(CliPipelineTest, IndexValidSpec) {
  auto run = gjoin_cli("index " + q(dir / "g1") + " --out " + q(dir / "i1") + " --predicate " + eq + " --side left");
  EXPECT_EQ(run.status, 0) << run.output;
  EXPECT_NE(run.output.find("index_ms="), std::string::npos);
  EXPECT_TRUE(std::filesystem::exists(dir / "i1" / "va.gjn"));
  EXPECT_EQ(IndexedGraph::open(dir / "i1").hash_spec().fingerprint(), "eq:Year1,Organization1");
}

TEST_F(CliPipelineTest, IndexUnknownAttribute) {
  auto run = gjoin_cli("index " + q(dir / "g1") + " --out " + q(dir / "i1") + " --predicate eq:Salary1=Salary2");
  EXPECT_EQ(run.status, 2);
  EXPECT_NE(run.output.find("unknown attribute"), std::string::npos) << run.output;
}

TEST_F(CliPipelineTest, ReindexIsByteIdentical) {
  const std::string args = " --predicate " + eq + " --side right";
  ASSERT_EQ(gjoin_cli("index " + q(dir / "g2") + " --out " + q(dir / "a") + args).status, 0);
  ASSERT_EQ(gjoin_cli("index " + q(dir / "g2") + " --out " + q(dir / "b") + args).status, 0);
  auto a = directory_bytes(dir / "a");
  EXPECT_EQ(a.size(), 5u);  // four storage files plus provenance
  EXPECT_EQ(a, directory_bytes(dir / "b"));
}

TEST_F(CliPipelineTest, JoinAlgorithmsAgree) {
  ASSERT_EQ(gjoin_cli("sample " + q(dir / "g1") + " --out " + q(dir / "s1") + " --size 1000 --seed 1").status, 0);
  ASSERT_EQ(gjoin_cli("sample " + q(dir / "g2") + " --out " + q(dir / "s2") + " --size 1000 --seed 2").status, 0);
  ASSERT_EQ(gjoin_cli("index " + q(dir / "s1") + " --out " + q(dir / "i1") + " --predicate " + eq + " --side left").status, 0);
  ASSERT_EQ(gjoin_cli("index " + q(dir / "s2") + " --out " + q(dir / "i2") + " --predicate " + eq + " --side right").status, 0);

  auto fast = gjoin_cli("join " + q(dir / "i1") + " " + q(dir / "i2") + " --predicate " + eq +
                        " --algorithm cogrouped --export " + q(dir / "fast.tsv") + " --canonical");
  ASSERT_EQ(fast.status, 0) << fast.output;
  EXPECT_NE(fast.output.find("avg_multiplicity="), std::string::npos);
  auto slow = gjoin_cli("join " + q(dir / "s1") + " " + q(dir / "s2") + " --predicate " + eq +
                        " --algorithm basic --semantics and --export " + q(dir / "slow.tsv") + " --canonical");
  ASSERT_EQ(slow.status, 0) << slow.output;
  EXPECT_EQ(testing::read_bytes(dir / "fast.tsv"), testing::read_bytes(dir / "slow.tsv"));

  // the export agrees with an in-process oracle join
  auto expected = basic_join(load_graph(dir / "s1"), load_graph(dir / "s2"), parse_predicate(eq),
                             JoinSemantics::Conjunctive);
  std::string header = "#vertices " + std::to_string(expected.vertex_count()) + "\n";
  EXPECT_EQ(testing::read_bytes(dir / "fast.tsv").rfind(header, 0), 0u);
}

TEST_F(CliPipelineTest, CogroupedDisjunctiveRejected) {
  auto run = gjoin_cli("join " + q(dir / "g1") + " " + q(dir / "g2") + " --predicate " + eq +
                       " --algorithm cogrouped --semantics or");
  EXPECT_EQ(run.status, 2);
  EXPECT_NE(run.output.find("disjunctive requires basic"), std::string::npos) << run.output;
}

TEST_F(CliPipelineTest, SpecMismatchExitsThree) {
  ASSERT_EQ(gjoin_cli("index " + q(dir / "g1") + " --out " + q(dir / "i1") + " --predicate eq:Year1=Year2").status, 0);
  ASSERT_EQ(gjoin_cli("index " + q(dir / "g2") + " --out " + q(dir / "i2") + " --predicate eq:Year1=Year2 --side right")
                .status,
            0);
  auto run = gjoin_cli("join " + q(dir / "i1") + " " + q(dir / "i2") + " --predicate " + eq + " --algorithm cogrouped");
  EXPECT_EQ(run.status, 3) << run.output;
  // un-indexed directories carry the plain hash, which never matches
  auto plain = gjoin_cli("join " + q(dir / "g1") + " " + q(dir / "g2") + " --predicate " + eq + " --algorithm cogrouped");
  EXPECT_EQ(plain.status, 3) << plain.output;
}

TEST_F(CliPipelineTest, SampleIsDeterministic) {
  const std::string args = " --size 1000 --seed 7 --start 0";
  ASSERT_EQ(gjoin_cli("sample " + q(dir / "g1") + " --out " + q(dir / "a") + args).status, 0);
  ASSERT_EQ(gjoin_cli("sample " + q(dir / "g1") + " --out " + q(dir / "b") + args).status, 0);
  EXPECT_EQ(directory_bytes(dir / "a"), directory_bytes(dir / "b"));
  EXPECT_EQ(load_graph(dir / "a").vertex_count(), 1000u);
}

TEST_F(CliPipelineTest, SampleTooLarge) {
  auto run = gjoin_cli("sample " + q(dir / "g1") + " --out " + q(dir / "a") + " --size 1501");
  EXPECT_EQ(run.status, 2) << run.output;
}

TEST_F(CliPipelineTest, EnrichTwiceRejected) {
  auto run = gjoin_cli("enrich " + q(dir / "g1") + " --out " + q(dir / "again"));
  EXPECT_EQ(run.status, 2) << run.output;
}

TEST_F(CliPipelineTest, Stats) {
  auto run = gjoin_cli("stats " + q(dir / "g1"));
  EXPECT_EQ(run.status, 0);
  EXPECT_NE(run.output.find("vertices=1500 edges="), std::string::npos) << run.output;
  EXPECT_NE(run.output.find("schema=IP1:text,Organization1:text,Year1:int64"), std::string::npos) << run.output;
}

TEST_F(CliPipelineTest, BenchCsv) {
  auto run = gjoin_cli("bench " + q(dir / "edges.txt") + " --sizes 10,100 --runs 3 --predicate " + eq + " --out " +
                       q(dir / "bench.csv") + " --work-dir " + q(dir / "work"));
  ASSERT_EQ(run.status, 0) << run.output;
  std::istringstream csv(testing::read_bytes(dir / "bench.csv"));
  std::string line;
  std::vector<std::string> lines;
  while (std::getline(csv, line)) lines.push_back(line);
  ASSERT_EQ(lines.size(), 3u);
  EXPECT_EQ(lines[1].rfind("10,10,", 0), 0u);
  EXPECT_EQ(lines[2].rfind("100,100,", 0), 0u);
  EXPECT_EQ(gjoin_cli("bench " + q(dir / "edges.txt") + " --sizes 10 --runs 2 --predicate " + eq).status, 2);
}

TEST(CliTest, UsageErrors) {
  EXPECT_EQ(gjoin_cli("").status, 2);
  EXPECT_EQ(gjoin_cli("frobnicate").status, 2);
  EXPECT_EQ(gjoin_cli("join a b --predicate eq:x=y --algorithm quantum").status, 2);
  EXPECT_EQ(gjoin_cli("--help").status, 0);
}

TEST(CliTest, MissingInputIsAFailure) {
  auto run = gjoin_cli("stats /nonexistent/graph");
  EXPECT_EQ(run.status, 1) << run.output;
}

}  // namespace
}  // namespace gjoin
