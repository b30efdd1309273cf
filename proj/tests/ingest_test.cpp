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

#include <cmath>
#include <map>
#include <sstream>

#include "gjoin/ingest.hpp"
#include "test_support.hpp"

namespace gjoin {
namespace {

using testing::TempDir;

DerivedGraph parse(const std::string& text) {
  std::istringstream in(text);
  return parse_edge_list(in);
}

TEST(ParseEdgeListTest, TwoEdges) {
  auto d = parse("0 1\n1 2");
  EXPECT_EQ(d.graph.vertex_count(), 3u);
  EXPECT_EQ(d.graph.edge_count(), 2u);
  EXPECT_TRUE(d.graph.schema().empty());
}

TEST(ParseEdgeListTest, CommentsAndDenseIds) {
  auto d = parse("# comment\n5 7");
  EXPECT_EQ(d.graph.vertex_count(), 2u);
  EXPECT_EQ(d.graph.edges(), (std::vector<Edge>{{0, 1}}));
  EXPECT_EQ(d.original_ids, (std::vector<VertexId>{5, 7}));
}

TEST(ParseEdgeListTest, DuplicatesCollapse) {
  EXPECT_EQ(parse("0 1\n0 1").graph.edge_count(), 1u);
}

TEST(ParseEdgeListTest, TabsBlankLinesAndCarriageReturns) {
  auto d = parse("# FromNodeId\tToNodeId\n\n30\t10\r\n10\t30\r\n   \n");
  EXPECT_EQ(d.original_ids, (std::vector<VertexId>{10, 30}));
  EXPECT_EQ(d.graph.edges(), (std::vector<Edge>{{0, 1}, {1, 0}}));
}

TEST(ParseEdgeListTest, ErrorsCarryLineNumbers) {
  for (const std::string text : {"0 1\n2\n", "0 1\n1 x\n", "0 1\n1 2 3\n", "0 1\n-1 2\n"}) {
    try {
      parse(text);
      FAIL() << text;
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::ParseError);
      EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos) << e.what();
    }
  }
}

TEST(ParseEdgeListTest, MissingFile) {
  try {
    parse_edge_list(std::filesystem::path("/nonexistent/edges.txt"));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::IoError);
  }
}

TEST(ProvenanceTest, RoundTrip) {
  TempDir dir;
  std::vector<VertexId> ids{7, 3, 99, 1ull << 40};
  write_provenance(dir / "provenance.tsv", ids);
  EXPECT_EQ(testing::read_bytes(dir / "provenance.tsv"),
            "denseId\toriginalId\n0\t7\n1\t3\n2\t99\n3\t1099511627776\n");
  EXPECT_EQ(read_provenance(dir / "provenance.tsv"), ids);
}

Graph bare(std::size_t n) {
  std::vector<VertexTuple> v(n);
  for (std::size_t i = 0; i < n; ++i) v[i].id = i;
  return Graph(Schema{}, std::move(v), {});
}

TEST(EnrichTest, SchemaAndValueRanges) {
  Graph g = enrich(bare(500), {.seed = 3, .suffix = "2"});
  EXPECT_EQ(g.schema(), enrichment_schema("2"));
  EXPECT_EQ(g.schema()[0].name, "IP2");
  for (const auto& v : g.vertices()) {
    const auto& ip = std::get<std::string>(v.values[0]);
    int a, b, c, d;
    char tail;
    ASSERT_EQ(std::sscanf(ip.c_str(), "%d.%d.%d.%d%c", &a, &b, &c, &d, &tail), 4) << ip;
    for (int octet : {a, b, c, d}) EXPECT_TRUE(octet >= 0 && octet < 256);
    const auto& org = std::get<std::string>(v.values[1]);
    ASSERT_EQ(org.rfind("Org", 0), 0u);
    int k = std::stoi(org.substr(3));
    EXPECT_TRUE(k >= 0 && k < 50);
    auto year = std::get<std::int64_t>(v.values[2]);
    EXPECT_TRUE(year >= 1990 && year <= 2016);
  }
}

TEST(EnrichTest, Deterministic) {
  Graph a = enrich(bare(300), {.seed = 11});
  Graph b = enrich(bare(300), {.seed = 11});
  Graph c = enrich(bare(300), {.seed = 12});
  EXPECT_EQ(a, b);
  EXPECT_NE(a, c);
}

TEST(EnrichTest, ValuesIndependentOfSuffixAndEdges) {
  auto d = parse("0 1\n1 2\n2 0\n");
  Graph a = enrich(d.graph, {.seed = 5, .suffix = "1"});
  Graph b = enrich(bare(3), {.seed = 5, .suffix = "2"});
  for (VertexId i = 0; i < 3; ++i) EXPECT_EQ(a.vertex(i).values, b.vertex(i).values);
  EXPECT_EQ(a.edges(), d.graph.edges());
}

TEST(EnrichTest, DegenerateUniformityMatchesEveryPair) {
  EnrichmentConfig one{.seed = 1, .organizations = 1, .year_min = 2000, .year_max = 2000};
  Graph a = enrich(bare(20), one);
  one.suffix = "2";
  one.seed = 2;
  Graph b = enrich(bare(30), one);
  EquiConjunction theta{{{"Year1", "Year2"}, {"Organization1", "Organization2"}}};
  BoundTheta bound(theta, a.schema(), b.schema());
  for (const auto& u : a.vertices())
    for (const auto& v : b.vertices()) ASSERT_TRUE(bound(u, v));
}

TEST(EnrichTest, RejectsAttributedGraphsAndBadConfig) {
  Graph g = enrich(bare(2), {});
  try {
    enrich(g, {});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::AlreadyEnriched);
  }
  EXPECT_THROW(enrich(bare(2), {.organizations = 0}), Error);
  EXPECT_THROW(enrich(bare(2), {.year_min = 2001, .year_max = 2000}), Error);
}

TEST(EnrichTest, MatchProbabilityWithinBinomialBounds) {
  // Pairs (i, i) under independent seed pairs are independent trials with
  // success probability 1 / (50 * 27).
  constexpr std::size_t kVertices = 10000;
  constexpr std::uint64_t kSeedPairs = 30;
  const double p = 1.0 / (50.0 * 27.0);
  const double n = static_cast<double>(kVertices * kSeedPairs);
  std::uint64_t matches = 0;
  Graph base = bare(kVertices);
  for (std::uint64_t s = 0; s < kSeedPairs; ++s) {
    Graph a = enrich(base, {.seed = 1000 + 2 * s});
    Graph b = enrich(base, {.seed = 1001 + 2 * s, .suffix = "2"});
    for (VertexId i = 0; i < kVertices; ++i) {
      const auto& u = a.vertex(i).values;
      const auto& v = b.vertex(i).values;
      matches += (u[1] == v[1] && u[2] == v[2]) ? 1 : 0;
    }
  }
  const double mean = n * p, sigma = std::sqrt(n * p * (1 - p));
  EXPECT_LE(std::abs(static_cast<double>(matches) - mean), 3 * sigma) << matches << " vs " << mean;
}

TEST(EnrichTest, MarginalsAreUniform) {
  // chi-square goodness of fit on organization and year, 10^4 vertices
  Graph g = enrich(bare(10000), {.seed = 9});
  std::map<std::string, int> orgs;
  std::map<std::int64_t, int> years;
  for (const auto& v : g.vertices()) {
    ++orgs[std::get<std::string>(v.values[1])];
    ++years[std::get<std::int64_t>(v.values[2])];
  }
  ASSERT_EQ(orgs.size(), 50u);
  ASSERT_EQ(years.size(), 27u);
  auto chi2 = [](const auto& counts, double expected) {
    double x = 0;
    for (const auto& [k, c] : counts) x += (c - expected) * (c - expected) / expected;
    return x;
  };
  // 99.9% quantiles of chi-square with 49 and 26 degrees of freedom
  EXPECT_LT(chi2(orgs, 10000.0 / 50), 85.35);
  EXPECT_LT(chi2(years, 10000.0 / 27), 54.05);
}

Graph cycle_with_chords(std::size_t n) {
  std::vector<Edge> edges;
  for (VertexId i = 0; i < n; ++i) {
    edges.push_back({i, (i + 1) % n});
    edges.push_back({i, (i * 7 + 3) % n});
  }
  std::vector<VertexTuple> v(n);
  for (std::size_t i = 0; i < n; ++i) v[i].id = i;
  return Graph(Schema{}, std::move(v), std::move(edges));
}

void expect_induced(const Graph& source, const DerivedGraph& sample) {
  const auto& ids = sample.original_ids;
  ASSERT_EQ(ids.size(), sample.graph.vertex_count());
  ASSERT_TRUE(std::is_sorted(ids.begin(), ids.end()));
  std::set<std::pair<VertexId, VertexId>> expected, actual;
  for (std::size_t i = 0; i < ids.size(); ++i)
    for (std::size_t j = 0; j < ids.size(); ++j)
      if (source.has_edge(ids[i], ids[j])) expected.insert({i, j});
  for (const auto& e : sample.graph.edges()) actual.insert({e.source, e.destination});
  EXPECT_EQ(actual, expected);
  for (std::size_t i = 0; i < ids.size(); ++i) EXPECT_EQ(sample.graph.vertex(i).values, source.vertex(ids[i]).values);
}

TEST(RandomWalkTest, SizeOneIsTheStartVertex) {
  Graph g(Schema{}, {{0, {}}, {1, {}}, {2, {}}}, {{0, 1}, {1, 1}, {1, 2}});
  auto s = random_walk_sample(g, {.start = 1, .seed = 4, .target_size = 1});
  EXPECT_EQ(s.original_ids, std::vector<VertexId>{1});
  EXPECT_EQ(s.graph.edges(), (std::vector<Edge>{{0, 0}}));
  auto t = random_walk_sample(g, {.start = 0, .seed = 4, .target_size = 1});
  EXPECT_TRUE(t.graph.edges().empty());
}

TEST(RandomWalkTest, DeterministicAndSeedSensitive) {
  Graph g = enrich(cycle_with_chords(2000), {});
  auto a = random_walk_sample(g, {.start = 0, .seed = 7, .target_size = 300});
  auto b = random_walk_sample(g, {.start = 0, .seed = 7, .target_size = 300});
  auto c = random_walk_sample(g, {.start = 0, .seed = 8, .target_size = 300});
  EXPECT_EQ(a.original_ids, b.original_ids);
  EXPECT_EQ(a.graph, b.graph);
  EXPECT_NE(a.original_ids, c.original_ids);
  EXPECT_EQ(a.original_ids.size(), 300u);
  EXPECT_TRUE(std::binary_search(a.original_ids.begin(), a.original_ids.end(), 0));
  EXPECT_TRUE(std::binary_search(c.original_ids.begin(), c.original_ids.end(), 0));
}

TEST(RandomWalkTest, SampleIsInducedSubgraph) {
  std::mt19937_64 rng(99);
  for (int iter = 0; iter < 20; ++iter) {
    Graph g = testing::random_graph(rng, 200, 4.0, {{"A", AttrType::Int64, 10}});
    auto size = 1 + static_cast<std::size_t>(rng() % 40);
    try {
      expect_induced(g, random_walk_sample(g, {.start = 0, .seed = rng(), .target_size = size}));
    } catch (const Error& e) {
      ASSERT_EQ(e.code(), ErrorCode::Unreachable);  // start may sit in a small component
    }
  }
}

TEST(RandomWalkTest, InducedSubgraphOracle) {
  Graph g = cycle_with_chords(50);
  auto d = induced_subgraph(g, {40, 3, 9, 3, 4, 31});
  EXPECT_EQ(d.original_ids, (std::vector<VertexId>{3, 4, 9, 31, 40}));
  expect_induced(g, d);
}

TEST(RandomWalkTest, UnreachableReportsAchievedSize) {
  // 0 -> 1 -> 2, and 3, 4 unreachable from 0
  Graph g(Schema{}, {{0, {}}, {1, {}}, {2, {}}, {3, {}}, {4, {}}}, {{0, 1}, {1, 2}, {3, 4}});
  try {
    random_walk_sample(g, {.start = 0, .seed = 1, .target_size = 4});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::Unreachable);
    EXPECT_NE(std::string(e.what()).find("reached only 3 of 4"), std::string::npos) << e.what();
  }
}

TEST(RandomWalkTest, InvalidArguments) {
  Graph g = cycle_with_chords(10);
  EXPECT_THROW(random_walk_sample(g, {.start = 10, .target_size = 1}), Error);
  EXPECT_THROW(random_walk_sample(g, {.start = 0, .target_size = 0}), Error);
  EXPECT_THROW(random_walk_sample(g, {.start = 0, .target_size = 11}), Error);
}

}  // namespace
}  // namespace gjoin
