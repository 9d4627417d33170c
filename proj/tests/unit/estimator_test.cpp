#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "../oracles.hpp"
#include "sublin/estimator.hpp"
#include "sublin/hard_instance.hpp"

using namespace sublin;

TEST(Estimator, SampleRate) {
  EXPECT_DOUBLE_EQ(per_vertex_sample_rate(1024, 0.5), 80.0 * std::log(1024.0));
  EXPECT_NEAR(per_vertex_sample_rate(1024, 0.75), 80.0 * std::log(1024.0) / 32.0, 1e-9);
  EXPECT_EQ(per_vertex_sample_rate(1, 0.5), 0.0);
}

TEST(Estimator, RejectsDeltaOutOfRange) {
  const auto g = BipartiteMultigraph::from_edges(1, 1, std::vector<Edge>{{0, 1}});
  Rng rng(1);
  EXPECT_THROW(estimate_matching_size(g, 2, 0.0, rng), std::invalid_argument);
  EXPECT_THROW(estimate_matching_size(g, 2, 1.0, rng), std::invalid_argument);
}

TEST(Estimator, EmptyGraphs) {
  Rng rng(1);
  EXPECT_EQ(estimate_matching_size(BipartiteMultigraph{}, 10, 0.5, rng).estimate, 0u);
  const auto isolated = BipartiteMultigraph::from_edges(4, 4, {});
  EXPECT_EQ(estimate_matching_size(isolated, 4, 0.5, rng).estimate, 0u);
}

TEST(Estimator, NeverExceedsMaximumMatching) {
  std::mt19937_64 gen(21);
  for (int t = 0; t < 60; ++t) {
    const auto g = oracle::random_bipartite(1 + gen() % 30, 1 + gen() % 30, gen() % 90, gen);
    Rng rng(t);
    const auto r = estimate_matching_size(g, std::max<std::uint64_t>(2, g.left_count()), 0.75, rng);
    ASSERT_LE(r.estimate, maximum_matching(g).size());
  }
}

TEST(Estimator, ChargedQueriesFollowThePlanSize) {
  // 2n' vertices, ceil(q) samples each, one probe per guess level.
  InstanceParams p;
  p.n = 1024;
  p.delta = 0.5;
  p.seed = 3;
  const auto inst = generate(p, WorldChoice::yes);
  Rng rng(3);
  const auto r = estimate_matching_size(*inst.graph, p.n, p.delta, rng);
  const auto q = static_cast<std::uint64_t>(std::ceil(per_vertex_sample_rate(1024, 0.5)));
  EXPECT_EQ(r.charged_queries, inst.graph->vertex_count() * q * guess_level_count(inst.shape.side_size));
  EXPECT_GE(2 * r.estimate, maximum_matching(*inst.graph).size() / 32);
}

TEST(Estimator, ChunkingDoesNotChangeTheResult) {
  std::mt19937_64 gen(22);
  const auto g = oracle::random_bipartite(60, 60, 300, gen);
  EstimatorOptions small;
  small.chunk_probes = 1;
  EstimatorOptions big;
  big.chunk_probes = std::uint64_t{1} << 40;
  Rng a(5), b(5);
  const auto ra = estimate_matching_size(g, 60, 0.5, a, small);
  const auto rb = estimate_matching_size(g, 60, 0.5, b, big);
  EXPECT_EQ(ra.estimate, rb.estimate);
  EXPECT_EQ(ra.charged_queries, rb.charged_queries);
  EXPECT_EQ(ra.sampled_edge_count, rb.sampled_edge_count);
}

TEST(Estimator, BernoulliRegimeStillBounded) {
  // n^(1 - 2 delta) ln n < 1/80 for delta close to 1.
  std::mt19937_64 gen(23);
  const auto g = oracle::random_bipartite(200, 200, 800, gen);
  EstimatorOptions o;
  o.constant = 0.01;
  Rng rng(6);
  const auto r = estimate_matching_size(g, 200, 0.9, rng, o);
  EXPECT_LT(r.per_vertex_rate, 1.0);
  EXPECT_LE(r.estimate, maximum_matching(g).size());
  EXPECT_LE(r.charged_queries, g.vertex_count() * guess_level_count(200));
}

TEST(Estimator, VertexCoverAlias) {
  std::mt19937_64 gen(24);
  const auto g = oracle::random_bipartite(30, 30, 100, gen);
  Rng a(1), b(1);
  EXPECT_EQ(estimate_vertex_cover_size(g, 30, 0.5, a).estimate,
            estimate_matching_size(g, 30, 0.5, b).estimate);
}
