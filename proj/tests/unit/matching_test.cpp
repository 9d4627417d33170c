#include <random>

#include <gtest/gtest.h>

#include "../oracles.hpp"
#include "sublin/matching.hpp"

using namespace sublin;

namespace {

BipartiteMultigraph from(std::size_t l, std::size_t r, std::vector<Edge> e) {
  return BipartiteMultigraph::from_edges(l, r, e);
}

}  // namespace

TEST(Matching, PathOfThreeHasSizeOne) {
  // L1 - R1 - L2.
  const auto g = from(2, 1, {{0, 2}, {1, 2}});
  EXPECT_EQ(maximum_matching(g).size(), 1u);
  EXPECT_EQ(min_vertex_cover_size(g), 1u);
}

TEST(Matching, ParallelEdgesDoNotHelp) {
  const auto g = from(1, 1, {{0, 1}, {0, 1}, {0, 1}});
  EXPECT_EQ(maximum_matching(g).size(), 1u);
}

TEST(Matching, EmptyGraph) {
  const auto g = from(3, 2, {});
  EXPECT_EQ(maximum_matching(g).size(), 0u);
  EXPECT_TRUE(minimum_vertex_cover(g).empty());
}

TEST(Matching, NeedsAugmentingPath) {
  // Greedy on left order picks 0-3 and blocks 1; the maximum is 2.
  const auto g = from(2, 2, {{0, 2}, {0, 3}, {1, 2}});
  const auto m = maximum_matching(g);
  EXPECT_EQ(m.size(), 2u);
  EXPECT_TRUE(is_matching(m.edges));
}

TEST(Matching, GreedyKeepsStreamOrderAndSkipsConflicts) {
  const std::vector<Edge> stream{{0, 3}, {1, 3}, {1, 4}, {0, 4}, {2, 2}};
  const auto m = greedy_maximal_matching(stream);
  ASSERT_EQ(m.size(), 2u);
  EXPECT_EQ(m.edges[0], (Edge{0, 3}));
  EXPECT_EQ(m.edges[1], (Edge{1, 4}));
}

TEST(Matching, IsMatchingDetectsSharedEndpoint) {
  const std::vector<Edge> ok{{0, 2}, {1, 3}};
  const std::vector<Edge> bad{{0, 2}, {1, 2}};
  EXPECT_TRUE(is_matching(ok));
  EXPECT_FALSE(is_matching(bad));
}

TEST(Matching, AgreesWithBruteForceOnRandomSmallGraphs) {
  std::mt19937_64 rng(11);
  for (int t = 0; t < 400; ++t) {
    const std::size_t l = rng() % 7, r = rng() % 7, m = rng() % 16;
    const auto g = oracle::random_bipartite(l, r, m, rng);
    const auto mm = maximum_matching(g);
    ASSERT_TRUE(is_matching(mm.edges));
    ASSERT_EQ(mm.size(), oracle::brute_force_matching(g)) << "trial " << t;
  }
}

TEST(Matching, KoenigCoverIsMinimumAndValid) {
  std::mt19937_64 rng(12);
  for (int t = 0; t < 300; ++t) {
    const std::size_t l = rng() % 7, r = rng() % 7, m = rng() % 18;
    const auto g = oracle::random_bipartite(l, r, m, rng);
    const auto cover = minimum_vertex_cover(g);
    ASSERT_TRUE(is_vertex_cover(g, cover));
    ASSERT_EQ(cover.size(), maximum_matching(g).size());
    ASSERT_EQ(cover.size(), oracle::brute_force_vertex_cover(g)) << "trial " << t;
  }
}

TEST(Matching, GreedyIsAtLeastHalfOfMaximum) {
  std::mt19937_64 rng(13);
  for (int t = 0; t < 300; ++t) {
    const auto g = oracle::random_bipartite(1 + rng() % 20, 1 + rng() % 20, rng() % 60, rng);
    const auto edges = g.edges();
    const auto greedy = greedy_maximal_matching(edges);
    ASSERT_TRUE(is_matching(greedy.edges));
    ASSERT_GE(2 * greedy.size(), maximum_matching(g).size());
  }
}

TEST(Matching, LongAugmentingChain) {
  // Path L0-R0-L1-R1-...; the left-order greedy warm start leaves one
  // augmenting path through the whole chain.
  const std::size_t k = 2000;
  std::vector<Edge> e;
  for (VertexId i = 0; i < k; ++i) {
    if (i + 1 < k) e.push_back({i, static_cast<VertexId>(k + i)});
    if (i > 0) e.push_back({i, static_cast<VertexId>(k + i - 1)});
  }
  e.push_back({0, static_cast<VertexId>(2 * k - 1)});
  const auto g = from(k, k, e);
  EXPECT_EQ(maximum_matching(g).size(), k);
}
