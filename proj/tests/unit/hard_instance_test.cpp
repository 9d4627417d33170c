#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include <gtest/gtest.h>

#include "sublin/hard_instance.hpp"
#include "sublin/matching.hpp"

using namespace sublin;

namespace {

InstanceParams params(std::uint64_t n, double delta, std::uint64_t seed = 1) {
  InstanceParams p;
  p.n = n;
  p.delta = delta;
  p.seed = seed;
  return p;
}

std::size_t count_class(const LabeledInstance& inst, VertexClass c, bool left) {
  std::size_t k = 0;
  const std::size_t side = inst.shape.side_size;
  for (std::size_t v = left ? 0 : side; v < (left ? side : 2 * side); ++v) k += inst.class_of[v] == c;
  return k;
}

}  // namespace

TEST(HardInstance, ResolveSquareRootShape) {
  const auto s = resolve(params(64, 0.5));
  EXPECT_EQ(s.group_count, 8u);
  EXPECT_EQ(s.group_size, 8u);
  EXPECT_EQ(s.core_degree, 4u);
  EXPECT_EQ(s.side_size, 80u);
  EXPECT_TRUE(s.saturated);
  EXPECT_EQ(s.a_dummy_edges, 0u);
  EXPECT_EQ(s.b_dummy_edges, 3u);
  EXPECT_EQ(s.a_degree(), 8u);
}

TEST(HardInstance, ResolveCubeRootShapeIsNotSaturated) {
  const auto s = resolve(params(4096, 1.0 / 3.0));
  EXPECT_EQ(s.group_count, 16u);
  EXPECT_EQ(s.group_size, 256u);
  EXPECT_EQ(s.core_degree, 128u);
  EXPECT_FALSE(s.saturated);
  EXPECT_EQ(s.a_degree(), s.core_degree);
}

TEST(HardInstance, ResolveNonIntegralPowerUsesNearestDivisor) {
  // 16384^0.1 = 2.64...; 3 does not divide, 2 does.
  const auto s = resolve(params(16384, 0.1));
  EXPECT_EQ(s.group_count, 2u);
  EXPECT_EQ(s.group_size, 8192u);
  EXPECT_EQ(s.core_degree, 4096u);
}

TEST(HardInstance, ResolveRejectsBadInputs) {
  EXPECT_THROW(resolve(params(64, 0.0)), InvalidParams);
  EXPECT_THROW(resolve(params(64, 1.0)), InvalidParams);
  auto neg = params(64, 0.5);
  neg.epsilon = -1;
  EXPECT_THROW(resolve(neg), InvalidParams);
  try {
    resolve(params(63, 0.5));
    FAIL() << "expected InvalidParams";
  } catch (const InvalidParams& e) {
    EXPECT_NE(std::string(e.what()).find("nearest valid n is 64"), std::string::npos) << e.what();
  }
}

TEST(HardInstance, ConstraintFlag) {
  EXPECT_FALSE(resolve(params(1024, 0.5)).constraint_plausible);
  InstanceParams p = params(1u << 20, 0.05);
  EXPECT_TRUE(resolve(p).constraint_plausible);
}

class WorldTest : public ::testing::TestWithParam<std::tuple<std::uint64_t, double, WorldChoice>> {};

TEST_P(WorldTest, StructureMatchesConstruction) {
  const auto [n, delta, world] = GetParam();
  for (std::uint64_t seed = 1; seed <= 3; ++seed) {
    const auto inst = generate(params(n, delta, seed), world);
    const auto& s = inst.shape;
    const auto& g = *inst.graph;
    ASSERT_NO_THROW(g.validate());
    ASSERT_EQ(g.left_count(), s.side_size);
    for (bool left : {true, false}) {
      EXPECT_EQ(count_class(inst, VertexClass::A, left), s.group_size);
      EXPECT_EQ(count_class(inst, VertexClass::B, left), s.n);
      EXPECT_EQ(count_class(inst, VertexClass::D, left), s.group_size);
    }
    std::uint64_t d_total = 0;
    for (VertexId v = 0; v < g.vertex_count(); ++v) {
      const auto c = inst.class_at(v);
      if (c == VertexClass::B) { ASSERT_EQ(g.degree(v), s.core_degree); }
      if (c == VertexClass::A) { ASSERT_EQ(g.degree(v), s.a_degree()); }
      if (c == VertexClass::D) d_total += g.degree(v);
      // Neighbors are on the other side; a core vertex never repeats a D neighbor.
      std::set<VertexId> dummies;
      std::size_t core_nbrs = 0;
      for (VertexId w : g.neighbors(v)) {
        ASSERT_NE(g.is_left(v), g.is_left(w));
        if (inst.class_at(w) == VertexClass::D) {
          ASSERT_NE(c, VertexClass::D) << "D-D edge";
          if (c != VertexClass::D) { ASSERT_TRUE(dummies.insert(w).second); }
        } else {
          ++core_nbrs;
        }
      }
      if (c == VertexClass::A) { ASSERT_EQ(core_nbrs, s.group_count); }
      if (c == VertexClass::B) { ASSERT_EQ(core_nbrs, 1u); }
    }
    EXPECT_EQ(d_total, 2 * (s.group_size * s.a_dummy_edges + s.n * s.b_dummy_edges));

    const auto census = core_edge_census(inst);
    if (inst.world == World::yes) {
      EXPECT_EQ(census.a_a, s.n);
      EXPECT_EQ(census.b_b, s.n);
      EXPECT_EQ(census.a_b, 0u);
    } else {
      EXPECT_EQ(census.a_a, 0u);
      EXPECT_EQ(census.b_b, 0u);
      EXPECT_EQ(census.a_b, 2 * s.n);
    }
    const auto mu = maximum_matching(g).size();
    if (inst.world == World::yes)
      EXPECT_GE(mu, s.n);
    else
      EXPECT_LE(mu, 4 * s.group_size);
  }
}

INSTANTIATE_TEST_SUITE_P(
    Shapes, WorldTest,
    ::testing::Values(std::tuple{std::uint64_t{64}, 0.5, WorldChoice::yes},
                      std::tuple{std::uint64_t{64}, 0.5, WorldChoice::no},
                      std::tuple{std::uint64_t{4096}, 1.0 / 3.0, WorldChoice::yes},
                      std::tuple{std::uint64_t{4096}, 1.0 / 3.0, WorldChoice::no},
                      std::tuple{std::uint64_t{1024}, 0.2, WorldChoice::mixed}));

TEST(HardInstance, HiddenLayoutOfYesWorld) {
  const auto inst = generate(params(64, 0.5, 5), WorldChoice::yes);
  const auto h = hidden_graph(inst);
  const HiddenLayout layout{8, 64, 80};
  for (std::uint64_t i = 0; i < 64; ++i) {
    const auto nb = h.neighbors(layout.b(false, i));
    EXPECT_NE(std::find(nb.begin(), nb.end(), layout.b(true, i)), nb.end());
  }
}

TEST(HardInstance, HiddenLayoutOfNoWorld) {
  const auto inst = generate(params(64, 0.5, 6), WorldChoice::no);
  const auto h = hidden_graph(inst);
  const HiddenLayout layout{8, 64, 80};
  // b^R_{i,j} - a^L_j for every group i.
  for (std::uint64_t i = 0; i < 8; ++i)
    for (std::uint64_t j = 0; j < 8; ++j) {
      const auto nb = h.neighbors(layout.b(true, i, j));
      EXPECT_NE(std::find(nb.begin(), nb.end(), layout.a(false, j)), nb.end());
    }
  // Each left group hits every right A vertex exactly once.
  for (std::uint64_t i = 0; i < 8; ++i) {
    std::set<VertexId> hit;
    for (std::uint64_t j = 0; j < 8; ++j)
      for (VertexId w : h.neighbors(layout.b(false, i, j)))
        if (layout.class_of_local(w - 80) == VertexClass::A) hit.insert(w);
    EXPECT_EQ(hit.size(), 8u);
  }
}

TEST(HardInstance, LabelingKeepsSides) {
  const auto inst = generate(params(64, 0.5, 2), WorldChoice::mixed);
  for (VertexId h = 0; h < 160; ++h) EXPECT_EQ(h < 80, inst.labeling.to_public[h] < 80);
  for (VertexId p = 0; p < 160; ++p) EXPECT_EQ(inst.labeling.to_public[inst.labeling.to_hidden[p]], p);
}

TEST(HardInstance, DeterministicPerSeedAndTrial) {
  const auto a = generate(params(1024, 0.5, 9), WorldChoice::mixed, 3);
  const auto b = generate(params(1024, 0.5, 9), WorldChoice::mixed, 3);
  const auto c = generate(params(1024, 0.5, 9), WorldChoice::mixed, 4);
  EXPECT_EQ(*a.graph, *b.graph);
  EXPECT_EQ(a.world, b.world);
  EXPECT_FALSE(*a.graph == *c.graph);
}

TEST(HardInstance, MixedWorldDrawsBoth) {
  int yes = 0;
  for (std::uint64_t t = 0; t < 40; ++t)
    yes += generate(params(64, 0.5, 1), WorldChoice::mixed, t).world == World::yes;
  EXPECT_GT(yes, 5);
  EXPECT_LT(yes, 35);
}

TEST(HardInstance, GroundTruthRoundTrip) {
  const auto p = params(64, 0.5, 4);
  const auto inst = generate(p, WorldChoice::no);
  std::stringstream ss;
  write_ground_truth(ss, inst, p);
  const auto truth = read_ground_truth(ss);
  EXPECT_EQ(truth.world, World::no);
  EXPECT_EQ(truth.params.n, 64u);
  const auto back = attach_ground_truth(inst.graph, truth);
  EXPECT_EQ(back.class_of, inst.class_of);
  EXPECT_EQ(back.labeling.to_public, inst.labeling.to_public);
  EXPECT_EQ(back.shape.core_degree, inst.shape.core_degree);
}
