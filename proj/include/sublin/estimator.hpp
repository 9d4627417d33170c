#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <unordered_set>
#include <vector>

#include "sublin/graph.hpp"
#include "sublin/matching.hpp"
#include "sublin/query.hpp"
#include "sublin/rng.hpp"

namespace sublin {

struct EstimatorOptions {
  /// Leading constant of the per-vertex sample count.
  double constant = 80.0;
  /// Degree bound for the random-neighbor simulator; 0 means the larger side.
  std::uint64_t max_degree_bound = 0;
  /// Approximate probes committed per chunk (memory only; output unchanged).
  std::uint64_t chunk_probes = std::uint64_t{1} << 22;
};

struct EstimateResult {
  std::size_t estimate = 0;
  std::uint64_t charged_queries = 0;
  /// Distinct edges among the retained random-neighbor answers.
  std::size_t sampled_edge_count = 0;
  /// Samples per vertex; below 1 it is the per-vertex Bernoulli rate.
  double per_vertex_rate = 0.0;
};

/// constant * n^(1 - 2 delta) * ln n.
inline double per_vertex_sample_rate(std::uint64_t n, double delta, double constant = 80.0) {
  if (n < 2) return 0.0;
  const double nd = static_cast<double>(n);
  return constant * std::pow(nd, 1.0 - 2.0 * delta) * std::log(nd);
}

/**
 * Non-adaptive n^delta-approximation of the maximum matching size.
 *
 * Every vertex asks for ceil(q) random neighbors, q = 80 n^(1-2 delta) ln n,
 * or for one random neighbor with probability q when q < 1. The random
 * neighbors are simulated by degree guessing. The output is the size of a
 * greedy maximal matching over the retained edges in plan order, so
 * estimate <= mu always holds.
 *
 * The plan is drawn vertex by vertex from `rng`, which never sees an answer.
 * It is committed and answered in consecutive vertex chunks only to bound
 * memory; the concatenated chunks are exactly the one-shot plan.
 */
inline EstimateResult estimate_matching_size(const BipartiteMultigraph& g, std::uint64_t n,
                                             double delta, Rng& rng,
                                             const EstimatorOptions& options = {}) {
  if (!(delta > 0.0 && delta < 1.0))
    throw std::invalid_argument("delta must lie in (0, 1)");
  EstimateResult result;
  result.per_vertex_rate = per_vertex_sample_rate(n, delta, options.constant);
  if (g.vertex_count() == 0) return result;

  SampleSpec spec;
  std::uint64_t samples_per_vertex = 1;
  if (result.per_vertex_rate >= 1.0) {
    samples_per_vertex = static_cast<std::uint64_t>(std::ceil(result.per_vertex_rate));
    spec = SamplesPerVertex{samples_per_vertex};
  } else {
    spec = BernoulliSample{result.per_vertex_rate};
  }
  const std::uint64_t bound = options.max_degree_bound != 0
                                  ? options.max_degree_bound
                                  : std::max<std::uint64_t>(
                                        1, std::max(g.left_count(), g.right_count()));
  const std::uint64_t per_vertex = samples_per_vertex * guess_level_count(bound);
  const std::size_t chunk = static_cast<std::size_t>(
      std::max<std::uint64_t>(1, options.chunk_probes / per_vertex));

  std::vector<Edge> stream;
  std::unordered_set<std::uint64_t> seen;
  std::vector<VertexId> block;
  for (std::size_t first = 0; first < g.vertex_count(); first += chunk) {
    const std::size_t last = std::min<std::size_t>(g.vertex_count(), first + chunk);
    block.resize(last - first);
    std::iota(block.begin(), block.end(), static_cast<VertexId>(first));
    const RandomNeighborPlan rn = build_random_neighbor_plan(block, spec, bound, rng);
    result.charged_queries += rn.plan.charged_queries();
    const QueryAnswerSet answers = answer_plan(g, rn.plan);
    for (const SampledNeighbor& s : extract_random_neighbor_answers(rn, answers)) {
      const Edge e = g.is_left(s.vertex) ? Edge{s.vertex, s.neighbor} : Edge{s.neighbor, s.vertex};
      if (seen.insert((static_cast<std::uint64_t>(e.left) << 32) | e.right).second)
        stream.push_back(e);
    }
  }
  result.sampled_edge_count = stream.size();
  result.estimate = greedy_maximal_matching(stream).size();
  return result;
}

/// Minimum vertex cover estimate. On bipartite inputs the cover and matching
/// sizes coincide, so this is the same computation.
inline EstimateResult estimate_vertex_cover_size(const BipartiteMultigraph& g, std::uint64_t n,
                                                 double delta, Rng& rng,
                                                 const EstimatorOptions& options = {}) {
  return estimate_matching_size(g, n, delta, rng, options);
}

}  // namespace sublin
