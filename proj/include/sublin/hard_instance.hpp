#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <istream>
#include <memory>
#include <numeric>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "sublin/graph.hpp"
#include "sublin/rng.hpp"

namespace sublin {

enum class VertexClass : std::uint8_t { A, B, D };
enum class World : std::uint8_t { yes, no };
enum class WorldChoice : std::uint8_t { yes, no, mixed };

inline const char* to_string(World w) { return w == World::yes ? "yes" : "no"; }
inline const char* to_string(VertexClass c) {
  switch (c) {
    case VertexClass::A: return "A";
    case VertexClass::B: return "B";
    default: return "D";
  }
}

class InvalidParams : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// User-facing scale parameters of the yes/no instance family.
struct InstanceParams {
  std::uint64_t n = 0;
  double delta = 0.5;
  double epsilon = 0.0;
  std::uint64_t seed = 0;
};

/// Integer sizes derived from InstanceParams.
///
/// The core is split into g = group_count groups of k = group_size vertices
/// per side (g * k == n). Every B vertex has degree d* = k / 2. An A vertex
/// has g core neighbors plus max(d* - g, 0) dummy neighbors; when d* < g the
/// instance is `saturated` and A vertices have degree g instead of d*.
struct InstanceShape {
  std::uint64_t n = 0;
  double delta = 0.0;
  double epsilon = 0.0;
  std::uint64_t group_count = 0;  // g ~ n^delta
  std::uint64_t group_size = 0;   // k ~ n^(1-delta), also |A^L| = |D^L|
  std::uint64_t core_degree = 0;  // d* = k / 2
  std::uint64_t side_size = 0;    // n' = n + 2k
  std::uint64_t a_dummy_edges = 0;
  std::uint64_t b_dummy_edges = 0;
  bool saturated = false;
  /// Informational: n^(2 eps + 3 delta) ln^3 n < n.
  bool constraint_plausible = false;

  std::uint64_t a_degree() const { return group_count + a_dummy_edges; }
  std::uint64_t vertex_count() const { return 2 * side_size; }
  /// Degree values a core vertex can have. Dummy degrees are Theta(n).
  bool is_core_degree(std::uint64_t deg) const {
    return deg == core_degree || deg == a_degree();
  }
};

namespace detail {

inline std::optional<InstanceShape> try_shape(std::uint64_t n, double delta, double epsilon) {
  if (n < 2 || !(delta > 0.0 && delta < 1.0) || !(epsilon >= 0.0)) return std::nullopt;
  const double target = std::pow(static_cast<double>(n), delta);
  const double nearest = std::round(target);
  std::vector<std::uint64_t> candidates;
  if (std::abs(target - nearest) <= 1e-9 * std::max(1.0, target)) {
    candidates.push_back(static_cast<std::uint64_t>(nearest));
  } else {
    const auto lo = static_cast<std::uint64_t>(std::floor(target));
    const auto hi = lo + 1;
    if (target - static_cast<double>(lo) <= static_cast<double>(hi) - target) {
      candidates = {lo, hi};
    } else {
      candidates = {hi, lo};
    }
  }
  for (std::uint64_t g : candidates) {
    if (g == 0 || n % g != 0) continue;
    const std::uint64_t k = n / g;
    if (k < 2 || k % 2 != 0) continue;
    InstanceShape s;
    s.n = n;
    s.delta = delta;
    s.epsilon = epsilon;
    s.group_count = g;
    s.group_size = k;
    s.core_degree = k / 2;
    s.side_size = n + 2 * k;
    s.saturated = s.core_degree < g;
    s.a_dummy_edges = s.saturated ? 0 : s.core_degree - g;
    s.b_dummy_edges = s.core_degree - 1;
    const double nd = static_cast<double>(n);
    const double ln = std::log(nd);
    s.constraint_plausible = std::pow(nd, 2 * epsilon + 3 * delta) * ln * ln * ln < nd;
    return s;
  }
  return std::nullopt;
}

}  // namespace detail

/// Closest n (ties toward the smaller) for which `delta` yields integral
/// group sizes, or nullopt if none exists below 2n.
inline std::optional<std::uint64_t> nearest_valid_n(std::uint64_t n, double delta) {
  for (std::uint64_t d = 0; d <= n; ++d) {
    if (n > d && detail::try_shape(n - d, delta, 0.0)) return n - d;
    if (detail::try_shape(n + d, delta, 0.0)) return n + d;
  }
  return std::nullopt;
}

/// Resolves the integer construction sizes. n^delta must have an integer
/// neighbor g (floor or ceiling, nearest first) dividing n with n / g even.
inline InstanceShape resolve(const InstanceParams& params) {
  if (!(params.delta > 0.0 && params.delta < 1.0))
    throw InvalidParams("delta must lie in (0, 1), got " + std::to_string(params.delta));
  if (!(params.epsilon >= 0.0))
    throw InvalidParams("epsilon must be >= 0, got " + std::to_string(params.epsilon));
  if (auto s = detail::try_shape(params.n, params.delta, params.epsilon)) return *s;
  std::ostringstream msg;
  msg << "n = " << params.n << " does not split into integral groups for delta = "
      << params.delta;
  if (auto near = nearest_valid_n(params.n, params.delta)) msg << "; nearest valid n is " << *near;
  throw InvalidParams(msg.str());
}

/// Hidden-id to public-label permutation, applied per side.
struct Labeling {
  std::vector<VertexId> to_public;
  std::vector<VertexId> to_hidden;
};

/// A generated instance together with its ground truth.
///
/// `graph` is already expressed in public labels; `class_of` is indexed by
/// public label and must never reach a query client.
struct LabeledInstance {
  InstanceShape shape;
  World world = World::yes;
  std::shared_ptr<const BipartiteMultigraph> graph;
  std::vector<VertexClass> class_of;
  Labeling labeling;

  VertexClass class_at(VertexId v) const { return class_of[v]; }
  bool is_core(VertexId v) const { return class_of[v] != VertexClass::D; }
};

/// What a query client may see: the graph under public labels and the side
/// split (given away for free). Class labels are absent.
struct PublicView {
  std::shared_ptr<const BipartiteMultigraph> graph;
  std::size_t left_count = 0;
  std::size_t right_count = 0;
};

inline PublicView public_view(const LabeledInstance& inst) {
  return {inst.graph, inst.graph->left_count(), inst.graph->right_count()};
}

// Hidden id layout per side (local index): A in [0, k), B in [k, k + n),
// D in [k + n, n'). Right-side hidden ids are offset by n'. B vertex
// b_{i,j} (group i, slot j) has local index k + i * k + j.
struct HiddenLayout {
  std::uint64_t k, n, side;
  VertexId a(bool right, std::uint64_t j) const { return id(right, j); }
  VertexId b(bool right, std::uint64_t i) const { return id(right, k + i); }
  VertexId b(bool right, std::uint64_t group, std::uint64_t j) const {
    return id(right, k + group * k + j);
  }
  VertexId d(bool right, std::uint64_t j) const { return id(right, k + n + j); }
  VertexClass class_of_local(std::uint64_t local) const {
    return local < k ? VertexClass::A : local < k + n ? VertexClass::B : VertexClass::D;
  }
  VertexId id(bool right, std::uint64_t local) const {
    return static_cast<VertexId>((right ? side : 0) + local);
  }
};

/**
 * Draws one instance from the yes or no distribution (or a fair seeded coin
 * between them for WorldChoice::mixed).
 *
 * Common to both worlds: every A vertex gets max(d* - g, 0) edges and every
 * B vertex gets d* - 1 edges to distinct uniformly chosen dummy vertices on
 * the opposite side, independently per core vertex.
 * Yes world: identity matching b^L_i - b^R_i, plus g independent uniform
 * perfect matchings between A^L and A^R (parallel edges are kept).
 * No world: for each group i a uniform perfect matching between B^L_i and
 * A^R, and the identity b^R_{i,j} - a^L_j.
 * Then every side is relabeled by a uniform permutation and every adjacency
 * list is uniformly shuffled.
 *
 * The RNG stream is derived from (params.seed, trial).
 */
inline LabeledInstance generate(const InstanceParams& params, WorldChoice choice,
                                std::uint64_t trial = 0) {
  const InstanceShape shape = resolve(params);
  Rng rng = make_rng(params.seed, trial, Stream::instance);

  LabeledInstance inst;
  inst.shape = shape;
  if (choice == WorldChoice::mixed)
    inst.world = bernoulli(rng, 0.5) ? World::yes : World::no;
  else
    inst.world = choice == WorldChoice::yes ? World::yes : World::no;

  const std::uint64_t k = shape.group_size, n = shape.n, g = shape.group_count;
  const std::uint64_t side = shape.side_size;
  const std::uint64_t total_vertices = 2 * side;
  const HiddenLayout layout{k, n, side};

  // Labeling.
  inst.labeling.to_public.resize(total_vertices);
  inst.labeling.to_hidden.resize(total_vertices);
  for (int s = 0; s < 2; ++s) {
    std::vector<VertexId> perm(side);
    std::iota(perm.begin(), perm.end(), VertexId{0});
    std::shuffle(perm.begin(), perm.end(), rng);
    const std::uint64_t base = s * side;
    for (std::uint64_t local = 0; local < side; ++local) {
      inst.labeling.to_public[base + local] = static_cast<VertexId>(base + perm[local]);
      inst.labeling.to_hidden[base + perm[local]] = static_cast<VertexId>(base + local);
    }
  }
  const auto& pub = inst.labeling.to_public;
  inst.class_of.resize(total_vertices);
  for (std::uint64_t h = 0; h < total_vertices; ++h)
    inst.class_of[pub[h]] = layout.class_of_local(h % side);

  // Core edges in hidden ids, as (left, right).
  std::vector<Edge> core;
  core.reserve(2 * n);
  std::vector<VertexId> perm(k);
  auto random_perm = [&] {
    std::iota(perm.begin(), perm.end(), VertexId{0});
    std::shuffle(perm.begin(), perm.end(), rng);
  };
  if (inst.world == World::yes) {
    for (std::uint64_t i = 0; i < n; ++i) core.push_back({layout.b(false, i), layout.b(true, i)});
    for (std::uint64_t m = 0; m < g; ++m) {
      random_perm();
      for (std::uint64_t j = 0; j < k; ++j) core.push_back({layout.a(false, j), layout.a(true, perm[j])});
    }
  } else {
    for (std::uint64_t i = 0; i < g; ++i) {
      random_perm();
      for (std::uint64_t j = 0; j < k; ++j)
        core.push_back({layout.b(false, i, j), layout.a(true, perm[j])});
    }
    for (std::uint64_t i = 0; i < g; ++i)
      for (std::uint64_t j = 0; j < k; ++j) core.push_back({layout.a(false, j), layout.b(true, i, j)});
  }

  // Core neighbor lists (hidden ids), CSR over core vertices in hidden order.
  const std::uint64_t core_per_side = k + n;
  auto core_index = [&](VertexId h) -> std::uint64_t {
    return h < side ? h : core_per_side + (h - side);
  };
  std::vector<std::uint64_t> core_start(2 * core_per_side + 1, 0);
  for (const Edge& e : core) {
    ++core_start[core_index(e.left) + 1];
    ++core_start[core_index(e.right) + 1];
  }
  std::partial_sum(core_start.begin(), core_start.end(), core_start.begin());
  std::vector<VertexId> core_nbr(core_start.back());
  {
    std::vector<std::uint64_t> fill(core_start.begin(), core_start.end() - 1);
    for (const Edge& e : core) {
      core_nbr[fill[core_index(e.left)]++] = e.right;
      core_nbr[fill[core_index(e.right)]++] = e.left;
    }
  }
  core.clear();
  core.shrink_to_fit();

  // Entry blocks: core vertices first (hidden order), then dummy vertices.
  std::uint64_t total_entries = core_nbr.size();
  const std::uint64_t dummy_per_side = k * shape.a_dummy_edges + n * shape.b_dummy_edges;
  total_entries += 4 * dummy_per_side;  // each dummy edge appears in two blocks
  std::vector<VertexId> entries(total_entries);
  std::vector<std::uint64_t> start(total_vertices, 0);
  std::vector<std::uint32_t> degree(total_vertices, 0);

  // Core blocks come out uniformly ordered: the dummy picks are an ordered
  // uniform sample, and the core entries go to uniform distinct slots.
  std::vector<VertexId> pool(k);
  std::vector<char> taken;
  std::vector<VertexId> picked;
  std::uint64_t cursor = 0;
  for (int s = 0; s < 2; ++s) {
    const bool right = s == 1;
    // Public ids of the opposite side's dummies.
    for (std::uint64_t j = 0; j < k; ++j) pool[j] = pub[layout.d(!right, j)];
    for (std::uint64_t local = 0; local < core_per_side; ++local) {
      const VertexId h = layout.id(right, local);
      const VertexId p = pub[h];
      const std::uint64_t ci = core_index(h);
      const std::uint64_t core_count = core_start[ci + 1] - core_start[ci];
      const std::uint64_t picks = local < k ? shape.a_dummy_edges : shape.b_dummy_edges;
      const std::uint64_t d = core_count + picks;
      start[p] = cursor;
      degree[p] = static_cast<std::uint32_t>(d);
      // Partial Fisher-Yates: the first `picks` slots become a uniform sample
      // without replacement, whatever the pool's current arrangement.
      picked.clear();
      for (std::uint64_t t = 0; t < picks; ++t) {
        const auto r = uniform_int(rng, t, k - 1);
        std::swap(pool[t], pool[r]);
        const VertexId dp = pool[t];
        picked.push_back(dp);
        ++degree[dp];
      }
      VertexId* block = entries.data() + cursor;
      if (2 * core_count <= d) {
        taken.assign(d, 0);
        for (std::uint64_t i = core_start[ci]; i < core_start[ci + 1]; ++i) {
          std::uint64_t slot;
          do slot = uniform_int(rng, 0, d - 1);
          while (taken[slot]);
          taken[slot] = 1;
          block[slot] = pub[core_nbr[i]];
        }
        std::uint64_t next = 0;
        for (std::uint64_t slot = 0; slot < d; ++slot)
          if (!taken[slot]) block[slot] = picked[next++];
      } else {
        for (std::uint64_t i = core_start[ci]; i < core_start[ci + 1]; ++i) *block++ = pub[core_nbr[i]];
        std::copy(picked.begin(), picked.end(), block);
        std::shuffle(entries.begin() + static_cast<std::ptrdiff_t>(cursor),
                     entries.begin() + static_cast<std::ptrdiff_t>(cursor + d), rng);
      }
      cursor += d;
    }
  }
  core_nbr.clear();
  core_nbr.shrink_to_fit();

  // Dummy blocks, filled by scanning the dummy tail of each core block.
  for (int s = 0; s < 2; ++s)
    for (std::uint64_t j = 0; j < k; ++j) {
      const VertexId p = pub[layout.d(s == 1, j)];
      start[p] = cursor;
      cursor += degree[p];
    }
  {
    std::vector<char> is_dummy(total_vertices, 0);
    for (int s = 0; s < 2; ++s)
      for (std::uint64_t j = 0; j < k; ++j) is_dummy[pub[layout.d(s == 1, j)]] = 1;
    std::vector<std::uint32_t> fill(total_vertices, 0);
    for (int s = 0; s < 2; ++s)
      for (std::uint64_t local = 0; local < core_per_side; ++local) {
        const VertexId p = pub[layout.id(s == 1, local)];
        for (std::uint64_t i = start[p]; i < start[p] + degree[p]; ++i) {
          const VertexId dp = entries[i];
          if (is_dummy[dp]) entries[start[dp] + fill[dp]++] = p;
        }
      }
    // Dummy blocks were filled in scan order.
    for (VertexId p = 0; p < total_vertices; ++p)
      if (is_dummy[p])
        std::shuffle(entries.begin() + static_cast<std::ptrdiff_t>(start[p]),
                     entries.begin() + static_cast<std::ptrdiff_t>(start[p] + degree[p]), rng);
  }

  inst.graph = std::make_shared<const BipartiteMultigraph>(
      side, side, std::move(start), std::move(degree), std::move(entries));
  return inst;
}

/// The instance graph expressed in hidden ids (inverse labeling applied).
inline BipartiteMultigraph hidden_graph(const LabeledInstance& inst) {
  const auto& g = *inst.graph;
  std::vector<std::vector<VertexId>> lists(g.vertex_count());
  for (VertexId p = 0; p < g.vertex_count(); ++p) {
    auto& list = lists[inst.labeling.to_hidden[p]];
    for (VertexId w : g.neighbors(p)) list.push_back(inst.labeling.to_hidden[w]);
  }
  return BipartiteMultigraph::from_adjacency(g.left_count(), g.right_count(), lists);
}

struct CoreEdgeCensus {
  std::uint64_t a_a = 0;
  std::uint64_t b_b = 0;
  std::uint64_t a_b = 0;
  std::uint64_t total() const { return a_a + b_b + a_b; }
};

/// Counts core edges by class pair, with multiplicity. Ground-truth only.
inline CoreEdgeCensus core_edge_census(const LabeledInstance& inst) {
  CoreEdgeCensus c;
  const auto& g = *inst.graph;
  for (VertexId u = 0; u < g.left_count(); ++u) {
    const VertexClass cu = inst.class_of[u];
    if (cu == VertexClass::D) continue;
    for (VertexId w : g.neighbors(u)) {
      const VertexClass cw = inst.class_of[w];
      if (cw == VertexClass::D) continue;
      if (cu == VertexClass::A && cw == VertexClass::A)
        ++c.a_a;
      else if (cu == VertexClass::B && cw == VertexClass::B)
        ++c.b_b;
      else
        ++c.a_b;
    }
  }
  return c;
}

// Ground-truth sidecar (JSON). Holds everything hidden from query clients.

inline void write_ground_truth(std::ostream& out, const LabeledInstance& inst,
                               const InstanceParams& params) {
  nlohmann::json j;
  j["world"] = to_string(inst.world);
  j["n"] = params.n;
  j["delta"] = params.delta;
  j["epsilon"] = params.epsilon;
  j["seed"] = params.seed;
  j["group_count"] = inst.shape.group_count;
  j["group_size"] = inst.shape.group_size;
  j["core_degree"] = inst.shape.core_degree;
  j["side_size"] = inst.shape.side_size;
  j["saturated"] = inst.shape.saturated;
  std::string classes;
  classes.reserve(inst.class_of.size());
  for (VertexClass c : inst.class_of) classes += to_string(c);
  j["class_by_public_label"] = classes;
  j["hidden_id_by_public_label"] = inst.labeling.to_hidden;
  out << j.dump() << '\n';
}

struct GroundTruth {
  World world = World::yes;
  InstanceParams params;
  std::vector<VertexClass> class_of;
  std::vector<VertexId> to_hidden;
};

inline GroundTruth read_ground_truth(std::istream& in) {
  const auto j = nlohmann::json::parse(in);
  GroundTruth t;
  t.world = j.at("world").get<std::string>() == "yes" ? World::yes : World::no;
  t.params.n = j.at("n").get<std::uint64_t>();
  t.params.delta = j.at("delta").get<double>();
  t.params.epsilon = j.at("epsilon").get<double>();
  t.params.seed = j.at("seed").get<std::uint64_t>();
  for (char c : j.at("class_by_public_label").get<std::string>())
    t.class_of.push_back(c == 'A' ? VertexClass::A : c == 'B' ? VertexClass::B : VertexClass::D);
  t.to_hidden = j.at("hidden_id_by_public_label").get<std::vector<VertexId>>();
  return t;
}

/// Reassembles a LabeledInstance from a public graph and its sidecar.
inline LabeledInstance attach_ground_truth(std::shared_ptr<const BipartiteMultigraph> graph,
                                           const GroundTruth& truth) {
  LabeledInstance inst;
  inst.shape = resolve(truth.params);
  inst.world = truth.world;
  if (graph->vertex_count() != truth.class_of.size() ||
      truth.to_hidden.size() != truth.class_of.size())
    throw InvalidParams("ground truth does not match graph size");
  inst.graph = std::move(graph);
  inst.class_of = truth.class_of;
  inst.labeling.to_hidden = truth.to_hidden;
  inst.labeling.to_public.resize(truth.to_hidden.size());
  for (VertexId p = 0; p < truth.to_hidden.size(); ++p)
    inst.labeling.to_public[truth.to_hidden[p]] = p;
  return inst;
}

}  // namespace sublin
