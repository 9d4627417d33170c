#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <mutex>
#include <optional>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <thread>
#include <unordered_map>
#include <utility>
#include <vector>

#include "sublin/distinguishers.hpp"
#include "sublin/graph.hpp"
#include "sublin/hard_instance.hpp"
#include "sublin/matching.hpp"
#include "sublin/query.hpp"
#include "sublin/rng.hpp"
#include "sublin/tree_probe.hpp"

namespace sublin {

// ---------------------------------------------------------------------------
// Structure of the observed core
// ---------------------------------------------------------------------------

struct Star {
  VertexId center = 0;
  std::vector<VertexId> petals;
};

struct HeavyLevel {
  std::uint64_t tau = 0;
  /// Observed core edges whose petal received at least tau probes.
  std::uint64_t edges = 0;
  /// 2^-i * 8 n^(2 eps + delta) ln^2 n.
  double bound = 0.0;
};

struct CoreStructureReport {
  std::uint64_t observed_core_edge_count = 0;
  std::uint64_t happy_vertex_count = 0;
  bool star_union_ok = true;
  /// Observed core edges whose petal is itself happy.
  std::uint64_t happy_endpoint_violations = 0;
  /// Pairs of distinct sources pointing at the same petal.
  std::uint64_t shared_petal_violations = 0;
  /// Repeat observations of an already observed (source, target) pair.
  std::uint64_t multi_edge_violations = 0;
  std::vector<HeavyLevel> heavy_census;
  std::uint64_t max_d_indegree = 0;
  /// Grouped by center in increasing id; petals in observation order.
  std::vector<Star> stars;
};

/// Bounds on the census levels: [ceil(alpha), floor(beta)] with
/// alpha = log2(n^eps ln n) and beta = log2(16 n^(2 eps + delta) ln^2 n).
inline std::pair<int, int> heavy_levels(std::uint64_t n, double delta, double epsilon) {
  const double nd = static_cast<double>(n), ln = std::log(nd);
  const double alpha = std::log2(std::pow(nd, epsilon) * ln);
  const double beta = std::log2(16.0 * std::pow(nd, 2 * epsilon + delta) * ln * ln);
  return {static_cast<int>(std::ceil(alpha)), static_cast<int>(std::floor(beta))};
}

inline double heavy_bound(std::uint64_t n, double delta, double epsilon, int level) {
  const double nd = static_cast<double>(n), ln = std::log(nd);
  return std::ldexp(8.0 * std::pow(nd, 2 * epsilon + delta) * ln * ln, -level);
}

/// 4 n^(eps + delta) ln n.
inline double observed_core_edge_bound(std::uint64_t n, double delta, double epsilon) {
  const double nd = static_cast<double>(n);
  return 4.0 * std::pow(nd, epsilon + delta) * std::log(nd);
}

/// 4 n^eps.
inline double d_indegree_bound(std::uint64_t n, double epsilon) {
  return 4.0 * std::pow(static_cast<double>(n), epsilon);
}

struct DIndegreeReport {
  std::uint64_t max = 0;
  /// histogram[d] = core vertices with exactly d observed edges from D.
  std::vector<std::uint64_t> histogram;
};

inline DIndegreeReport d_indegree_check(const ObservedGraph& obs, const LabeledInstance& truth) {
  std::unordered_map<VertexId, std::uint64_t> indeg;
  for (const ObservedEdge& e : obs.edges)
    if (truth.class_at(e.source) == VertexClass::D && truth.is_core(e.target)) ++indeg[e.target];
  DIndegreeReport r;
  for (const auto& [v, d] : indeg) r.max = std::max(r.max, d);
  r.histogram.assign(r.max + 1, 0);
  std::uint64_t core = 0;
  for (VertexClass c : truth.class_of) core += c != VertexClass::D;
  r.histogram[0] = core - indeg.size();
  for (const auto& [v, d] : indeg) ++r.histogram[d];
  return r;
}

inline CoreStructureReport analyze_observed_core(const ObservedGraph& obs,
                                                 const LabeledInstance& truth) {
  CoreStructureReport r;
  std::vector<const ObservedEdge*> core;
  for (const ObservedEdge& e : obs.edges)
    if (truth.is_core(e.source) && truth.is_core(e.target)) core.push_back(&e);
  r.observed_core_edge_count = core.size();

  // Edges are deduplicated per slot, so a repeated (source, target) pair is a
  // parallel edge seen at two positions.
  std::vector<std::pair<VertexId, VertexId>> pairs;
  pairs.reserve(core.size());
  for (const auto* e : core) pairs.emplace_back(e->target, e->source);
  std::sort(pairs.begin(), pairs.end());

  std::vector<VertexId> centers;
  for (const auto* e : core) centers.push_back(e->source);
  std::sort(centers.begin(), centers.end());
  centers.erase(std::unique(centers.begin(), centers.end()), centers.end());
  r.happy_vertex_count = centers.size();

  for (std::size_t i = 0; i < pairs.size();) {
    std::size_t j = i;
    std::uint64_t distinct_sources = 0;
    while (j < pairs.size() && pairs[j].first == pairs[i].first) {
      if (j > i && pairs[j].second == pairs[j - 1].second)
        ++r.multi_edge_violations;
      else
        ++distinct_sources;
      ++j;
    }
    r.shared_petal_violations += distinct_sources * (distinct_sources - 1) / 2;
    i = j;
  }
  for (const auto* e : core)
    if (std::binary_search(centers.begin(), centers.end(), e->target)) ++r.happy_endpoint_violations;
  r.star_union_ok = r.happy_endpoint_violations == 0 && r.shared_petal_violations == 0 &&
                    r.multi_edge_violations == 0;

  r.stars.reserve(centers.size());
  for (VertexId c : centers) r.stars.push_back({c, {}});
  for (const auto* e : core) {
    auto it = std::lower_bound(centers.begin(), centers.end(), e->source);
    r.stars[static_cast<std::size_t>(it - centers.begin())].petals.push_back(e->target);
  }

  const auto& s = truth.shape;
  const auto [lo, hi] = heavy_levels(s.n, s.delta, s.epsilon);
  for (int i = std::max(lo, 0); i <= hi; ++i) {
    HeavyLevel level{std::uint64_t{1} << i, 0, heavy_bound(s.n, s.delta, s.epsilon, i)};
    for (const auto* e : core)
      if (obs.probes_on(e->target) >= level.tau) ++level.edges;
    r.heavy_census.push_back(level);
  }
  r.max_d_indegree = d_indegree_check(obs, truth).max;
  return r;
}

// ---------------------------------------------------------------------------
// Flat uniform plan and statistics helpers
// ---------------------------------------------------------------------------

/// llround(n^(1 + eps)).
inline std::uint64_t flat_budget(std::uint64_t n, double epsilon) {
  return static_cast<std::uint64_t>(std::llround(std::pow(static_cast<double>(n), 1.0 + epsilon)));
}

/// q probes (v, i), v uniform over all 2n' labels and i uniform in [1, d*].
inline QueryPlan flat_uniform_plan(const InstanceShape& shape, std::uint64_t q, Rng& rng) {
  QueryPlan plan;
  plan.probes.reserve(q);
  const std::uint64_t vertices = shape.vertex_count();
  for (std::uint64_t t = 0; t < q; ++t) {
    const auto v = static_cast<VertexId>(uniform_int(rng, 0, vertices - 1));
    const auto i = static_cast<std::uint32_t>(uniform_int(rng, 1, shape.core_degree));
    plan.probes.push_back({v, i});
  }
  return plan;
}

/// Wilson score interval for a binomial proportion.
inline std::pair<double, double> wilson_interval(std::uint64_t successes, std::uint64_t trials,
                                                 double z = 1.96) {
  if (trials == 0) return {0.0, 1.0};
  const double n = static_cast<double>(trials);
  const double p = static_cast<double>(successes) / n;
  const double z2 = z * z;
  const double center = (p + z2 / (2 * n)) / (1 + z2 / n);
  const double half = z * std::sqrt(p * (1 - p) / n + z2 / (4 * n * n)) / (1 + z2 / n);
  return {std::max(0.0, center - half), std::min(1.0, center + half)};
}

// ---------------------------------------------------------------------------
// Experiment runner
// ---------------------------------------------------------------------------

enum class ProbeModel : std::uint8_t { flat, tree, forest };
enum class DistinguisherKind : std::uint8_t { none, birthday, third_root, two_round };

inline const char* to_string(ProbeModel m) {
  switch (m) {
    case ProbeModel::flat: return "flat";
    case ProbeModel::tree: return "tree";
    default: return "forest";
  }
}

struct ExperimentConfig {
  InstanceParams params;
  ProbeModel model = ProbeModel::flat;
  WorldChoice world = WorldChoice::mixed;
  /// Flat and default-forest budget; nullopt means llround(n^(1 + eps)).
  std::optional<std::uint64_t> budget;
  std::uint64_t trials = 1;
  /// Tree model: exactly one plan. Forest model: the forest; when empty, q
  /// single-instruction trees on random roots with positions uniform in [1, d*].
  std::vector<TreeProbePlan> plans;
  DistinguisherKind distinguisher = DistinguisherKind::none;
  double distinguisher_constant = 4.0;
  bool exact_mu = true;
  unsigned jobs = 1;
};

struct TrialRecord {
  std::uint64_t trial = 0;
  World world = World::yes;
  std::uint64_t q = 0;
  CoreStructureReport report;
  std::uint64_t core_two_paths = 0;
  std::optional<std::uint64_t> mu_exact;
  std::optional<Verdict> verdict;
};

struct ExperimentSummary {
  std::vector<TrialRecord> records;
  double star_union_rate = 0.0;
  double mean_observed_core_edges = 0.0;
  /// Among trials with a distinguisher verdict.
  std::optional<double> verdict_accuracy;
};

inline void validate(const ExperimentConfig& cfg) {
  if (cfg.trials < 1) throw InvalidParams("trials must be >= 1");
  resolve(cfg.params);
  if (cfg.model == ProbeModel::tree && cfg.plans.size() != 1)
    throw InvalidParams("tree model needs exactly one plan");
}

inline std::uint64_t experiment_budget(const ExperimentConfig& cfg) {
  return cfg.budget.value_or(flat_budget(cfg.params.n, cfg.params.epsilon));
}

/// One trial; pure in (cfg, trial).
inline TrialRecord run_trial(const ExperimentConfig& cfg, std::uint64_t trial) {
  const LabeledInstance inst = generate(cfg.params, cfg.world, trial);
  const BipartiteMultigraph& g = *inst.graph;
  TrialRecord rec;
  rec.trial = trial;
  rec.world = inst.world;

  Rng plan_rng = make_rng(cfg.params.seed, trial, Stream::plan);
  ObservedGraph obs;
  if (cfg.model == ProbeModel::flat) {
    rec.q = experiment_budget(cfg);
    const QueryPlan plan = flat_uniform_plan(inst.shape, rec.q, plan_rng);
    obs = observed_graph_from(plan, answer_plan(g, plan));
  } else {
    std::vector<TreeProbePlan> forest = cfg.plans;
    if (cfg.model == ProbeModel::forest && forest.empty()) {
      const std::uint64_t q = experiment_budget(cfg);
      forest.resize(q);
      for (auto& p : forest)
        p.instructions.push_back(
            {1, static_cast<std::uint32_t>(uniform_int(plan_rng, 1, inst.shape.core_degree))});
    }
    Rng root_rng = make_rng(cfg.params.seed, trial, Stream::tree_root);
    const auto transcripts = execute_forest_plan(g, forest, root_rng);
    rec.q = charged_queries(transcripts);
    obs = transcripts_to_observed_graph(transcripts);
    for (const auto& t : transcripts)
      rec.core_two_paths += core_two_path_count(t, [&](VertexId v) { return inst.is_core(v); });
  }
  rec.report = analyze_observed_core(obs, inst);

  if (cfg.distinguisher != DistinguisherKind::none) {
    Rng drng = make_rng(cfg.params.seed, trial, Stream::distinguisher);
    const double c = cfg.distinguisher_constant;
    DistinguishVerdict d;
    switch (cfg.distinguisher) {
      case DistinguisherKind::birthday: d = birthday_distinguisher(g, inst.shape, drng, c); break;
      case DistinguisherKind::third_root: d = third_root_distinguisher(g, inst.shape, drng, c, c); break;
      default: d = two_round_distinguisher(g, inst.shape, drng, c); break;
    }
    rec.verdict = d.verdict;
  }
  if (cfg.exact_mu) rec.mu_exact = maximum_matching(g).size();
  return rec;
}

inline void write_experiment_header(std::ostream& out) {
  out << "trial,world,n,delta,epsilon,q,obs_core_edges,happy,star_ok,multi_edge_viol,"
         "shared_petal_viol,happy_endpoint_viol,max_d_indeg,mu_exact,verdict,verdict_correct\n";
}

inline void write_experiment_row(std::ostream& out, const ExperimentConfig& cfg,
                                 const TrialRecord& r) {
  const auto& rep = r.report;
  out << r.trial << ',' << to_string(r.world) << ',' << cfg.params.n << ',' << cfg.params.delta
      << ',' << cfg.params.epsilon << ',' << r.q << ',' << rep.observed_core_edge_count << ','
      << rep.happy_vertex_count << ',' << (rep.star_union_ok ? 1 : 0) << ','
      << rep.multi_edge_violations << ',' << rep.shared_petal_violations << ','
      << rep.happy_endpoint_violations << ',' << rep.max_d_indegree << ',';
  if (r.mu_exact)
    out << *r.mu_exact;
  else
    out << "NA";
  out << ',';
  if (r.verdict)
    out << to_string(*r.verdict) << ',' << (verdict_matches(*r.verdict, r.world) ? 1 : 0);
  else
    out << "NA,NA";
  out << '\n';
}

/**
 * Runs cfg.trials trials, optionally on cfg.jobs worker threads. Rows reach
 * `csv` in trial order regardless of the worker count. A failing trial is
 * rethrown as std::runtime_error naming the trial.
 */
inline ExperimentSummary run_experiment(const ExperimentConfig& cfg, std::ostream* csv = nullptr,
                                        const std::function<void(const TrialRecord&)>& on_trial = {}) {
  validate(cfg);
  ExperimentSummary summary;
  summary.records.resize(cfg.trials);
  std::vector<char> done(cfg.trials, 0);
  std::mutex mu;
  std::uint64_t next = 0, written = 0;
  std::string failure;

  if (csv) write_experiment_header(*csv);
  auto flush = [&] {  // caller holds mu
    while (written < cfg.trials && done[written]) {
      const TrialRecord& r = summary.records[written];
      if (csv) {
        write_experiment_row(*csv, cfg, r);
        if (!*csv) {
          failure = "trial " + std::to_string(r.trial) + ": write to CSV failed";
          next = cfg.trials;
          return;
        }
      }
      if (on_trial) on_trial(r);
      ++written;
    }
  };
  auto worker = [&] {
    for (;;) {
      std::uint64_t t;
      {
        std::lock_guard lock(mu);
        if (next >= cfg.trials || !failure.empty()) return;
        t = next++;
      }
      try {
        TrialRecord r = run_trial(cfg, t);
        std::lock_guard lock(mu);
        summary.records[t] = std::move(r);
        done[t] = 1;
        flush();
      } catch (const std::exception& e) {
        std::lock_guard lock(mu);
        if (failure.empty()) failure = "trial " + std::to_string(t) + ": " + e.what();
        return;
      }
    }
  };
  const unsigned jobs = std::max(1u, cfg.jobs);
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned j = 0; j < jobs; ++j) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (!failure.empty()) throw std::runtime_error(failure);

  std::uint64_t stars_ok = 0, edges = 0, decided = 0, correct = 0;
  for (const auto& r : summary.records) {
    stars_ok += r.report.star_union_ok;
    edges += r.report.observed_core_edge_count;
    if (r.verdict) {
      ++decided;
      correct += verdict_matches(*r.verdict, r.world);
    }
  }
  const double trials = static_cast<double>(cfg.trials);
  summary.star_union_rate = static_cast<double>(stars_ok) / trials;
  summary.mean_observed_core_edges = static_cast<double>(edges) / trials;
  if (decided > 0) summary.verdict_accuracy = static_cast<double>(correct) / static_cast<double>(decided);
  return summary;
}

}  // namespace sublin
