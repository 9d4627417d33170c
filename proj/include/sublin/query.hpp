#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <istream>
#include <optional>
#include <ostream>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <unordered_set>
#include <variant>
#include <vector>

#include "sublin/graph.hpp"
#include "sublin/rng.hpp"

namespace sublin {

// Non-adaptive adjacency-list access. A client commits to a whole QueryPlan
// and receives every answer at once from answer_plan(); there is no
// per-probe entry point.

class PlanError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// "Give me the index-th neighbor of vertex" (1-based).
struct Probe {
  VertexId vertex = 0;
  std::uint32_t index = 1;
  friend bool operator==(const Probe&, const Probe&) = default;
};

struct QueryPlan {
  std::vector<Probe> probes;
  /// Degree requests. Free: they are not charged against the budget.
  std::vector<VertexId> degree_probes;

  /// Every neighbor probe is charged, repeats included.
  std::uint64_t charged_queries() const noexcept { return probes.size(); }
};

struct QueryAnswerSet {
  /// One entry per probe; kNullVertex encodes NULL.
  std::vector<VertexId> answers;
  /// One entry per degree probe.
  std::vector<std::uint32_t> degrees;

  std::optional<VertexId> answer(std::size_t probe) const {
    const VertexId a = answers.at(probe);
    if (a == kNullVertex) return std::nullopt;
    return a;
  }
};

struct QueryBudgetReport {
  std::uint64_t charged_queries = 0;
  std::uint64_t budget = 0;
  bool within_budget = true;
};

inline QueryBudgetReport budget_report(const QueryPlan& plan, std::uint64_t budget) {
  return {plan.charged_queries(), budget, plan.charged_queries() <= budget};
}

/// Answers a committed plan. Pure in (g, plan). Throws PlanError for a probe
/// on an unknown vertex or with index 0.
inline QueryAnswerSet answer_plan(const BipartiteMultigraph& g, const QueryPlan& plan) {
  for (const Probe& p : plan.probes) {
    if (!g.contains(p.vertex))
      throw PlanError("probe on unknown vertex " + std::to_string(p.vertex));
    if (p.index == 0)
      throw PlanError("probe index must be >= 1 (vertex " + std::to_string(p.vertex) + ")");
  }
  for (VertexId v : plan.degree_probes)
    if (!g.contains(v)) throw PlanError("degree probe on unknown vertex " + std::to_string(v));

  QueryAnswerSet out;
  out.answers.resize(plan.probes.size());
  for (std::size_t i = 0; i < plan.probes.size(); ++i) {
    const Probe& p = plan.probes[i];
    out.answers[i] = g.neighbor(p.vertex, p.index).value_or(kNullVertex);
  }
  out.degrees.reserve(plan.degree_probes.size());
  for (VertexId v : plan.degree_probes)
    out.degrees.push_back(static_cast<std::uint32_t>(g.degree(v)));
  return out;
}

/// Degree lookup assembled from the degree probes of a plan.
class DegreeTable {
 public:
  DegreeTable(const QueryPlan& plan, const QueryAnswerSet& answers) {
    if (answers.degrees.size() != plan.degree_probes.size())
      throw PlanError("answer set does not match plan degree probes");
    VertexId max_id = 0;
    for (VertexId v : plan.degree_probes) max_id = std::max(max_id, v);
    table_.assign(plan.degree_probes.empty() ? 0 : std::size_t{max_id} + 1, kUnknown);
    for (std::size_t i = 0; i < plan.degree_probes.size(); ++i)
      table_[plan.degree_probes[i]] = answers.degrees[i];
  }

  bool known(VertexId v) const { return v < table_.size() && table_[v] != kUnknown; }

  std::uint32_t at(VertexId v) const {
    if (!known(v)) throw PlanError("degree of vertex " + std::to_string(v) + " was not probed");
    return table_[v];
  }

 private:
  static constexpr std::uint32_t kUnknown = 0xffffffffU;
  std::vector<std::uint32_t> table_;
};

// ---------------------------------------------------------------------------
// Random-neighbor simulation by degree guessing.
//
// For each requested sample of vertex v the plan holds one probe per guess
// level j = 0..L with index uniform in [1, 2^j], where L = ceil(log2 bound).
// After the answers arrive, only the probe at the level with
// 2^(j-1) < deg(v) <= 2^j is kept, and only if its index is <= deg(v); the
// kept answer is then a uniform neighbor of v.
// ---------------------------------------------------------------------------

struct SamplesPerVertex {
  std::uint64_t count = 1;
};
struct BernoulliSample {
  double rate = 1.0;
};
using SampleSpec = std::variant<SamplesPerVertex, BernoulliSample>;

/// ceil(log2 bound) + 1 guess levels.
inline unsigned guess_level_count(std::uint64_t max_degree_bound) {
  if (max_degree_bound == 0) throw PlanError("max_degree_bound must be >= 1");
  return static_cast<unsigned>(std::bit_width(max_degree_bound - 1)) + 1;
}

/// The level j with 2^(j-1) < degree <= 2^j. Requires degree >= 1.
inline unsigned selected_guess_level(std::uint64_t degree) {
  return static_cast<unsigned>(std::bit_width(degree - 1));
}

struct RandomNeighborPlan {
  QueryPlan plan;
  /// Guess level of each probe in plan.probes.
  std::vector<std::uint8_t> level;
  unsigned level_count = 0;
};

/// Commits the whole random-neighbor plan up front. Degree probes for the
/// requested vertices are included (free).
inline RandomNeighborPlan build_random_neighbor_plan(std::span<const VertexId> vertices,
                                                     const SampleSpec& samples,
                                                     std::uint64_t max_degree_bound,
                                                     Rng& rng) {
  RandomNeighborPlan out;
  out.level_count = guess_level_count(max_degree_bound);
  const unsigned levels = out.level_count;
  auto& probes = out.plan.probes;
  std::size_t at = 0;
  auto emit_sample = [&](VertexId v) {
    if (at + levels > probes.size()) {
      probes.resize(std::max<std::size_t>(2 * probes.size(), at + levels));
      out.level.resize(probes.size());
    }
    probes[at] = {v, 1};  // level 0: the range [1, 1]
    out.level[at++] = 0;
    // Level j takes j fresh bits; a sample starts on a fresh draw so that the
    // plan for a vertex range does not depend on what came before it.
    std::uint64_t bits = 0;
    unsigned avail = 0;
    for (unsigned j = 1; j < levels; ++j) {
      if (avail < j) {
        bits = rng();
        avail = 64;
      }
      probes[at] = {v, static_cast<std::uint32_t>((bits & ((std::uint64_t{1} << j) - 1)) + 1)};
      out.level[at++] = static_cast<std::uint8_t>(j);
      bits >>= j;
      avail -= j;
    }
  };
  if (const auto* fixed = std::get_if<SamplesPerVertex>(&samples)) {
    probes.resize(fixed->count * vertices.size() * levels);
    out.level.resize(probes.size());
    for (VertexId v : vertices)
      for (std::uint64_t s = 0; s < fixed->count; ++s) emit_sample(v);
  } else {
    const double rate = std::get<BernoulliSample>(samples).rate;
    for (VertexId v : vertices)
      if (bernoulli(rng, rate)) emit_sample(v);
  }
  probes.resize(at);
  out.level.resize(at);
  out.plan.degree_probes.assign(vertices.begin(), vertices.end());
  return out;
}

struct SampledNeighbor {
  VertexId vertex = 0;
  VertexId neighbor = 0;
  /// Index of the retained probe in the plan.
  std::size_t probe = 0;
};

/// Keeps the probes that realize uniform random neighbors, in plan order.
/// Vertices of degree 0 contribute nothing.
inline std::vector<SampledNeighbor> extract_random_neighbor_answers(
    const RandomNeighborPlan& rn, const QueryAnswerSet& answers) {
  if (answers.answers.size() != rn.plan.probes.size())
    throw PlanError("answer set does not match plan");
  const DegreeTable degrees(rn.plan, answers);
  std::vector<SampledNeighbor> out;
  for (std::size_t i = 0; i < rn.plan.probes.size(); ++i) {
    const Probe& p = rn.plan.probes[i];
    const std::uint32_t deg = degrees.at(p.vertex);
    if (deg == 0 || rn.level[i] != selected_guess_level(deg) || p.index > deg) continue;
    out.push_back({p.vertex, answers.answers[i], i});
  }
  return out;
}

// ---------------------------------------------------------------------------
// Observed graph
// ---------------------------------------------------------------------------

struct ObservedEdge {
  VertexId source = 0;
  VertexId target = 0;
  /// 1-based position of target in source's adjacency list.
  std::uint32_t position = 0;
  friend bool operator==(const ObservedEdge&, const ObservedEdge&) = default;
};

/// Directed, position-labeled subgraph revealed by probe answers. Edges point
/// out of the probed vertex; at most one edge per (source, position).
struct ObservedGraph {
  std::vector<ObservedEdge> edges;
  /// Probed vertices, sorted, with the number of probes each received.
  std::vector<VertexId> queried;
  std::vector<std::uint32_t> probe_counts;

  std::uint32_t probes_on(VertexId v) const {
    auto it = std::lower_bound(queried.begin(), queried.end(), v);
    if (it == queried.end() || *it != v) return 0;
    return probe_counts[static_cast<std::size_t>(it - queried.begin())];
  }
  bool was_queried(VertexId v) const { return probes_on(v) > 0; }
};

namespace detail {

inline void set_probe_counts(ObservedGraph& obs, std::vector<VertexId> probed) {
  std::sort(probed.begin(), probed.end());
  for (std::size_t i = 0; i < probed.size();) {
    std::size_t j = i;
    while (j < probed.size() && probed[j] == probed[i]) ++j;
    obs.queried.push_back(probed[i]);
    obs.probe_counts.push_back(static_cast<std::uint32_t>(j - i));
    i = j;
  }
}

inline std::uint64_t slot_key(VertexId v, std::uint32_t position) {
  return (static_cast<std::uint64_t>(v) << 32) | position;
}

}  // namespace detail

inline ObservedGraph observed_graph_from(const QueryPlan& plan, const QueryAnswerSet& answers) {
  if (answers.answers.size() != plan.probes.size())
    throw PlanError("answer set does not match plan");
  ObservedGraph obs;
  std::unordered_set<std::uint64_t> seen;
  std::vector<VertexId> probed;
  probed.reserve(plan.probes.size());
  for (std::size_t i = 0; i < plan.probes.size(); ++i) {
    const Probe& p = plan.probes[i];
    probed.push_back(p.vertex);
    const VertexId a = answers.answers[i];
    if (a == kNullVertex) continue;
    if (seen.insert(detail::slot_key(p.vertex, p.index)).second)
      obs.edges.push_back({p.vertex, a, p.index});
  }
  detail::set_probe_counts(obs, std::move(probed));
  return obs;
}

// ---------------------------------------------------------------------------
// CSV: header "vertex,index,answer". Neighbor probes carry a numeric index
// and an answer that is a vertex id or NULL; degree probes use the literal
// index "deg" and carry the degree. A plan without answers leaves the answer
// column empty.
// ---------------------------------------------------------------------------

inline void write_query_csv(std::ostream& out, const QueryPlan& plan,
                            const QueryAnswerSet* answers = nullptr) {
  out << "vertex,index,answer\n";
  for (std::size_t i = 0; i < plan.probes.size(); ++i) {
    out << plan.probes[i].vertex << ',' << plan.probes[i].index << ',';
    if (answers) {
      const VertexId a = answers->answers.at(i);
      if (a == kNullVertex)
        out << "NULL";
      else
        out << a;
    }
    out << '\n';
  }
  for (std::size_t i = 0; i < plan.degree_probes.size(); ++i) {
    out << plan.degree_probes[i] << ",deg,";
    if (answers) out << answers->degrees.at(i);
    out << '\n';
  }
}

struct QueryCsv {
  QueryPlan plan;
  std::optional<QueryAnswerSet> answers;
};

inline QueryCsv read_query_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != "vertex,index,answer")
    throw PlanError("missing header 'vertex,index,answer'");
  QueryCsv out;
  QueryAnswerSet answers;
  bool any_answer = false, any_blank = false;
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    if (cells.size() != 3) throw PlanError("row " + std::to_string(row) + ": expected 3 fields");
    const auto vertex = static_cast<VertexId>(std::stoull(cells[0]));
    const bool has_answer = !cells[2].empty();
    any_answer |= has_answer;
    any_blank |= !has_answer;
    if (cells[1] == "deg") {
      out.plan.degree_probes.push_back(vertex);
      if (has_answer) answers.degrees.push_back(static_cast<std::uint32_t>(std::stoul(cells[2])));
    } else {
      out.plan.probes.push_back({vertex, static_cast<std::uint32_t>(std::stoul(cells[1]))});
      if (has_answer)
        answers.answers.push_back(cells[2] == "NULL" ? kNullVertex
                                                     : static_cast<VertexId>(std::stoull(cells[2])));
    }
  }
  if (any_answer && any_blank) throw PlanError("answer column is only partially filled");
  if (any_answer) out.answers = std::move(answers);
  return out;
}

}  // namespace sublin
