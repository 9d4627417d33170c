#pragma once

#include <cstdint>
#include <istream>
#include <memory>
#include <optional>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <unordered_set>
#include <vector>

#include "sublin/graph.hpp"
#include "sublin/query.hpp"
#include "sublin/rng.hpp"

namespace sublin {

// Non-adaptive tree probes. A plan fixes, before anything is answered, a
// root and a sequence of instructions (a_i, b_i): "the b_i-th neighbor of the
// vertex discovered in slot a_i". Slot 1 holds the root and instruction i
// fills slot i + 1, so a_i <= i. A probe past the end of a list, or on an
// empty slot, fills its slot with bottom, and bottom is absorbing.

struct TreeInstruction {
  std::uint32_t parent_slot = 1;  // a_i, 1-based
  std::uint32_t position = 1;     // b_i, 1-based
  friend bool operator==(const TreeInstruction&, const TreeInstruction&) = default;
};

struct TreeProbePlan {
  /// nullopt draws the root uniformly over all vertices at execution time.
  std::optional<VertexId> root;
  std::vector<TreeInstruction> instructions;
  /// Declared degree bound; 0 means the larger side size of the graph.
  std::uint64_t degree_bound = 0;

  std::uint64_t charged_queries() const noexcept { return instructions.size(); }

  /// Throws PlanError on a_i > i, a_i = 0, b_i = 0 or b_i > bound.
  void validate(std::uint64_t bound) const {
    for (std::size_t i = 0; i < instructions.size(); ++i) {
      const auto& [a, b] = instructions[i];
      const std::string where = "instruction " + std::to_string(i + 1) + ": ";
      if (a == 0 || a > i + 1)
        throw PlanError(where + "parent slot " + std::to_string(a) + " not yet discovered");
      if (b == 0) throw PlanError(where + "position must be >= 1");
      if (b > bound)
        throw PlanError(where + "position " + std::to_string(b) + " exceeds degree bound " +
                        std::to_string(bound));
    }
  }

  friend bool operator==(const TreeProbePlan&, const TreeProbePlan&) = default;
};

struct ProbeTranscript {
  /// discovered[s - 1] is slot s; kNullVertex is bottom. Size q + 1.
  std::vector<VertexId> discovered;
  /// The plan the transcript answers (root resolved).
  std::vector<TreeInstruction> instructions;
  /// Non-bottom steps as (u_{a_i} -> u_{i+1}, b_i), in instruction order.
  std::vector<ObservedEdge> edges;
  /// Degrees of all vertices, revealed after execution.
  std::shared_ptr<const std::vector<std::uint32_t>> revealed_degrees;
  std::uint64_t charged_queries = 0;

  VertexId root() const { return discovered.front(); }
  VertexId slot(std::size_t s) const { return discovered.at(s - 1); }
};

namespace detail {

inline std::shared_ptr<const std::vector<std::uint32_t>> all_degrees(const BipartiteMultigraph& g) {
  auto d = g.degrees();
  return std::make_shared<const std::vector<std::uint32_t>>(d.begin(), d.end());
}

inline std::uint64_t resolved_bound(const BipartiteMultigraph& g, const TreeProbePlan& plan) {
  return plan.degree_bound != 0 ? plan.degree_bound
                                : std::max<std::uint64_t>(1, std::max(g.left_count(), g.right_count()));
}

inline ProbeTranscript run_tree(const BipartiteMultigraph& g, const TreeProbePlan& plan, Rng& rng,
                                std::shared_ptr<const std::vector<std::uint32_t>> degrees) {
  plan.validate(resolved_bound(g, plan));
  VertexId root;
  if (plan.root) {
    if (!g.contains(*plan.root))
      throw PlanError("root " + std::to_string(*plan.root) + " is not a vertex");
    root = *plan.root;
  } else {
    if (g.vertex_count() == 0) throw PlanError("random root on an empty graph");
    root = static_cast<VertexId>(uniform_int(rng, 0, g.vertex_count() - 1));
  }
  ProbeTranscript t;
  t.instructions = plan.instructions;
  t.discovered.reserve(plan.instructions.size() + 1);
  t.discovered.push_back(root);
  for (const auto& [a, b] : plan.instructions) {
    const VertexId parent = t.discovered[a - 1];
    VertexId found = kNullVertex;
    if (parent != kNullVertex) found = g.neighbor(parent, b).value_or(kNullVertex);
    t.discovered.push_back(found);
    if (found != kNullVertex) t.edges.push_back({parent, found, b});
  }
  t.charged_queries = plan.instructions.size();
  t.revealed_degrees = std::move(degrees);
  return t;
}

}  // namespace detail

inline ProbeTranscript execute_tree_plan(const BipartiteMultigraph& g, const TreeProbePlan& plan,
                                         Rng& rng) {
  return detail::run_tree(g, plan, rng, detail::all_degrees(g));
}

/// Executes each tree in order on the same graph. Every plan is validated
/// before any of them runs. Random roots are drawn in plan order from rng.
inline std::vector<ProbeTranscript> execute_forest_plan(const BipartiteMultigraph& g,
                                                        std::span<const TreeProbePlan> plans,
                                                        Rng& rng) {
  for (const auto& p : plans) p.validate(detail::resolved_bound(g, p));
  std::vector<ProbeTranscript> out;
  if (plans.empty()) return out;
  const auto degrees = detail::all_degrees(g);
  out.reserve(plans.size());
  for (const auto& p : plans) out.push_back(detail::run_tree(g, p, rng, degrees));
  return out;
}

inline std::uint64_t charged_queries(std::span<const ProbeTranscript> forest) {
  std::uint64_t total = 0;
  for (const auto& t : forest) total += t.charged_queries;
  return total;
}

/// Probes issued on a bottom slot touch no vertex and are not counted as
/// probes on any vertex (they are still charged).
inline ObservedGraph transcripts_to_observed_graph(std::span<const ProbeTranscript> forest) {
  ObservedGraph obs;
  std::unordered_set<std::uint64_t> seen;
  std::vector<VertexId> probed;
  for (const auto& t : forest) {
    for (std::size_t i = 0; i < t.instructions.size(); ++i) {
      const auto& [a, b] = t.instructions[i];
      const VertexId parent = t.discovered[a - 1], found = t.discovered[i + 1];
      if (parent == kNullVertex) continue;
      probed.push_back(parent);
      if (found != kNullVertex && seen.insert(detail::slot_key(parent, b)).second)
        obs.edges.push_back({parent, found, b});
    }
  }
  detail::set_probe_counts(obs, std::move(probed));
  return obs;
}

inline ObservedGraph transcript_to_observed_graph(const ProbeTranscript& t) {
  return transcripts_to_observed_graph(std::span<const ProbeTranscript>(&t, 1));
}

/// Number of instructions whose edge and whose parent's discovering edge are
/// both core edges, i.e. directed 2-paths in the probe tree lying in the core.
template <class IsCore>
std::uint64_t core_two_path_count(const ProbeTranscript& t, IsCore&& is_core) {
  // core_in[s] is true when slot s was reached through a core edge.
  std::vector<char> core_in(t.discovered.size() + 1, 0);
  std::uint64_t count = 0;
  for (std::size_t i = 0; i < t.instructions.size(); ++i) {
    const std::uint32_t a = t.instructions[i].parent_slot;
    const VertexId u = t.discovered[a - 1], w = t.discovered[i + 1];
    if (u == kNullVertex || w == kNullVertex || !is_core(u) || !is_core(w)) continue;
    core_in[i + 2] = 1;
    if (core_in[a]) ++count;
  }
  return count;
}

// ---------------------------------------------------------------------------
// Plan files: a block starts with "root <id|random> delta_bound <bound>" and
// is followed by one "a b" pair per line. Several blocks form a forest.
// Blank lines and lines starting with '#' are ignored.
// ---------------------------------------------------------------------------

inline void write_tree_plan(std::ostream& out, const TreeProbePlan& plan) {
  out << "root ";
  if (plan.root)
    out << *plan.root;
  else
    out << "random";
  out << " delta_bound " << plan.degree_bound << '\n';
  for (const auto& [a, b] : plan.instructions) out << a << ' ' << b << '\n';
}

inline std::vector<TreeProbePlan> read_tree_plans(std::istream& in) {
  std::vector<TreeProbePlan> plans;
  std::string line;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ss(line);
    std::string head;
    ss >> head;
    const std::string where = "plan line " + std::to_string(row) + ": ";
    if (head == "root") {
      std::string root, key;
      std::uint64_t bound = 0;
      if (!(ss >> root >> key >> bound) || key != "delta_bound")
        throw PlanError(where + "expected 'root <id|random> delta_bound <bound>'");
      TreeProbePlan p;
      if (root != "random") {
        try {
          p.root = static_cast<VertexId>(std::stoull(root));
        } catch (const std::exception&) {
          throw PlanError(where + "bad root '" + root + "'");
        }
      }
      p.degree_bound = bound;
      plans.push_back(std::move(p));
      continue;
    }
    if (plans.empty()) throw PlanError(where + "instruction before any 'root' line");
    std::istringstream pair(line);
    long long a = 0, b = 0;
    std::string extra;
    if (!(pair >> a >> b) || (pair >> extra) || a < 0 || b < 0)
      throw PlanError(where + "expected 'a b'");
    plans.back().instructions.push_back(
        {static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(b)});
  }
  return plans;
}

/// CSV "step,parent_slot,position,result". Step 0 is the root row with empty
/// parent and position; bottom is written as NULL.
inline void write_transcript_csv(std::ostream& out, const ProbeTranscript& t, bool header = true) {
  if (header) out << "step,parent_slot,position,result\n";
  out << "0,,," << t.root() << '\n';
  for (std::size_t i = 0; i < t.instructions.size(); ++i) {
    out << i + 1 << ',' << t.instructions[i].parent_slot << ',' << t.instructions[i].position << ',';
    const VertexId v = t.discovered[i + 1];
    if (v == kNullVertex)
      out << "NULL";
    else
      out << v;
    out << '\n';
  }
}

}  // namespace sublin
