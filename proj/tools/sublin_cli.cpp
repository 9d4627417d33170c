// sublin: command-line harness for the matching-size estimator, the hard
// yes/no instances, tree probes and the structural experiments.
//
// Exit codes: 0 success, 1 invariant violation or I/O failure, 2 bad flags.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "sublin/sublin.hpp"

namespace {

using namespace sublin;

struct Failure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

const std::map<std::string, WorldChoice> kWorlds{
    {"yes", WorldChoice::yes}, {"no", WorldChoice::no}, {"mixed", WorldChoice::mixed}};

// Opens `path` for writing, or returns stdout for "" / "-".
class Output {
 public:
  explicit Output(const std::string& path) {
    if (path.empty() || path == "-") return;
    file_ = std::make_unique<std::ofstream>(path, std::ios::binary);
    if (!*file_) throw Failure("cannot open " + path + " for writing");
  }
  std::ostream& stream() { return file_ ? *file_ : std::cout; }
  void finish(const std::string& what) {
    stream().flush();
    if (!stream()) throw Failure("write failed: " + what);
  }

 private:
  std::unique_ptr<std::ofstream> file_;
};

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Failure("cannot open " + path);
  return in;
}

// ---------------------------------------------------------------------------

struct GenerateArgs {
  InstanceParams params;
  std::string world = "yes";
  std::string out = "instance.txt";
};

void run_generate(const GenerateArgs& a) {
  const LabeledInstance inst = generate(a.params, kWorlds.at(a.world));
  {
    Output out(a.out);
    write_text(out.stream(), *inst.graph);
    out.finish(a.out);
  }
  const std::string sidecar = a.out + ".truth.json";
  Output truth(sidecar);
  write_ground_truth(truth.stream(), inst, a.params);
  truth.finish(sidecar);
  const auto& s = inst.shape;
  std::cerr << "wrote " << a.out << " (" << to_string(inst.world) << ", n'=" << s.side_size
            << ", g=" << s.group_count << ", d*=" << s.core_degree
            << (s.saturated ? ", saturated" : "") << ") and " << sidecar << '\n';
}

// ---------------------------------------------------------------------------

struct EstimateArgs {
  std::string graph = "generated";
  InstanceParams params;
  std::string world = "yes";
  std::uint64_t trials = 1;
  double constant = 80.0;
  bool no_mu = false;
  std::string csv;
};

void run_estimate(const EstimateArgs& a) {
  std::shared_ptr<const BipartiteMultigraph> file_graph;
  std::optional<std::size_t> file_mu;
  if (a.graph != "generated") {
    auto in = open_input(a.graph);
    file_graph = std::make_shared<const BipartiteMultigraph>(read_text(in));
    if (!a.no_mu) file_mu = maximum_matching(*file_graph).size();
  }
  Output out(a.csv);
  out.stream() << "seed,estimate,exact_mu,charged_queries\n";
  EstimatorOptions opts;
  opts.constant = a.constant;
  for (std::uint64_t t = 0; t < a.trials; ++t) {
    InstanceParams p = a.params;
    p.seed = a.params.seed + t;
    std::shared_ptr<const BipartiteMultigraph> g = file_graph;
    std::optional<std::size_t> mu = file_mu;
    if (!g) {
      g = generate(p, kWorlds.at(a.world)).graph;
      if (!a.no_mu) mu = maximum_matching(*g).size();
    }
    Rng rng = make_rng(p.seed, 0, Stream::estimator);
    const EstimateResult r = estimate_matching_size(*g, p.n, p.delta, rng, opts);
    out.stream() << p.seed << ',' << r.estimate << ',';
    if (mu)
      out.stream() << *mu;
    else
      out.stream() << "NA";
    out.stream() << ',' << r.charged_queries << '\n';
  }
  out.finish(a.csv.empty() ? "stdout" : a.csv);
}

// ---------------------------------------------------------------------------

struct DistinguishArgs {
  std::string method = "birthday";
  InstanceParams params;
  std::string world = "mixed";
  std::uint64_t trials = 1;
  double c = 4.0, c1 = 4.0, c2 = 4.0;
  std::string csv;
};

void run_distinguish(const DistinguishArgs& a) {
  Output out(a.csv);
  out.stream() << "seed,world,verdict,correct,charged_queries\n";
  std::uint64_t decided = 0, correct = 0, wrong = 0;
  for (std::uint64_t t = 0; t < a.trials; ++t) {
    InstanceParams p = a.params;
    p.seed = a.params.seed + t;
    const LabeledInstance inst = generate(p, kWorlds.at(a.world));
    Rng rng = make_rng(p.seed, 0, Stream::distinguisher);
    DistinguishVerdict d;
    if (a.method == "birthday")
      d = birthday_distinguisher(*inst.graph, inst.shape, rng, a.c);
    else if (a.method == "third-root")
      d = third_root_distinguisher(*inst.graph, inst.shape, rng, a.c1, a.c2);
    else
      d = two_round_distinguisher(*inst.graph, inst.shape, rng, a.c);
    const bool ok = verdict_matches(d.verdict, inst.world);
    if (d.verdict != Verdict::undecided) {
      ++decided;
      ok ? ++correct : ++wrong;
    }
    out.stream() << p.seed << ',' << to_string(inst.world) << ',' << to_string(d.verdict) << ','
                 << (ok ? 1 : 0) << ',' << d.charged_queries << '\n';
  }
  out.finish(a.csv.empty() ? "stdout" : a.csv);
  std::cerr << a.method << ": " << correct << '/' << a.trials << " correct, " << wrong
            << " wrong, " << a.trials - decided << " undecided\n";
}

// ---------------------------------------------------------------------------

struct ProbeArgs {
  std::string graph = "generated";
  InstanceParams params;
  std::string world = "yes";
  std::string plan;
  std::string csv;
};

void run_probe(const ProbeArgs& a) {
  std::shared_ptr<const BipartiteMultigraph> g;
  if (a.graph == "generated") {
    g = generate(a.params, kWorlds.at(a.world)).graph;
  } else {
    auto in = open_input(a.graph);
    g = std::make_shared<const BipartiteMultigraph>(read_text(in));
  }
  auto plan_in = open_input(a.plan);
  const auto plans = read_tree_plans(plan_in);
  Rng rng = make_rng(a.params.seed, 0, Stream::tree_root);
  const auto transcripts = execute_forest_plan(*g, plans, rng);
  Output out(a.csv);
  out.stream() << "step,parent_slot,position,result\n";
  for (const auto& t : transcripts) write_transcript_csv(out.stream(), t, false);
  out.finish(a.csv.empty() ? "stdout" : a.csv);
  std::cerr << transcripts.size() << " tree(s), " << charged_queries(transcripts)
            << " charged queries\n";
}

// ---------------------------------------------------------------------------

struct ExperimentArgs {
  ExperimentConfig cfg;
  std::string model = "flat";
  std::string world = "mixed";
  std::string plan;
  std::string distinguisher = "none";
  std::optional<std::uint64_t> q;
  bool no_mu = false;
  std::string csv;
};

void run_experiment_cmd(ExperimentArgs a) {
  ExperimentConfig& cfg = a.cfg;
  cfg.model = a.model == "flat" ? ProbeModel::flat : a.model == "tree" ? ProbeModel::tree : ProbeModel::forest;
  cfg.world = kWorlds.at(a.world);
  cfg.budget = a.q;
  cfg.exact_mu = !a.no_mu;
  cfg.distinguisher = a.distinguisher == "birthday"     ? DistinguisherKind::birthday
                      : a.distinguisher == "third-root" ? DistinguisherKind::third_root
                      : a.distinguisher == "two-round"  ? DistinguisherKind::two_round
                                                        : DistinguisherKind::none;
  if (!a.plan.empty()) {
    auto in = open_input(a.plan);
    cfg.plans = read_tree_plans(in);
  }
  Output out(a.csv);
  const ExperimentSummary s = run_experiment(cfg, &out.stream());
  out.finish(a.csv.empty() ? "stdout" : a.csv);
  const auto [lo, hi] = wilson_interval(
      static_cast<std::uint64_t>(std::llround(s.star_union_rate * static_cast<double>(cfg.trials))),
      cfg.trials);
  std::ostringstream msg;
  msg << "star_union_rate " << s.star_union_rate << " [" << lo << ", " << hi << "]"
      << ", mean_obs_core_edges " << s.mean_observed_core_edges;
  if (s.verdict_accuracy) msg << ", verdict_accuracy " << *s.verdict_accuracy;
  std::cerr << msg.str() << '\n';
}

void add_instance_flags(CLI::App* cmd, InstanceParams& p, bool need_n = true) {
  auto* n = cmd->add_option("--n", p.n, "core vertices per side")->check(CLI::PositiveNumber);
  if (need_n) n->required();
  cmd->add_option("--delta", p.delta, "approximation exponent in (0,1)")
      ->check(CLI::Range(0.0, 1.0))
      ->required(need_n);
  cmd->add_option("--epsilon", p.epsilon, "budget exponent")->check(CLI::NonNegativeNumber);
  cmd->add_option("--seed", p.seed, "base seed")->required();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"sublin: non-adaptive matching-size estimation and its hard instances"};
  app.set_version_flag("--version", std::string("sublin ") + kLibraryVersion + " (schema " +
                                        std::to_string(kSchemaVersion) + ")");
  app.require_subcommand(1);
  const auto world_check = CLI::IsMember({"yes", "no", "mixed"});

  GenerateArgs gen;
  auto* gen_cmd = app.add_subcommand("generate", "draw one yes/no instance");
  add_instance_flags(gen_cmd, gen.params);
  gen_cmd->add_option("--world", gen.world)->check(world_check);
  gen_cmd->add_option("--out", gen.out, "graph file; sidecar goes to <out>.truth.json");

  EstimateArgs est;
  auto* est_cmd = app.add_subcommand("estimate", "run the matching-size estimator");
  add_instance_flags(est_cmd, est.params);
  est_cmd->add_option("--graph", est.graph, "graph file, or 'generated'");
  est_cmd->add_option("--world", est.world)->check(world_check);
  est_cmd->add_option("--trials", est.trials)->check(CLI::PositiveNumber);
  est_cmd->add_option("--constant", est.constant, "leading constant of the sample rate")
      ->check(CLI::PositiveNumber);
  est_cmd->add_flag("--no-mu", est.no_mu, "skip the exact matching size");
  est_cmd->add_option("--csv", est.csv);

  DistinguishArgs dis;
  auto* dis_cmd = app.add_subcommand("distinguish", "run a yes/no distinguisher");
  add_instance_flags(dis_cmd, dis.params);
  dis_cmd->add_option("--method", dis.method)
      ->check(CLI::IsMember({"birthday", "third-root", "two-round"}));
  dis_cmd->add_option("--world", dis.world)->check(world_check);
  dis_cmd->add_option("--trials", dis.trials)->check(CLI::PositiveNumber);
  dis_cmd->add_option("--c", dis.c)->check(CLI::PositiveNumber);
  dis_cmd->add_option("--c1", dis.c1)->check(CLI::PositiveNumber);
  dis_cmd->add_option("--c2", dis.c2)->check(CLI::PositiveNumber);
  dis_cmd->add_option("--csv", dis.csv);

  ProbeArgs prb;
  auto* prb_cmd = app.add_subcommand("probe", "execute tree probe plans");
  add_instance_flags(prb_cmd, prb.params, false);
  prb_cmd->add_option("--graph", prb.graph, "graph file, or 'generated'");
  prb_cmd->add_option("--world", prb.world)->check(world_check);
  prb_cmd->add_option("--plan", prb.plan)->required()->check(CLI::ExistingFile);
  prb_cmd->add_option("--csv", prb.csv);

  ExperimentArgs exp;
  auto* exp_cmd = app.add_subcommand("experiment", "multi-trial structural experiment");
  add_instance_flags(exp_cmd, exp.cfg.params);
  exp_cmd->add_option("--trials", exp.cfg.trials)->check(CLI::PositiveNumber);
  exp_cmd->add_option("--model", exp.model)->check(CLI::IsMember({"flat", "tree", "forest"}));
  exp_cmd->add_option("--plan", exp.plan)->check(CLI::ExistingFile);
  exp_cmd->add_option("--world", exp.world)->check(world_check);
  exp_cmd->add_option("--q", exp.q, "probe budget; default n^(1+epsilon)");
  exp_cmd->add_option("--distinguisher", exp.distinguisher)
      ->check(CLI::IsMember({"none", "birthday", "third-root", "two-round"}));
  exp_cmd->add_option("--c", exp.cfg.distinguisher_constant)->check(CLI::PositiveNumber);
  exp_cmd->add_flag("--no-mu", exp.no_mu, "skip the exact matching size");
  exp_cmd->add_option("--jobs", exp.cfg.jobs)->check(CLI::PositiveNumber);
  exp_cmd->add_option("--csv", exp.csv);

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n\n" << app.help();
    return 2;
  }

  try {
    if (exp_cmd->parsed() && exp.model == "tree" && exp.plan.empty()) {
      std::cerr << "error: --model tree requires --plan\n\n" << exp_cmd->help();
      return 2;
    }
    if (prb_cmd->parsed() && prb.graph == "generated" && prb.params.n == 0) {
      std::cerr << "error: probe on a generated graph requires --n and --delta\n\n"
                << prb_cmd->help();
      return 2;
    }
    if (gen_cmd->parsed()) run_generate(gen);
    if (est_cmd->parsed()) run_estimate(est);
    if (dis_cmd->parsed()) run_distinguish(dis);
    if (prb_cmd->parsed()) run_probe(prb);
    if (exp_cmd->parsed()) run_experiment_cmd(exp);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
