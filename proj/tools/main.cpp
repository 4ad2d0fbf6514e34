#include <cstdio>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "roundcover/generators.hpp"
#include "roundcover/harness.hpp"
#include "roundcover/instance_io.hpp"
#include "roundcover/oracles.hpp"

using namespace roundcover;

namespace {

struct RoundRange {
  int lo = 1;
  int hi = 1;
};

RoundRange parse_rounds(const std::string& text) {
  RoundRange range;
  const auto dots = text.find("..");
  try {
    if (dots == std::string::npos) {
      range.lo = range.hi = std::stoi(text);
    } else {
      range.lo = std::stoi(text.substr(0, dots));
      range.hi = std::stoi(text.substr(dots + 2));
    }
  } catch (const std::exception&) {
    throw InputError("--rounds expects r or a..b, got '" + text + "'");
  }
  if (range.lo < 1) throw InputError("--rounds must start at 1 or above");
  return range;
}

CostMode parse_cost_mode(const std::string& s) {
  if (s == "unit") return CostMode::kUnit;
  if (s == "random") return CostMode::kRandom;
  throw InputError("--costs expects unit or random");
}

void write_output(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
  } else {
    write_text_file(path, text);
  }
}

struct SolverFlags {
  std::string algo = "auto";
  std::string set_based;
  std::string sampler = "exact";
  std::uint64_t samples = 0;
  double sample_constant = 4.0;
  std::string eta = "1/5";
  std::size_t mu_trials = 200;

  void attach(CLI::App* cmd) {
    cmd->add_option("--algo", algo, "ssc, nsc, nsc2r (default: ssc or nsc by model)");
    cmd->add_option("--set-based", set_based, "small or large: run the set-based conversion instead");
    cmd->add_option("--sampler", sampler, "exact or sampled ParCA scores");
    cmd->add_option("--samples", samples, "K for the sampled scorer (0: default)");
    cmd->add_option("--sample-constant", sample_constant, "C in the default K");
    cmd->add_option("--eta", eta, "failure probability for --set-based small");
    cmd->add_option("--mu-trials", mu_trials, "simulations per round-cost estimate");
  }

  SolverOptions build(const Instance& instance, std::uint64_t seed) const {
    SolverOptions o;
    if (!set_based.empty()) {
      if (set_based == "small") {
        o.algorithm = Algorithm::kSetSmall;
      } else if (set_based == "large") {
        o.algorithm = Algorithm::kSetLarge;
      } else {
        throw InputError("--set-based expects small or large");
      }
    } else if (algo == "auto") {
      o.algorithm = std::holds_alternative<IndependentInstance>(instance) ? Algorithm::kSsc : Algorithm::kNsc;
    } else {
      o.algorithm = parse_algorithm(algo);
    }
    if (sampler == "exact") {
      o.parca.sampler = Sampler::kExact;
    } else if (sampler == "sampled") {
      o.parca.sampler = Sampler::kSampled;
    } else {
      throw InputError("--sampler expects exact or sampled");
    }
    o.parca.samples = samples;
    o.parca.sample_constant = sample_constant;
    o.parca.seed = seed;
    o.eta = parse_rational(eta);
    o.mu_trials = mu_trials;
    o.seed = seed;
    return o;
  }
};

int run(int argc, char** argv) {
  CLI::App app{"Limited-adaptivity stochastic submodular cover"};
  app.require_subcommand(1);

  // generate
  auto* gen = app.add_subcommand("generate", "write a generated instance");
  std::string kind;
  std::string out;
  std::uint64_t seed = 0;
  std::string edges_path, table_path, costs = "unit", delta = "1/2";
  std::size_t nodes = 50, samples = 500, top_k = 0, s = 64, m = 24, filters = 10, queries = 5, query_size = 3;
  std::size_t scenarios = 8, items = 6;
  double p = 0.1, edge_p = 0.05;
  int ell = 2, depth = 2;
  long long max_value = 5, q = 10;
  gen->add_option("--kind", kind, "graph, odt, odt-table, hard, filter, knapsack")->required();
  gen->add_option("--out", out, "output path (default stdout)");
  gen->add_option("--seed", seed);
  gen->add_option("--edges", edges_path, "graph: edge-list file (default: random graph)");
  gen->add_option("--nodes", nodes, "graph: nodes of the random graph");
  gen->add_option("--edge-p", edge_p, "graph: edge probability of the random graph");
  gen->add_option("--top-k", top_k, "graph: keep the k nodes of largest out-degree");
  gen->add_option("--samples", samples, "graph: sampled neighbourhoods per node");
  gen->add_option("--delta", delta, "graph: Q = ceil(delta * n)");
  gen->add_option("--p", p, "graph: neighbour probability; odt: test density");
  gen->add_option("--s", s, "odt: scenarios");
  gen->add_option("--m", m, "odt: tests");
  gen->add_option("--costs", costs, "odt: unit or random");
  gen->add_option("--table", table_path, "odt-table: CSV of 0/1/?");
  gen->add_option("--ell", ell, "hard: bits per level");
  gen->add_option("--r", depth, "hard: depth");
  gen->add_option("--filters", filters, "filter: filter count");
  gen->add_option("--queries", queries, "filter: query count");
  gen->add_option("--query-size", query_size, "filter: filters per query");
  gen->add_option("--scenarios", scenarios, "knapsack: scenarios");
  gen->add_option("--items", items, "knapsack: items");
  gen->add_option("--max-value", max_value, "knapsack: largest item value");
  gen->add_option("--q", q, "knapsack: target Q");

  // solve
  auto* solve = app.add_subcommand("solve", "run one policy and print its transcript");
  std::string instance_path;
  std::string model;
  int rounds = 1;
  long long scenario = -1;
  SolverFlags solver_flags;
  solve->add_option("--instance", instance_path)->required();
  solve->add_option("--model", model, "independent or scenario (checked against the file)");
  solve->add_option("--rounds", rounds)->required();
  solve->add_option("--seed", seed);
  solve->add_option("--scenario", scenario, "scenario model: hidden scenario (default: sampled from --seed)");
  solve->add_option("--out", out);
  solver_flags.attach(solve);

  // evaluate / bench
  auto* evaluate = app.add_subcommand("evaluate", "expected cost over a range of rounds");
  auto* bench = app.add_subcommand("bench", "time an evaluation");
  std::string rounds_text = "1";
  std::size_t trials = 20;
  unsigned workers = 0;
  bool exhaustive = false, monte_carlo = false, timing = false, per_trial = false;
  std::vector<std::string> lb_kinds;
  std::string csv_path;
  for (auto* cmd : {evaluate, bench}) {
    cmd->add_option("--instance", instance_path)->required();
    cmd->add_option("--rounds", rounds_text, "r or a..b");
    cmd->add_option("--trials", trials);
    cmd->add_option("--seed", seed);
    cmd->add_option("--workers", workers, "0: hardware concurrency");
    cmd->add_flag("--exhaustive", exhaustive, "enumerate every scenario");
    cmd->add_flag("--monte-carlo", monte_carlo, "sample trials even when s is small");
    cmd->add_option("--lb", lb_kinds, "offline, entropy")->delimiter(',');
    cmd->add_option("--out", out, "report JSON path");
    cmd->add_option("--csv", csv_path, "CSV path");
    cmd->add_flag("--timing", timing, "include wall-clock time in the report");
    cmd->add_flag("--per-trial", per_trial, "include per-trial records in the report");
  }
  SolverFlags eval_flags;
  eval_flags.attach(evaluate);
  eval_flags.attach(bench);

  // lowerbound
  auto* lower = app.add_subcommand("lowerbound", "offline, adaptive or entropy lower bound");
  std::string lb_kind;
  lower->add_option("--instance", instance_path)->required();
  lower->add_option("--kind", lb_kind, "offline, adaptive or entropy")->required();
  lower->add_option("--trials", trials, "offline, independent model: sampled realizations");
  lower->add_option("--seed", seed);
  lower->add_option("--out", out);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  if (gen->parsed()) {
    Instance inst = [&]() -> Instance {
      if (kind == "graph") {
        Graph g = edges_path.empty() ? random_graph(nodes, edge_p, seed) : parse_edge_list(read_text_file(edges_path));
        if (top_k > 0) g = top_out_degree_subgraph(g, top_k);
        return gen_graph_coverage(g, p, samples, parse_rational(delta), seed);
      }
      if (kind == "odt") return gen_odt(s, m, p, parse_cost_mode(costs), seed);
      if (kind == "odt-table") {
        if (table_path.empty()) throw InputError("odt-table needs --table");
        return gen_odt_from_table(parse_test_table(read_text_file(table_path)), parse_cost_mode(costs), seed);
      }
      if (kind == "hard") return gen_hard_instance(ell, depth);
      if (kind == "filter") return random_filter_eval(filters, queries, query_size, seed);
      if (kind == "knapsack") return random_correlated_knapsack(scenarios, items, max_value, q, seed);
      throw InputError("unknown generator kind '" + kind + "'");
    }();
    write_output(out, serialize_instance(inst));
    return 0;
  }

  const Instance instance = load_instance(instance_path);

  if (solve->parsed()) {
    if (!model.empty() && model != model_name(instance)) {
      throw InputError("--model " + model + " but the instance is " + model_name(instance));
    }
    const SolverOptions options = solver_flags.build(instance, seed);
    PolicyTranscript t;
    if (const auto* ind = std::get_if<IndependentInstance>(&instance)) {
      SampledRealization oracle(*ind, seed);
      t = solve_once(instance, options, rounds, oracle);
    } else {
      const auto& scn = std::get<ScenarioInstance>(instance);
      ScenarioId w = 0;
      if (scenario >= 0) {
        w = static_cast<ScenarioId>(scenario);
      } else {
        Rng rng(seed);
        w = scn.sample_scenario(rng);
      }
      ScenarioRealization oracle(scn, w);
      t = solve_once(instance, options, rounds, oracle);
    }
    write_output(out, transcript_to_json(t));
    return 0;
  }

  if (evaluate->parsed() || bench->parsed()) {
    if (exhaustive && monte_carlo) throw InputError("--exhaustive and --monte-carlo exclude each other");
    ExperimentSpec spec;
    spec.instance_path = instance_path;
    spec.solver = eval_flags.build(instance, seed);
    const RoundRange range = parse_rounds(rounds_text);
    spec.r_min = range.lo;
    spec.r_max = range.hi;
    spec.trials = trials;
    spec.seed = seed;
    spec.workers = workers;
    spec.mode = exhaustive ? EvalMode::kExhaustive : monte_carlo ? EvalMode::kMonteCarlo : EvalMode::kAuto;
    for (const auto& k : lb_kinds) {
      if (k == "offline") {
        spec.lb_offline = true;
      } else if (k == "entropy") {
        spec.lb_entropy = true;
      } else {
        throw InputError("--lb expects offline or entropy");
      }
    }
    const ExperimentReport report = run_experiment(spec, instance);
    if (!csv_path.empty()) emit_csv(report, csv_path);
    if (bench->parsed()) {
      std::printf("wall_seconds %.6f\n", report.wall_seconds);
      std::cout << report_to_csv(report);
      if (!out.empty()) write_text_file(out, report_to_json(report, true, per_trial));
    } else {
      write_output(out, report_to_json(report, timing, per_trial));
    }
    return 0;
  }

  if (lower->parsed()) {
    nlohmann::json j;
    j["kind"] = lb_kind;
    if (lb_kind == "adaptive") {
      const Rational opt = std::holds_alternative<ScenarioInstance>(instance)
                               ? optimal_adaptive_scenario(std::get<ScenarioInstance>(instance))
                               : optimal_adaptive_independent(std::get<IndependentInstance>(instance));
      j["value_exact"] = to_string(opt);
      j["value"] = opt.get_d();
    } else if (lb_kind == "entropy") {
      const auto* scn = std::get_if<ScenarioInstance>(&instance);
      if (!scn) throw InputError("the entropy bound needs a scenario instance");
      const EntropyBound b = entropy_lower_bound(*scn);
      j["value"] = b.bits;
      j["form"] = b.kind;
      j["heuristic"] = b.heuristic;
    } else if (lb_kind == "offline") {
      const OfflineSummary summary = offline_lower_bound(instance, trials, seed, EvalMode::kAuto, 0);
      j["value"] = summary.mean;
      j["value_exact"] = to_string(summary.mean_exact);
      j["exact"] = summary.exact;
      j["trials"] = summary.trials;
      j["evaluation"] = summary.exhaustive ? "exhaustive" : "monte_carlo";
    } else {
      throw InputError("--kind expects offline, adaptive or entropy");
    }
    write_output(out, j.dump() + "\n");
    return 0;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const InputError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return 2;
  } catch (const InfeasibleError& e) {
    std::cerr << "infeasible: " << e.what() << "\n";
    return 3;
  } catch (const InvariantViolation& e) {
    std::cerr << "invariant violation: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
