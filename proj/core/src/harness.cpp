#include "roundcover/harness.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <memory>

#include <json.hpp>

#include "roundcover/instance_io.hpp"
#include "roundcover/oracles.hpp"
#include "roundcover/parallel.hpp"

namespace roundcover {

std::string algorithm_name(Algorithm a) {
  switch (a) {
    case Algorithm::kSsc: return "ssc";
    case Algorithm::kNsc: return "nsc";
    case Algorithm::kNsc2r: return "nsc2r";
    case Algorithm::kSetSmall: return "set-small";
    case Algorithm::kSetLarge: return "set-large";
  }
  return "?";
}

Algorithm parse_algorithm(const std::string& name) {
  for (Algorithm a : {Algorithm::kSsc, Algorithm::kNsc, Algorithm::kNsc2r, Algorithm::kSetSmall, Algorithm::kSetLarge}) {
    if (algorithm_name(a) == name) return a;
  }
  throw InputError("unknown algorithm '" + name + "'");
}

void check_compatible(const Instance& instance, Algorithm a) {
  const bool scenario = std::holds_alternative<ScenarioInstance>(instance);
  if (a == Algorithm::kSsc && scenario) throw InputError("ssc needs an independent instance");
  if ((a == Algorithm::kNsc || a == Algorithm::kNsc2r) && !scenario) {
    throw InputError(algorithm_name(a) + " needs a scenario instance");
  }
}

PolicyTranscript solve_once(const Instance& instance, const SolverOptions& options, int r, RealizationSource& oracle,
                            SolverCaches* caches) {
  check_compatible(instance, options.algorithm);
  if (options.algorithm == Algorithm::kSetSmall || options.algorithm == Algorithm::kSetLarge) {
    SetRoundPolicy policy;
    policy.mode = options.algorithm == Algorithm::kSetSmall ? SetMode::kSmallR : SetMode::kLargeR;
    policy.rounds = r;
    policy.eta = options.eta;
    policy.mu_trials = options.mu_trials;
    policy.seed = options.seed;
    policy.parca = options.parca;
    SetBasedCache* cache = caches ? &caches->set_based : nullptr;
    return std::visit([&](const auto& inst) { return run_set_based(policy, inst, oracle, cache).transcript; },
                      instance);
  }
  if (const auto* ind = std::get_if<IndependentInstance>(&instance)) {
    return ssc_solve(r, *ind, oracle, options.parca, caches ? &caches->parca : nullptr);
  }
  const auto& scn = std::get<ScenarioInstance>(instance);
  SparcaListCache* cache = caches ? &caches->sparca : nullptr;
  if (options.algorithm == Algorithm::kNsc) return nsc_solve(r, scn, oracle, cache);
  return nsc2r_solve(r, scn, oracle, cache);
}

namespace {

std::vector<Cost> item_costs(const Instance& instance) {
  return std::visit(
      [](const auto& inst) {
        std::vector<Cost> costs;
        for (const auto& item : inst.items()) costs.push_back(item.cost);
        return costs;
      },
      instance);
}

bool use_exhaustive(const Instance& instance, EvalMode mode) {
  const auto* scn = std::get_if<ScenarioInstance>(&instance);
  if (mode == EvalMode::kExhaustive && !scn) throw InputError("exhaustive evaluation needs a scenario instance");
  return mode == EvalMode::kExhaustive || (mode == EvalMode::kAuto && scn && scn->scenario_count() <= 256);
}

// Realizations are fixed per trial index and shared by every r.
std::vector<TrialRecord> trial_plan(const Instance& instance, bool exhaustive, std::size_t trials,
                                    std::uint64_t seed) {
  const auto* ind = std::get_if<IndependentInstance>(&instance);
  const auto* scn = std::get_if<ScenarioInstance>(&instance);
  if (exhaustive) trials = scn->scenario_count();
  std::vector<TrialRecord> base(trials);
  for (std::size_t t = 0; t < trials; ++t) {
    TrialRecord& rec = base[t];
    if (exhaustive) {
      rec.seed = t;
      rec.weight = scn->probability(static_cast<ScenarioId>(t));
      rec.digest = realization_digest(static_cast<ScenarioId>(t));
      continue;
    }
    const std::uint64_t s = trial_seed(seed, t);
    rec.weight = Rational(BigInt(1), BigInt(static_cast<unsigned long>(trials)));
    if (ind) {
      rec.seed = s;
      rec.digest = realization_digest(*ind, s);
    } else {
      Rng rng(s);
      rec.seed = scn->sample_scenario(rng);
      rec.digest = realization_digest(static_cast<ScenarioId>(rec.seed));
    }
  }
  return base;
}

// Returns whether every offline optimum is exact.
bool fill_offline(const Instance& instance, std::vector<TrialRecord>& base, unsigned workers) {
  const auto* ind = std::get_if<IndependentInstance>(&instance);
  const auto* scn = std::get_if<ScenarioInstance>(&instance);
  std::vector<OfflineResult> off(base.size());
  parallel_for(base.size(), workers, [&](std::size_t t, unsigned) {
    if (ind) {
      off[t] = offline_optimal(*ind, SampledRealization::materialize(*ind, base[t].seed));
    } else {
      off[t] = offline_optimal(*scn, static_cast<ScenarioId>(base[t].seed));
    }
  });
  bool exact = true;
  for (std::size_t t = 0; t < base.size(); ++t) {
    base[t].offline = off[t].cost;
    exact = exact && off[t].exact;
  }
  return exact;
}

}  // namespace

OfflineSummary offline_lower_bound(const Instance& instance, std::size_t trials, std::uint64_t seed, EvalMode mode,
                                   unsigned workers) {
  if (trials < 1) throw InputError("trials must be >= 1");
  OfflineSummary out;
  out.exhaustive = use_exhaustive(instance, mode);
  std::vector<TrialRecord> base = trial_plan(instance, out.exhaustive, trials, seed);
  out.exact = fill_offline(instance, base, workers ? workers : default_workers());
  out.trials = base.size();
  out.mean_exact = 0;
  for (const auto& rec : base) out.mean_exact += rec.weight * Rational(*rec.offline);
  out.mean = out.mean_exact.get_d();
  return out;
}

ExperimentReport run_experiment(const ExperimentSpec& spec, const Instance& instance) {
  const auto start = std::chrono::steady_clock::now();
  check_compatible(instance, spec.solver.algorithm);
  if (spec.r_min < 1) throw InputError("rounds must start at 1 or above");
  if (spec.trials < 1) throw InputError("trials must be >= 1");
  const auto* ind = std::get_if<IndependentInstance>(&instance);
  const auto* scn = std::get_if<ScenarioInstance>(&instance);

  ExperimentReport report;
  report.instance_path = spec.instance_path;
  report.model = model_name(instance);
  report.algorithm = algorithm_name(spec.solver.algorithm);
  report.seed = spec.seed;
  report.items = ind ? ind->item_count() : scn->item_count();
  report.scenarios = scn ? scn->scenario_count() : 0;
  report.exhaustive = use_exhaustive(instance, spec.mode);

  const unsigned workers = spec.workers ? spec.workers : default_workers();
  const std::vector<Cost> costs = item_costs(instance);
  std::vector<TrialRecord> base = trial_plan(instance, report.exhaustive, spec.trials, spec.seed);
  const std::size_t trials = base.size();
  bool offline_exact = true;
  if (spec.lb_offline) offline_exact = fill_offline(instance, base, workers);
  std::optional<EntropyBound> entropy;
  if (spec.lb_entropy && scn) entropy = entropy_lower_bound(*scn);

  std::vector<std::unique_ptr<SolverCaches>> caches;
  for (unsigned w = 0; w < workers; ++w) caches.push_back(std::make_unique<SolverCaches>());

  for (int r = spec.r_min; r <= spec.r_max; ++r) {
    RoundsRow row;
    row.r = r;
    row.trials = trials;
    row.per_trial = base;
    std::vector<std::vector<std::string>> deltas(trials);
    parallel_for(trials, workers, [&](std::size_t t, unsigned w) {
      TrialRecord& rec = row.per_trial[t];
      std::unique_ptr<RealizationSource> oracle;
      if (ind) {
        oracle = std::make_unique<SampledRealization>(*ind, rec.seed);
      } else {
        oracle = std::make_unique<ScenarioRealization>(*scn, static_cast<ScenarioId>(rec.seed));
      }
      const PolicyTranscript tr = solve_once(instance, spec.solver, r, *oracle, caches[w].get());
      check_transcript(tr, costs);
      rec.cost = tr.total_cost;
      rec.covered = tr.covered;
      rec.rounds = tr.rounds_used();
      for (const auto& round : tr.rounds) deltas[t].push_back(round.delta);
    });
    if (trials > 0) row.deltas = deltas.front();

    Rational mean = 0;
    Rational coverage = 0;
    Rational offline = 0;
    for (const auto& rec : row.per_trial) {
      mean += rec.weight * Rational(rec.cost);
      if (rec.covered) coverage += rec.weight;
      if (rec.offline) {
        offline += rec.weight * Rational(*rec.offline);
        if (rec.covered && rec.cost < *rec.offline) ++row.offline_violations;
      }
      row.max_rounds_used = std::max(row.max_rounds_used, rec.rounds);
    }
    row.mean_exact = mean;
    row.mean_cost = mean.get_d();
    row.coverage_rate = coverage.get_d();
    if (!report.exhaustive && trials > 1) {
      long double ss = 0;
      for (const auto& rec : row.per_trial) {
        const long double d = static_cast<long double>(rec.cost) - static_cast<long double>(row.mean_cost);
        ss += d * d;
      }
      row.stderr_cost = static_cast<double>(std::sqrt(ss / static_cast<long double>(trials - 1) /
                                                      static_cast<long double>(trials)));
    }
    if (spec.lb_offline) {
      row.lb_offline = offline.get_d();
      row.lb_offline_exact = offline_exact;
    }
    if (entropy) {
      row.lb_entropy = entropy->bits;
      row.lb_entropy_heuristic = entropy->heuristic;
    }
    report.rows.push_back(std::move(row));
  }
  report.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

std::string report_to_json(const ExperimentReport& report, bool include_timing, bool include_trials) {
  using nlohmann::json;
  json j;
  j["instance"] = report.instance_path;
  j["model"] = report.model;
  j["algorithm"] = report.algorithm;
  j["seed"] = report.seed;
  j["evaluation"] = report.exhaustive ? "exhaustive" : "monte_carlo";
  j["items"] = report.items;
  if (report.model == "scenario") j["scenarios"] = report.scenarios;
  if (include_timing) j["wall_seconds"] = report.wall_seconds;
  json rows = json::array();
  for (const auto& row : report.rows) {
    json jr;
    jr["r"] = row.r;
    jr["mean_cost"] = row.mean_cost;
    jr["mean_cost_exact"] = to_string(row.mean_exact);
    jr["stderr"] = row.stderr_cost;
    jr["coverage_rate"] = row.coverage_rate;
    jr["trials"] = row.trials;
    jr["max_rounds_used"] = row.max_rounds_used;
    jr["deltas"] = row.deltas;
    if (row.lb_offline) {
      jr["lb_offline"] = *row.lb_offline;
      jr["lb_offline_exact"] = row.lb_offline_exact;
      jr["offline_violations"] = row.offline_violations;
    }
    if (row.lb_entropy) {
      jr["lb_entropy"] = *row.lb_entropy;
      jr["lb_entropy_heuristic"] = row.lb_entropy_heuristic;
    }
    if (include_trials) {
      json trials = json::array();
      for (const auto& rec : row.per_trial) {
        json jt;
        jt[report.exhaustive || report.model == "scenario" ? "scenario" : "seed"] = rec.seed;
        jt["digest"] = rec.digest;
        jt["cost"] = rec.cost;
        jt["covered"] = rec.covered;
        jt["rounds"] = rec.rounds;
        if (rec.offline) jt["offline"] = *rec.offline;
        trials.push_back(std::move(jt));
      }
      jr["per_trial"] = std::move(trials);
    }
    rows.push_back(std::move(jr));
  }
  j["rows"] = std::move(rows);
  return j.dump() + "\n";
}

std::string format_g12(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", x);
  return buf;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string report_to_csv(const ExperimentReport& report) {
  std::string out = "r,mean_cost,stderr,coverage_rate,lb_offline,lb_entropy,trials\r\n";
  for (const auto& row : report.rows) {
    const std::vector<std::string> cells{
        std::to_string(row.r),
        format_g12(row.mean_cost),
        format_g12(row.stderr_cost),
        format_g12(row.coverage_rate),
        row.lb_offline ? format_g12(*row.lb_offline) : "",
        row.lb_entropy ? format_g12(*row.lb_entropy) : "",
        std::to_string(row.trials),
    };
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out += ',';
      out += csv_field(cells[i]);
    }
    out += "\r\n";
  }
  return out;
}

void emit_csv(const ExperimentReport& report, const std::string& path) { write_text_file(path, report_to_csv(report)); }

}  // namespace roundcover
