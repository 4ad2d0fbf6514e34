#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "roundcover/instance.hpp"
#include "roundcover/parca.hpp"
#include "roundcover/setbased.hpp"
#include "roundcover/sparca.hpp"
#include "roundcover/transcript.hpp"

namespace roundcover {

enum class Algorithm { kSsc, kNsc, kNsc2r, kSetSmall, kSetLarge };

std::string algorithm_name(Algorithm a);
Algorithm parse_algorithm(const std::string& name);  // ssc, nsc, nsc2r, set-small, set-large

struct SolverOptions {
  Algorithm algorithm = Algorithm::kSsc;
  ParcaConfig parca;      // delta is ignored; rounds fix it
  Rational eta{1, 5};     // set-small
  std::size_t mu_trials = 200;
  std::uint64_t seed = 0;  // set-based round-cost estimation
};

// Per-worker list and estimate caches; every entry is a pure function of
// its key, so sharing them never changes a result.
struct SolverCaches {
  ParcaListCache parca;
  SparcaListCache sparca;
  SetBasedCache set_based;
};

// Throws InputError when the algorithm does not fit the instance's model.
void check_compatible(const Instance& instance, Algorithm a);

// One run of the selected r-round algorithm against `oracle`.
PolicyTranscript solve_once(const Instance& instance, const SolverOptions& options, int r, RealizationSource& oracle,
                            SolverCaches* caches = nullptr);

enum class EvalMode { kAuto, kMonteCarlo, kExhaustive };

struct ExperimentSpec {
  std::string instance_path;  // reported only
  SolverOptions solver;
  int r_min = 1;
  int r_max = 1;
  std::size_t trials = 20;
  std::uint64_t seed = 0;
  EvalMode mode = EvalMode::kAuto;  // auto: exhaustive for scenario instances with s <= 256
  bool lb_offline = false;
  bool lb_entropy = false;
  unsigned workers = 0;  // 0: hardware concurrency
};

struct TrialRecord {
  std::uint64_t seed = 0;         // Monte Carlo realization seed, or the scenario id when exhaustive
  std::uint64_t digest = 0;       // realization digest (common random numbers check)
  Rational weight;                // 1/T, or p_w when exhaustive
  Cost cost = 0;
  bool covered = false;
  std::size_t rounds = 0;
  std::optional<Cost> offline;    // offline optimum of this trial's realization
};

struct RoundsRow {
  int r = 0;
  Rational mean_exact;            // weighted mean cost
  double mean_cost = 0;
  double stderr_cost = 0;         // 0 when exhaustive
  double coverage_rate = 0;
  std::optional<double> lb_offline;
  bool lb_offline_exact = true;
  std::optional<double> lb_entropy;
  bool lb_entropy_heuristic = false;
  std::size_t trials = 0;
  std::size_t max_rounds_used = 0;
  std::size_t offline_violations = 0;  // trials with cost < offline optimum
  std::vector<std::string> deltas;     // effective delta per round, first trial
  std::vector<TrialRecord> per_trial;
};

struct ExperimentReport {
  std::string instance_path;
  std::string model;
  std::string algorithm;
  std::uint64_t seed = 0;
  bool exhaustive = false;
  std::size_t scenarios = 0;
  std::size_t items = 0;
  std::vector<RoundsRow> rows;
  double wall_seconds = 0;  // not part of the canonical report
};

ExperimentReport run_experiment(const ExperimentSpec& spec, const Instance& instance);

struct OfflineSummary {
  Rational mean_exact;
  double mean = 0;
  bool exact = true;
  bool exhaustive = false;
  std::size_t trials = 0;
};

// Mean offline optimum over the realizations run_experiment would use.
OfflineSummary offline_lower_bound(const Instance& instance, std::size_t trials, std::uint64_t seed, EvalMode mode,
                                   unsigned workers);

// Canonical JSON: sorted keys, no timing unless asked for.
std::string report_to_json(const ExperimentReport& report, bool include_timing = false, bool include_trials = true);

// r,mean_cost,stderr,coverage_rate,lb_offline,lb_entropy,trials with 12
// significant digits; empty cells for bounds that were not computed.
std::string report_to_csv(const ExperimentReport& report);
void emit_csv(const ExperimentReport& report, const std::string& path);

std::string format_g12(double x);
std::string csv_field(const std::string& s);  // RFC 4180 quoting when needed

}  // namespace roundcover
