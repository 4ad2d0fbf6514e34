#include <gtest/gtest.h>

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "roundcover/generators.hpp"
#include "roundcover/harness.hpp"
#include "roundcover/instance_io.hpp"
#include "support.hpp"

namespace {

using namespace roundcover;

ExperimentSpec spec_for(Algorithm a, int r_min, int r_max, std::size_t trials, EvalMode mode) {
  ExperimentSpec spec;
  spec.solver.algorithm = a;
  spec.r_min = r_min;
  spec.r_max = r_max;
  spec.trials = trials;
  spec.seed = 42;
  spec.mode = mode;
  spec.workers = 1;
  return spec;
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, sep)) out.push_back(cell);
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

TEST(Experiment, DeterministicInstanceHasZeroStderr) {
  const std::size_t n = 3;
  const IndependentInstance inst(std::make_shared<TruncatedCoverage>(n, 3),
                                 {{2, {{ElementSet(n, {0, 1}), Rational(1)}}}, {5, {{ElementSet(n, {2}), Rational(1)}}}});
  const auto rep = run_experiment(spec_for(Algorithm::kSsc, 1, 3, 30, EvalMode::kAuto), inst);
  EXPECT_FALSE(rep.exhaustive);
  for (const auto& row : rep.rows) {
    EXPECT_EQ(row.mean_exact, 7);
    EXPECT_EQ(row.stderr_cost, 0);
    EXPECT_EQ(row.coverage_rate, 1);
  }
}

TEST(Experiment, ExhaustiveMeanIsProbabilityWeighted) {
  const auto inst = gen_odt(8, 6, 0.5, CostMode::kRandom, 11);
  ASSERT_EQ(inst.scenario_count(), 8u);
  const Instance wrapped = inst;
  SolverOptions opts;
  opts.algorithm = Algorithm::kNsc;
  Rational expected = 0;
  for (ScenarioId w = 0; w < 8; ++w) {
    ScenarioRealization oracle(inst, w);
    expected += inst.probability(w) * solve_once(wrapped, opts, 2, oracle).total_cost;
  }
  const auto ex = run_experiment(spec_for(Algorithm::kNsc, 2, 2, 1, EvalMode::kAuto), wrapped);
  ASSERT_TRUE(ex.exhaustive);
  EXPECT_EQ(ex.rows[0].mean_exact, expected);
  EXPECT_EQ(ex.rows[0].stderr_cost, 0);
  EXPECT_EQ(ex.rows[0].trials, 8u);

  const auto mc = run_experiment(spec_for(Algorithm::kNsc, 2, 2, 500, EvalMode::kMonteCarlo), wrapped);
  ASSERT_FALSE(mc.exhaustive);
  EXPECT_GT(mc.rows[0].stderr_cost, 0);
  EXPECT_LE(std::abs(mc.rows[0].mean_cost - expected.get_d()), 3 * mc.rows[0].stderr_cost);
}

TEST(Experiment, MoreRoundsHelpOnOdt) {
  const Instance inst = gen_odt(64, 24, 0.5, CostMode::kUnit, 2);
  auto spec = spec_for(Algorithm::kNsc, 1, 6, 400, EvalMode::kMonteCarlo);
  const auto rep = run_experiment(spec, inst);
  const auto& r1 = rep.rows.front();
  const auto& r6 = rep.rows.back();
  EXPECT_EQ(r6.r, 6);
  const double se = std::sqrt(r1.stderr_cost * r1.stderr_cost + r6.stderr_cost * r6.stderr_cost);
  EXPECT_GT(r1.mean_cost - r6.mean_cost, 2 * se);
}

TEST(Experiment, CommonRandomNumbersAcrossRounds) {
  Rng rng(19);
  const Instance inst = rctest::random_independent(rng);
  const auto rep = run_experiment(spec_for(Algorithm::kSsc, 1, 4, 25, EvalMode::kAuto), inst);
  ASSERT_EQ(rep.rows.size(), 4u);
  for (const auto& row : rep.rows) {
    ASSERT_EQ(row.per_trial.size(), 25u);
    for (std::size_t t = 0; t < 25; ++t) {
      EXPECT_EQ(row.per_trial[t].digest, rep.rows[0].per_trial[t].digest);
      EXPECT_EQ(row.per_trial[t].seed, rep.rows[0].per_trial[t].seed);
    }
  }
}

TEST(Experiment, ReportIndependentOfWorkerCount) {
  const Instance inst = gen_odt(40, 10, 0.5, CostMode::kRandom, 5);
  auto spec = spec_for(Algorithm::kNsc2r, 1, 3, 60, EvalMode::kMonteCarlo);
  spec.lb_offline = true;
  const std::string one = report_to_json(run_experiment(spec, inst));
  spec.workers = 3;
  EXPECT_EQ(report_to_json(run_experiment(spec, inst)), one);
  spec.solver.algorithm = Algorithm::kSetLarge;
  spec.workers = 1;
  const std::string set_one = report_to_json(run_experiment(spec, inst));
  spec.workers = 4;
  EXPECT_EQ(report_to_json(run_experiment(spec, inst)), set_one);
}

TEST(ExperimentProperty, OfflineBoundNeverExceedsPolicyCost) {
  Rng rng(23);
  for (int rep = 0; rep < 10; ++rep) {
    const Instance scn = rctest::random_scenario(rng);
    const Instance ind = rctest::random_independent(rng);
    auto spec = spec_for(Algorithm::kNsc, 1, 3, 40, EvalMode::kAuto);
    spec.lb_offline = true;
    spec.lb_entropy = true;
    for (const auto& [inst, algo] : {std::pair{&scn, Algorithm::kNsc}, std::pair{&ind, Algorithm::kSsc}}) {
      spec.solver.algorithm = algo;
      const auto report = run_experiment(spec, *inst);
      for (const auto& row : report.rows) {
        ASSERT_TRUE(row.lb_offline.has_value());
        EXPECT_LE(*row.lb_offline, row.mean_cost + 1e-9);
        EXPECT_EQ(row.offline_violations, 0u);
        EXPECT_EQ(row.lb_entropy.has_value(), inst == &scn);
      }
    }
  }
}

TEST(Experiment, OfflineSummaryMatchesRows) {
  const Instance inst = gen_odt(16, 8, 0.5, CostMode::kRandom, 9);
  auto spec = spec_for(Algorithm::kNsc, 1, 1, 1, EvalMode::kAuto);
  spec.lb_offline = true;
  const auto rep = run_experiment(spec, inst);
  const auto summary = offline_lower_bound(inst, 1, 42, EvalMode::kAuto, 1);
  EXPECT_TRUE(summary.exhaustive);
  EXPECT_DOUBLE_EQ(summary.mean, *rep.rows[0].lb_offline);
}

TEST(Experiment, RejectsBadSpecs) {
  const Instance ind = motivating_example(3);
  EXPECT_THROW(check_compatible(ind, Algorithm::kNsc), InputError);
  EXPECT_THROW(run_experiment(spec_for(Algorithm::kNsc2r, 1, 1, 5, EvalMode::kAuto), ind), InputError);
  EXPECT_THROW(run_experiment(spec_for(Algorithm::kSsc, 1, 1, 5, EvalMode::kExhaustive), ind), InputError);
  EXPECT_THROW(run_experiment(spec_for(Algorithm::kSsc, 0, 1, 5, EvalMode::kAuto), ind), InputError);
  EXPECT_THROW(run_experiment(spec_for(Algorithm::kSsc, 1, 1, 0, EvalMode::kAuto), ind), InputError);
  const Instance scn = gen_odt(4, 3, 0.5, CostMode::kUnit, 1);
  EXPECT_THROW(check_compatible(scn, Algorithm::kSsc), InputError);
  EXPECT_NO_THROW(check_compatible(scn, Algorithm::kSetSmall));
  EXPECT_NO_THROW(check_compatible(ind, Algorithm::kSetLarge));
}

TEST(Algorithms, NamesRoundTrip) {
  for (Algorithm a : {Algorithm::kSsc, Algorithm::kNsc, Algorithm::kNsc2r, Algorithm::kSetSmall, Algorithm::kSetLarge}) {
    EXPECT_EQ(parse_algorithm(algorithm_name(a)), a);
  }
  EXPECT_EQ(parse_algorithm("set-small"), Algorithm::kSetSmall);
  EXPECT_THROW(parse_algorithm("greedy"), InputError);
}

TEST(Csv, EmptyRangeGivesHeaderOnly) {
  const Instance inst = motivating_example(2);
  const auto rep = run_experiment(spec_for(Algorithm::kSsc, 3, 2, 5, EvalMode::kAuto), inst);
  EXPECT_TRUE(rep.rows.empty());
  EXPECT_EQ(report_to_csv(rep), "r,mean_cost,stderr,coverage_rate,lb_offline,lb_entropy,trials\r\n");
}

TEST(Csv, FieldQuoting) {
  EXPECT_EQ(csv_field("plain"), "plain");
  EXPECT_EQ(csv_field("a,b"), "\"a,b\"");
  EXPECT_EQ(csv_field("say \"hi\""), "\"say \"\"hi\"\"\"");
  EXPECT_EQ(csv_field("two\nlines"), "\"two\nlines\"");
  EXPECT_EQ(format_g12(1.0 / 3), "0.333333333333");
  EXPECT_EQ(format_g12(2), "2");
}

TEST(Csv, RoundTripsAtTwelveDigits) {
  const Instance inst = gen_odt(30, 9, 0.5, CostMode::kRandom, 4);
  auto spec = spec_for(Algorithm::kNsc, 1, 4, 50, EvalMode::kMonteCarlo);
  spec.lb_offline = true;
  const auto rep = run_experiment(spec, inst);
  std::stringstream in(report_to_csv(rep));
  std::string line;
  std::getline(in, line);
  std::size_t k = 0;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto cells = split(line, ',');
    ASSERT_EQ(cells.size(), 7u);
    const auto& row = rep.rows.at(k++);
    EXPECT_EQ(std::stoi(cells[0]), row.r);
    EXPECT_NEAR(std::stod(cells[1]), row.mean_cost, 1e-11 * row.mean_cost);
    EXPECT_NEAR(std::stod(cells[2]), row.stderr_cost, 1e-11 * row.stderr_cost + 1e-300);
    EXPECT_NEAR(std::stod(cells[4]), *row.lb_offline, 1e-11 * *row.lb_offline);
    EXPECT_TRUE(cells[5].empty());
    EXPECT_EQ(std::stoul(cells[6]), row.trials);
  }
  EXPECT_EQ(k, rep.rows.size());
}

TEST(Csv, MatchesGoldenFile) {
  const Instance inst = gen_odt(12, 6, 0.5, CostMode::kRandom, 3);
  auto spec = spec_for(Algorithm::kNsc, 1, 3, 1, EvalMode::kAuto);
  spec.lb_offline = true;
  spec.lb_entropy = true;
  const std::string csv = report_to_csv(run_experiment(spec, inst));
  const std::string path = std::string(ROUNDCOVER_GOLDEN_DIR) + "/odt12_nsc.csv";
  if (std::getenv("ROUNDCOVER_UPDATE_GOLDEN")) {
    std::ofstream(path, std::ios::binary) << csv;
  }
  std::ifstream file(path, std::ios::binary);
  ASSERT_TRUE(file) << path;
  std::stringstream golden;
  golden << file.rdbuf();
  EXPECT_EQ(csv, golden.str());
}

TEST(Json, CanonicalAndStable) {
  const Instance inst = gen_odt(10, 5, 0.5, CostMode::kUnit, 8);
  const auto rep = run_experiment(spec_for(Algorithm::kNsc, 1, 2, 1, EvalMode::kAuto), inst);
  const std::string j = report_to_json(rep);
  EXPECT_EQ(j, report_to_json(run_experiment(spec_for(Algorithm::kNsc, 1, 2, 1, EvalMode::kAuto), inst)));
  EXPECT_EQ(j.find("wall_seconds"), std::string::npos);
  EXPECT_NE(report_to_json(rep, true).find("wall_seconds"), std::string::npos);
  EXPECT_EQ(report_to_json(rep, false, false).find("per_trial"), std::string::npos);
  EXPECT_LT(j.find("\"algorithm\""), j.find("\"evaluation\""));
  EXPECT_LT(j.find("\"evaluation\""), j.find("\"instance\""));
}

}  // namespace
