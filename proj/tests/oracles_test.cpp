#include <gtest/gtest.h>

#include <cmath>

#include "roundcover/generators.hpp"
#include "roundcover/oracles.hpp"
#include "roundcover/sparca.hpp"
#include "support.hpp"

namespace {

using namespace roundcover;

TEST(AdaptiveScenario, SingleScenarioSingleItem) {
  ScenarioItem it{3, {ElementSet(1, {0})}, OutcomeAssignment::dense({0})};
  const ScenarioInstance inst(std::make_shared<TruncatedCoverage>(1, 1), {it}, {Rational(1)});
  EXPECT_EQ(optimal_adaptive_scenario(inst), 3);
}

TEST(AdaptiveScenario, SmallestHardInstance) {
  // guessing a Z-item first beats reading Y: 1 + 1/2
  EXPECT_EQ(optimal_adaptive_scenario(gen_hard_instance(1, 1)), Rational(3, 2));
  EXPECT_EQ(rctest::brute_adaptive_scenario(gen_hard_instance(1, 1)), Rational(3, 2));
}

TEST(AdaptiveScenarioProperty, MatchesPlainRecursion) {
  Rng rng(71);
  for (int rep = 0; rep < 60; ++rep) {
    const auto inst = rctest::random_scenario(rng);
    EXPECT_EQ(optimal_adaptive_scenario(inst), rctest::brute_adaptive_scenario(inst));
  }
}

TEST(AdaptiveScenario, SizeGuard) {
  EXPECT_THROW(optimal_adaptive_scenario(gen_odt(20, 5, 0.5, CostMode::kUnit, 1)), SizeGuardError);
}

TEST(AdaptiveIndependent, DeterministicItem) {
  IndependentInstance inst(std::make_shared<TruncatedCoverage>(1, 1), {{5, {{ElementSet(1, {0}), Rational(1)}}}});
  EXPECT_EQ(optimal_adaptive_independent(inst), 5);
}

TEST(AdaptiveIndependent, TwoCoinsAndBackstop) {
  const auto coin = IndependentItem{1, {{ElementSet(1, {0}), Rational(1, 2)}, {ElementSet(1), Rational(1, 2)}}};
  const auto sure = IndependentItem{4, {{ElementSet(1, {0}), Rational(1)}}};
  IndependentInstance inst(std::make_shared<TruncatedCoverage>(1, 1), {coin, coin, sure});
  // coin, coin, then backstop: 1 + 1/2 (1 + 1/2 * 4) = 5/2
  EXPECT_EQ(optimal_adaptive_independent(inst), Rational(5, 2));
  EXPECT_EQ(rctest::brute_adaptive_independent(inst), Rational(5, 2));

  const auto dud = IndependentItem{1, {{ElementSet(1), Rational(1)}}};
  IndependentInstance with_dud(inst.objective(), {coin, coin, sure, dud});
  EXPECT_EQ(optimal_adaptive_independent(with_dud), Rational(5, 2));
}

TEST(AdaptiveIndependentProperty, MatchesPlainRecursion) {
  Rng rng(73);
  for (int rep = 0; rep < 60; ++rep) {
    rctest::IndependentShape shape;
    shape.max_items = 5;
    const auto inst = rctest::random_independent(rng, shape);
    EXPECT_EQ(optimal_adaptive_independent(inst), rctest::brute_adaptive_independent(inst));
  }
}

TEST(Offline, Examples) {
  TruncatedCoverage f(3, 3);
  const std::vector<ElementSet> real = {ElementSet(3, {0}), ElementSet(3, {0, 1, 2}), ElementSet(3, {1})};
  const std::vector<Cost> costs = {1, 1, 1};
  EXPECT_EQ(offline_optimal(f, real, costs).cost, 1);
  const std::vector<ElementSet> singles = {ElementSet(3, {0}), ElementSet(3, {1}), ElementSet(3, {2})};
  EXPECT_EQ(offline_optimal(f, singles, costs).cost, 3);
  const std::vector<ElementSet> short_sets = {ElementSet(3, {0}), ElementSet(3, {1})};
  const std::vector<Cost> two = {1, 1};
  EXPECT_THROW(offline_optimal(f, short_sets, two), InfeasibleError);
}

TEST(OfflineProperty, BranchAndBoundEqualsSubsetEnumeration) {
  Rng rng(79);
  for (int rep = 0; rep < 100; ++rep) {
    const std::size_t n = 4 + rng.uniform_index(8);
    const std::size_t m = 10;
    std::vector<ElementSet> real;
    std::vector<Cost> costs;
    ElementSet all(n);
    for (std::size_t i = 0; i < m; ++i) {
      real.push_back(rctest::random_subset(rng, n, 0.3));
      costs.push_back(static_cast<Cost>(1 + rng.uniform_index(9)));
      all |= real.back();
    }
    if (all.count() == 0) continue;
    const Value q = 1 + static_cast<Value>(rng.uniform_index(all.count()));
    TruncatedCoverage f(n, q);
    const auto res = offline_optimal(f, real, costs);
    EXPECT_TRUE(res.exact);
    EXPECT_EQ(res.cost, rctest::brute_offline(f, real, costs));
  }
}

TEST(OfflineProperty, NeverAboveAnyPolicyTranscript) {
  Rng rng(83);
  for (int rep = 0; rep < 20; ++rep) {
    const auto inst = rctest::random_scenario(rng);
    for (ScenarioId w = 0; w < inst.scenario_count(); ++w) {
      ScenarioRealization oracle(inst, w);
      EXPECT_LE(offline_optimal(inst, w).cost, nsc_solve(2, inst, oracle).total_cost);
    }
  }
}

TEST(Offline, LargeInstanceFallsBackToFractionalBound) {
  const std::size_t n = 60;
  std::vector<ElementSet> real;
  std::vector<Cost> costs;
  for (Element e = 0; e < n; ++e) {
    real.push_back(ElementSet(n, {e}));
    costs.push_back(2);
  }
  TruncatedCoverage f(n, 30);
  const auto res = offline_optimal(f, real, costs);
  EXPECT_FALSE(res.exact);
  EXPECT_LE(res.cost, 60);
}

TEST(Entropy, UniformAndGeneral) {
  ScenarioItem it{1, {ElementSet(1, {0})}, OutcomeAssignment::dense({0})};
  const ScenarioInstance one(std::make_shared<TruncatedCoverage>(1, 1), {it}, {Rational(1)});
  EXPECT_EQ(entropy_lower_bound(one).bits, 0);

  const auto odt4 = odt_from_matrix({{0, 0}, {0, 1}, {1, 0}, {1, 1}}, {1, 1}, {});
  const auto b = entropy_lower_bound(odt4);
  EXPECT_DOUBLE_EQ(b.bits, 2.0);
  EXPECT_EQ(b.kind, "log2(s)");
  EXPECT_FALSE(b.heuristic);

  std::vector<std::vector<bool>> rows;
  for (int i = 0; i < 415; ++i) {
    std::vector<bool> row;
    for (int j = 0; j < 9; ++j) row.push_back(i >> j & 1);
    rows.push_back(row);
  }
  const auto wiser = odt_from_matrix(rows, std::vector<Cost>(9, 1), {});
  EXPECT_NEAR(entropy_lower_bound(wiser).bits, 8.697, 1e-3);

  ScenarioItem split{2, {ElementSet(2, {0}), ElementSet(2, {1})}, OutcomeAssignment::dense({0, 1})};
  const ScenarioInstance skew(std::make_shared<TruncatedCoverage>(2, 1), {split}, {Rational(1, 4), Rational(3, 4)});
  const auto h = entropy_lower_bound(skew);
  EXPECT_EQ(h.kind, "H(p)");
  EXPECT_TRUE(h.heuristic);
  EXPECT_NEAR(h.bits, -(0.25 * std::log2(0.25) + 0.75 * std::log2(0.75)), 1e-12);
}

}  // namespace
