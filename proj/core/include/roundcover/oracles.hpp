#pragma once

#include <span>
#include <string>
#include <vector>

#include "roundcover/instance.hpp"

namespace roundcover {

// Minimum expected cost over all adaptive decision trees. Memoized on
// (compatible scenarios, realized elements). Requires s <= 12 and m <= 12.
Rational optimal_adaptive_scenario(const ScenarioInstance& instance);

// Same for independent items, memoized on (probed items, realized elements).
// Requires m <= 6 and a support-size product <= 4096.
Rational optimal_adaptive_independent(const IndependentInstance& instance);

struct OfflineResult {
  Cost cost = 0;
  bool exact = true;  // false: a fractional lower bound (m > 40)
};

// Cheapest set of items whose realizations reach f = Q, by branch-and-bound
// with a greedy incumbent and a fractional-knapsack bound on marginal gains.
// InfeasibleError when all items together fall short.
OfflineResult offline_optimal(const Objective& f, std::span<const ElementSet> realizations,
                              std::span<const Cost> costs);
OfflineResult offline_optimal(const IndependentInstance& instance, std::span<const OutcomeIndex> outcomes);
OfflineResult offline_optimal(const ScenarioInstance& instance, ScenarioId scenario);

struct EntropyBound {
  double bits = 0;
  bool heuristic = false;  // costs are not all 1, so this is not a proven bound
  std::string kind;        // "log2(s)" or "H(p)"
};

EntropyBound entropy_lower_bound(const ScenarioInstance& instance);

}  // namespace roundcover
