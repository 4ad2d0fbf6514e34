#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "roundcover/instance.hpp"
#include "roundcover/parca.hpp"
#include "roundcover/random.hpp"

// Hand-rolled instance generators and brute-force oracles shared by the unit
// tests and the acceptance binary. Nothing here calls the solver or oracle
// code under test.
namespace rctest {

using namespace roundcover;

struct IndependentShape {
  std::size_t min_items = 1;
  std::size_t max_items = 5;
  std::size_t max_groundset = 6;
  std::size_t max_support = 3;
  Cost max_cost = 4;
  std::uint64_t max_product = 4096;  // product of support sizes
};

struct ScenarioShape {
  std::size_t min_scenarios = 1;
  std::size_t max_scenarios = 6;
  std::size_t min_items = 1;
  std::size_t max_items = 5;
  std::size_t max_groundset = 5;
  Cost max_cost = 4;
  bool uniform = false;
};

// Random coverage instances. Q is the smallest coverage any realization
// reaches, so every instance is feasible; draws are retried until Q >= 1.
IndependentInstance random_independent(Rng& rng, const IndependentShape& shape = {});
ScenarioInstance random_scenario(Rng& rng, const ScenarioShape& shape = {});

ElementSet random_subset(Rng& rng, std::size_t universe, double p = 0.5);

// Calls visit(outcomes, probability) for every joint realization.
void for_each_realization(const IndependentInstance& instance,
                          const std::function<void(const std::vector<OutcomeIndex>&, const Rational&)>& visit);

// Minimum expected cost over adaptive decision trees, plain recursion
// without memoization. Keep m <= 6.
Rational brute_adaptive_scenario(const ScenarioInstance& instance);
Rational brute_adaptive_independent(const IndependentInstance& instance);

// Cheapest covering subset by enumerating all 2^m subsets.
Cost brute_offline(const Objective& f, std::span<const ElementSet> realizations, std::span<const Cost> costs);

// Eq. (1) evaluated over every joint outcome of prefix and e.
Rational brute_score(const IndependentInstance& instance, const Objective& f, const Threshold& threshold,
                     std::span<const ItemId> prefix, ItemId e);

// sum_w p_w cost(w) for a per-scenario cost function.
Rational scenario_expectation(const ScenarioInstance& instance, const std::function<Cost(ScenarioId)>& cost);

std::vector<Cost> costs_of(const IndependentInstance& instance);
std::vector<Cost> costs_of(const ScenarioInstance& instance);

}  // namespace rctest
