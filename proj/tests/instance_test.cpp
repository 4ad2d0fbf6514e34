#include <gtest/gtest.h>

#include <cstdio>
#include <filesystem>

#include "roundcover/generators.hpp"
#include "roundcover/instance.hpp"
#include "roundcover/instance_io.hpp"
#include "support.hpp"

namespace {

using namespace roundcover;

IndependentItem item(Cost cost, std::vector<std::pair<std::vector<Element>, Rational>> outcomes, std::size_t n) {
  IndependentItem it;
  it.cost = cost;
  for (auto& [els, p] : outcomes) it.outcomes.push_back({ElementSet(n, els), p});
  return it;
}

TEST(Probabilities, NormalizeWithinTolerance) {
  const auto p = normalize_probabilities({Rational(1, 3), parse_rational("0.6666666667")}, "t");
  EXPECT_EQ(p[0] + p[1], 1);
  EXPECT_THROW(normalize_probabilities({Rational(1, 2), Rational(1, 3)}, "t"), InputError);
  EXPECT_THROW(normalize_probabilities({Rational(0), Rational(1)}, "t"), InputError);
  EXPECT_THROW(normalize_probabilities({}, "t"), InputError);
}

TEST(Costs, ScaleByDenominatorLcm) {
  const std::vector<Rational> c = {Rational(1, 2), Rational(2, 3), Rational(2)};
  const auto s = scale_costs(c);
  EXPECT_EQ(s.factor, 6);
  EXPECT_EQ(s.costs, std::vector<Cost>({3, 4, 12}));
  const std::vector<Rational> fine = {Rational(1, 1000003), Rational(1)};
  const auto r = scale_costs(fine);
  EXPECT_EQ(r.factor, 1000000);
  EXPECT_EQ(r.costs[1], 1000000);
  const std::vector<Rational> neg = {Rational(-1)};
  EXPECT_THROW(scale_costs(neg), InputError);
}

TEST(IndependentInstance, MergesOutcomesAndChecksFeasibility) {
  auto f = std::make_shared<TruncatedCoverage>(3, 2);
  std::vector<IndependentItem> items = {
      item(1, {{{0}, Rational(1, 4)}, {{0}, Rational(1, 4)}, {{1}, Rational(1, 2)}}, 3),
      item(2, {{{2}, Rational(1)}}, 3),
  };
  IndependentInstance inst(f, items);
  EXPECT_EQ(inst.item(0).outcomes.size(), 2u);
  EXPECT_EQ(inst.feasibility().status, FeasibilityStatus::kExhaustive);
  EXPECT_EQ(inst.max_cost(), 2);

  std::vector<IndependentItem> short_items = {item(1, {{{0}, Rational(1, 2)}, {{}, Rational(1, 2)}}, 3),
                                              item(1, {{{1}, Rational(1)}}, 3)};
  EXPECT_THROW(IndependentInstance(f, short_items), InfeasibleError);
}

TEST(IndependentInstance, OutcomeAtFollowsCumulative) {
  auto f = std::make_shared<TruncatedCoverage>(2, 1);
  IndependentInstance inst(f, {item(1, {{{0}, Rational(1, 4)}, {{1}, Rational(3, 4)}}, 2)});
  EXPECT_EQ(inst.outcome_at(0, 0.0), 0u);
  EXPECT_EQ(inst.outcome_at(0, 0.2), 0u);
  EXPECT_EQ(inst.outcome_at(0, 0.3), 1u);
  EXPECT_EQ(inst.outcome_at(0, 0.999), 1u);
  const std::vector<ItemId> all = {0};
  EXPECT_EQ(inst.support_product(all, 100), 2u);
}

TEST(ScenarioInstance, MergesDuplicateScenarios) {
  auto f = std::make_shared<TruncatedCoverage>(2, 1);
  ScenarioItem a;
  a.outcomes = {ElementSet(2, {0}), ElementSet(2, {1})};
  a.assignment = OutcomeAssignment::dense({0, 0, 1});
  ScenarioInstance inst(f, {a}, {Rational(1, 3), Rational(1, 3), Rational(1, 3)});
  EXPECT_EQ(inst.scenario_count(), 2u);
  EXPECT_EQ(inst.merged_duplicates(), 1u);
  EXPECT_EQ(inst.probability(0), Rational(2, 3));
  EXPECT_EQ(inst.weight(0) * 3, inst.common_denominator() * 2);
}

TEST(ScenarioInstance, RejectsUncoverableScenario) {
  auto f = std::make_shared<TruncatedCoverage>(2, 2);
  ScenarioItem a;
  a.outcomes = {ElementSet(2, {0, 1}), ElementSet(2, {0})};
  a.assignment = OutcomeAssignment::dense({0, 1});
  EXPECT_THROW(ScenarioInstance(f, {a}, {Rational(1, 2), Rational(1, 2)}), InfeasibleError);
}

TEST(ScenarioInstance, FeasibilityPropertyOnRandomInstances) {
  Rng rng(17);
  for (int rep = 0; rep < 50; ++rep) {
    const auto inst = rctest::random_scenario(rng);
    for (ScenarioId w = 0; w < inst.scenario_count(); ++w) {
      EXPECT_EQ(inst.objective()->value(inst.full_realization(w)), inst.objective()->max_value());
    }
  }
}

TEST(OutcomeAssignment, SparseAndDenseAgree) {
  const auto sparse = OutcomeAssignment::sparse(1000, 2, {{5, 0}, {999, 1}});
  EXPECT_EQ(sparse(5), 0u);
  EXPECT_EQ(sparse(6), 2u);
  EXPECT_EQ(sparse(999), 1u);
  EXPECT_EQ(sparse.exception_count(), 2u);
  const std::vector<ScenarioId> kept = {5, 6};
  const auto sel = sparse.select(kept);
  EXPECT_EQ(sel(0), 0u);
  EXPECT_EQ(sel(1), 2u);
}

TEST(InstanceIo, RoundTripIsByteIdentical) {
  Rng rng(23);
  for (int rep = 0; rep < 20; ++rep) {
    const Instance a = rep % 2 ? Instance(rctest::random_independent(rng)) : Instance(rctest::random_scenario(rng));
    const std::string text = serialize_instance(a);
    const std::string again = serialize_instance(parse_instance(text));
    EXPECT_EQ(text, again);
    EXPECT_EQ(text.back(), '\n');
  }
  const Instance hard = gen_hard_instance(2, 2);
  EXPECT_EQ(serialize_instance(parse_instance(serialize_instance(hard))), serialize_instance(hard));
}

TEST(InstanceIo, ParsesDecimalsAndRationalCosts) {
  const std::string text = R"({"model":"independent","groundset_size":2,
    "objective":{"family":"truncated_coverage","params":{"q":1}},
    "items":[{"id":0,"cost":0.5,"outcomes":[{"elements":[0],"probability":0.25},{"elements":[1],"probability":"3/4"}]},
             {"id":1,"cost":"3/2","outcomes":[{"elements":[0,1],"probability":1}]}]})";
  const Instance inst = parse_instance(text);
  const auto& ind = std::get<IndependentInstance>(inst);
  EXPECT_EQ(ind.item(0).cost, 1);
  EXPECT_EQ(ind.item(1).cost, 3);
  EXPECT_EQ(ind.metadata().at("cost_scale"), "2");
  EXPECT_EQ(ind.item(0).outcomes[0].probability, Rational(1, 4));
  EXPECT_EQ(model_name(inst), "independent");
}

TEST(InstanceIo, RejectsMalformedInput) {
  EXPECT_THROW(parse_instance("not json"), InputError);
  EXPECT_THROW(parse_instance(R"({"model":"banana"})"), InputError);
  const std::string bad_element = R"({"model":"independent","groundset_size":1,
    "objective":{"family":"truncated_coverage","params":{"q":1}},
    "items":[{"id":0,"cost":1,"outcomes":[{"elements":[3],"probability":1}]}]})";
  EXPECT_THROW(parse_instance(bad_element), InputError);
}

TEST(InstanceIo, FileRoundTrip) {
  const auto path = (std::filesystem::temp_directory_path() / "roundcover_io_test.json").string();
  const Instance inst = gen_odt(8, 6, 0.5, CostMode::kRandom, 4);
  save_instance(inst, path);
  EXPECT_EQ(serialize_instance(load_instance(path)), serialize_instance(inst));
  std::remove(path.c_str());
  EXPECT_THROW(load_instance(path), InputError);
}

}  // namespace
