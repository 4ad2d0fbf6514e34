#pragma once

#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "roundcover/element_set.hpp"
#include "roundcover/objective.hpp"
#include "roundcover/random.hpp"
#include "roundcover/rational.hpp"
#include "roundcover/types.hpp"

namespace roundcover {

using Metadata = std::map<std::string, std::string>;

struct Outcome {
  ElementSet elements;
  Rational probability;
};

// An item whose realization is drawn independently of every other item.
struct IndependentItem {
  Cost cost = 1;
  std::vector<Outcome> outcomes;
};

enum class FeasibilityStatus {
  kGuaranteedElements,  // the union of per-item guaranteed elements already reaches Q
  kExhaustive,          // every combination of outcomes was checked
  kSampled,             // only a random sample was checked
};

struct FeasibilityReport {
  FeasibilityStatus status = FeasibilityStatus::kExhaustive;
  std::string warning;
};

std::string to_string(FeasibilityStatus status);

// Probabilities that sum to 1 within 1e-9 are renormalized to sum exactly
// to 1; anything else is an InputError.
std::vector<Rational> normalize_probabilities(std::vector<Rational> probabilities, const std::string& what);

struct ScaledCosts {
  std::vector<Cost> costs;
  Rational factor{1};  // integer cost = input cost * factor
};

// Converts positive rational costs to integers by multiplying with the LCM
// of their denominators. When that LCM would exceed 10^6 every cost is first
// rounded to 6 decimal digits.
ScaledCosts scale_costs(std::span<const Rational> costs);

class IndependentInstance {
 public:
  // Merges identical outcomes of an item, renormalizes probabilities and
  // validates feasibility. Throws InputError / InfeasibleError.
  IndependentInstance(ObjectivePtr objective, std::vector<IndependentItem> items, Metadata metadata = {});

  const ObjectivePtr& objective() const { return objective_; }
  std::size_t groundset_size() const { return objective_->groundset_size(); }
  std::size_t item_count() const { return items_.size(); }
  const std::vector<IndependentItem>& items() const { return items_; }
  const IndependentItem& item(ItemId id) const { return items_.at(id); }
  Cost max_cost() const;
  const Metadata& metadata() const { return metadata_; }
  const FeasibilityReport& feasibility() const { return feasibility_; }

  OutcomeIndex sample_outcome(ItemId id, Rng& rng) const { return outcome_at(id, rng.uniform01()); }
  // Outcome selected by a uniform variate u in [0, 1) via the cumulative
  // distribution of the item.
  OutcomeIndex outcome_at(ItemId id, double u) const;
  // One outcome index per item, drawn in item order.
  std::vector<OutcomeIndex> sample_realization(Rng& rng) const;
  // Product of support sizes, saturating at `cap`.
  std::uint64_t support_product(std::span<const ItemId> items, std::uint64_t cap) const;

  IndependentInstance with_costs_scaled(Cost factor) const;

 private:
  void check_feasibility();

  ObjectivePtr objective_;
  std::vector<IndependentItem> items_;
  std::vector<std::vector<double>> cumulative_;
  Metadata metadata_;
  FeasibilityReport feasibility_;
};

// Per-scenario outcome indices for one item. Stored densely, or as a default
// outcome plus sorted exceptions when almost every scenario agrees (the
// lower-bound instances have millions of nearly constant items).
class OutcomeAssignment {
 public:
  OutcomeAssignment() = default;
  static OutcomeAssignment dense(std::vector<OutcomeIndex> per_scenario);
  static OutcomeAssignment sparse(std::size_t scenarios, OutcomeIndex default_outcome,
                                  std::vector<std::pair<ScenarioId, OutcomeIndex>> exceptions);

  OutcomeIndex operator()(ScenarioId s) const;
  std::size_t scenario_count() const { return scenarios_; }
  OutcomeIndex default_outcome() const { return default_; }
  std::size_t exception_count() const;
  bool is_dense() const { return !dense_.empty() || scenarios_ == 0; }

  template <class F>
  void for_each_exception(F&& f) const {
    if (!dense_.empty()) {
      for (std::size_t s = 0; s < dense_.size(); ++s) {
        if (dense_[s] != default_) f(static_cast<ScenarioId>(s), dense_[s]);
      }
    } else {
      for (const auto& [s, o] : exceptions_) f(s, o);
    }
  }

  // Restriction to `kept` scenarios, renumbered 0..kept.size()-1.
  OutcomeAssignment select(std::span<const ScenarioId> kept) const;
  OutcomeAssignment remap_outcomes(std::span<const OutcomeIndex> mapping) const;

 private:
  static OutcomeAssignment choose_representation(std::size_t scenarios, OutcomeIndex default_outcome,
                                                 std::vector<std::pair<ScenarioId, OutcomeIndex>> exceptions);

  std::size_t scenarios_ = 0;
  OutcomeIndex default_ = 0;
  std::vector<OutcomeIndex> dense_;
  std::vector<std::pair<ScenarioId, OutcomeIndex>> exceptions_;
};

struct ScenarioItem {
  Cost cost = 1;
  std::vector<ElementSet> outcomes;  // distinct realizations
  OutcomeAssignment assignment;      // scenario -> index into outcomes

  const ElementSet& realization(ScenarioId s) const { return outcomes[assignment(s)]; }
};

// Explicit joint distribution: scenario w has probability p_w and fixes every
// item's realization.
class ScenarioInstance {
 public:
  // Deduplicates outcomes, merges scenarios with identical realization
  // vectors (summing probabilities), renormalizes and checks that every
  // scenario is coverable. Throws InputError / InfeasibleError.
  ScenarioInstance(ObjectivePtr objective, std::vector<ScenarioItem> items, std::vector<Rational> probabilities,
                   Metadata metadata = {});

  const ObjectivePtr& objective() const { return objective_; }
  std::size_t groundset_size() const { return objective_->groundset_size(); }
  std::size_t item_count() const { return items_.size(); }
  std::size_t scenario_count() const { return probabilities_.size(); }
  const std::vector<ScenarioItem>& items() const { return items_; }
  const ScenarioItem& item(ItemId id) const { return items_.at(id); }
  OutcomeIndex outcome(ItemId item, ScenarioId s) const { return items_[item].assignment(s); }
  const Rational& probability(ScenarioId s) const { return probabilities_[s]; }
  const std::vector<Rational>& probabilities() const { return probabilities_; }
  // p_w = weight(w) / common_denominator(), all integers.
  const BigInt& weight(ScenarioId s) const { return weights_[s]; }
  const BigInt& common_denominator() const { return denominator_; }
  Cost max_cost() const;
  bool uniform_probabilities() const;
  bool unit_costs() const;
  const Metadata& metadata() const { return metadata_; }
  // Scenarios removed by duplicate merging.
  std::size_t merged_duplicates() const { return merged_duplicates_; }

  // Union of every item's realization under scenario s.
  ElementSet full_realization(ScenarioId s) const;
  ScenarioId sample_scenario(Rng& rng) const;

  ScenarioInstance with_costs_scaled(Cost factor) const;

 private:
  ObjectivePtr objective_;
  std::vector<ScenarioItem> items_;
  std::vector<Rational> probabilities_;
  std::vector<double> probabilities_d_;
  std::vector<BigInt> weights_;
  BigInt denominator_{1};
  Metadata metadata_;
  std::size_t merged_duplicates_ = 0;
};

using Instance = std::variant<IndependentInstance, ScenarioInstance>;

}  // namespace roundcover
