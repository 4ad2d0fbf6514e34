#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "roundcover/element_set.hpp"
#include "roundcover/types.hpp"

namespace roundcover {

enum class ObjectiveFamily {
  kTruncatedCoverage,
  kWeightedTruncatedCoverage,
  kTruncatedAdditive,
  kFilterEval,
  kResidual,
  kCustom,
};

std::string family_name(ObjectiveFamily family);

// Integer-valued monotone submodular f : 2^U -> Z>=0 with f(U) = Q.
//
// Solvers see f only through value()/max_value(), so any implementation of
// this interface can be covered; the concrete families below are the ones
// the instance file format knows how to store.
class Objective {
 public:
  virtual ~Objective() = default;

  virtual Value value(const ElementSet& s) const = 0;
  // f of the union of `parts` (at most 8, same universe) without building
  // it. The default materializes the union.
  virtual Value value_of_union(std::span<const ElementSet* const> parts) const;
  Value value_union(const ElementSet& a, const ElementSet& b) const {
    const ElementSet* parts[] = {&a, &b};
    return value_of_union(parts);
  }
  virtual Value max_value() const = 0;
  virtual std::size_t groundset_size() const = 0;
  virtual ObjectiveFamily family() const = 0;
};

using ObjectivePtr = std::shared_ptr<const Objective>;

// min(|S ∩ relevant|, Q). `relevant` defaults to the whole groundset.
class TruncatedCoverage final : public Objective {
 public:
  TruncatedCoverage(std::size_t groundset_size, Value q, std::optional<ElementSet> relevant = std::nullopt);

  Value value(const ElementSet& s) const override;
  Value value_of_union(std::span<const ElementSet* const> parts) const override;
  Value max_value() const override { return q_; }
  std::size_t groundset_size() const override { return n_; }
  ObjectiveFamily family() const override { return ObjectiveFamily::kTruncatedCoverage; }

  const std::optional<ElementSet>& relevant() const { return relevant_; }

 private:
  std::size_t n_;
  Value q_;
  std::optional<ElementSet> relevant_;
};

// min(sum of w_e over S, Q) with non-negative integer weights. Used for
// coverage where elements carry multiplicities.
class WeightedTruncatedCoverage final : public Objective {
 public:
  WeightedTruncatedCoverage(std::vector<Value> weights, Value q);

  Value value(const ElementSet& s) const override;
  Value value_of_union(std::span<const ElementSet* const> parts) const override;
  Value max_value() const override { return q_; }
  std::size_t groundset_size() const override { return weights_.size(); }
  ObjectiveFamily family() const override { return ObjectiveFamily::kWeightedTruncatedCoverage; }

  const std::vector<Value>& weights() const { return weights_; }

 private:
  std::vector<Value> weights_;
  Value q_;
};

// Knapsack-cover objective: elements are (item, value) pairs with value a_e,
// f(S) = min(sum a_e, Q). Values are clamped to Q on construction.
class TruncatedAdditive final : public Objective {
 public:
  TruncatedAdditive(std::vector<Value> values, Value q);

  Value value(const ElementSet& s) const override;
  Value value_of_union(std::span<const ElementSet* const> parts) const override;
  Value max_value() const override { return q_; }
  std::size_t groundset_size() const override { return values_.size(); }
  ObjectiveFamily family() const override { return ObjectiveFamily::kTruncatedAdditive; }

  const std::vector<Value>& values() const { return values_; }

 private:
  std::vector<Value> values_;
  Value q_;
};

// Shared filter evaluation. Filter i contributes elements T_i = 2i (true)
// and F_i = 2i+1 (false). For every conjunctive query J the term is
// min(|J|, |J| * #{false filters of J seen} + #{true filters of J seen}),
// so a query saturates once it is decided. Q is the sum of query sizes.
class FilterEval final : public Objective {
 public:
  FilterEval(std::size_t filters, std::vector<std::vector<std::uint32_t>> queries);

  static Element true_element(std::uint32_t filter) { return 2 * filter; }
  static Element false_element(std::uint32_t filter) { return 2 * filter + 1; }

  Value value(const ElementSet& s) const override;
  Value value_of_union(std::span<const ElementSet* const> parts) const override;
  Value max_value() const override { return q_; }
  std::size_t groundset_size() const override { return 2 * filters_; }
  ObjectiveFamily family() const override { return ObjectiveFamily::kFilterEval; }

  std::size_t filters() const { return filters_; }
  const std::vector<std::vector<std::uint32_t>>& queries() const { return queries_; }

 private:
  std::size_t filters_;
  std::vector<std::vector<std::uint32_t>> queries_;
  Value q_ = 0;
};

// g(S) = f(S ∪ R) - f(R), with max value Q - f(R). Holds R instead of
// re-materializing anything; residuals of residuals flatten to one wrapper.
class ResidualObjective final : public Objective {
 public:
  ResidualObjective(ObjectivePtr base, ElementSet conditioned);

  Value value(const ElementSet& s) const override;
  Value value_of_union(std::span<const ElementSet* const> parts) const override;
  Value max_value() const override { return q_; }
  std::size_t groundset_size() const override { return base_->groundset_size(); }
  ObjectiveFamily family() const override { return ObjectiveFamily::kResidual; }

  const ObjectivePtr& base() const { return base_; }
  const ElementSet& conditioned() const { return conditioned_; }

 private:
  ObjectivePtr base_;
  ElementSet conditioned_;
  Value base_at_r_;
  Value q_;
};

// f(S) for S given as a list of element ids; ids outside U are an InputError.
Value eval(const Objective& f, std::span<const Element> s);
Value eval(const Objective& f, const ElementSet& s);

// f(S ∪ T) - f(S).
Value marginal(const Objective& f, const ElementSet& s, const ElementSet& t);

ObjectivePtr residual(const ObjectivePtr& f, const ElementSet& r);

enum class CheckMode { kExhaustive, kSampled };

struct SubmodularityWitness {
  ElementSet smaller;  // S
  ElementSet larger;   // T, with S ⊆ T
  Element element;     // e ∉ T
};

struct SubmodularityReport {
  bool ok = true;
  std::string violation;  // empty, "range", "empty-set", "full-set", "monotone", "submodular"
  std::optional<SubmodularityWitness> witness;
};

// Exhaustive mode requires |U| <= 10 and checks every (S, e, e') diminishing
// returns triple, which is equivalent to submodularity. Sampled mode draws
// `samples` random chains S ⊆ T and elements e.
SubmodularityReport verify_monotone_submodular(const Objective& f, CheckMode mode, std::size_t samples = 0,
                                               std::uint64_t seed = 0);

}  // namespace roundcover
