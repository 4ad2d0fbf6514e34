#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "roundcover/instance.hpp"
#include "roundcover/types.hpp"

namespace roundcover {

// Answers probes. observe() returns the index of the realized outcome in the
// item's outcome list; solvers never see more than what they probe.
class RealizationSource {
 public:
  virtual ~RealizationSource() = default;
  virtual OutcomeIndex observe(ItemId item) = 0;
};

// Caller-provided outcome index per item (replaying a fixed realization).
class FixedRealization final : public RealizationSource {
 public:
  explicit FixedRealization(std::vector<OutcomeIndex> outcomes) : outcomes_(std::move(outcomes)) {}
  OutcomeIndex observe(ItemId item) override;
  const std::vector<OutcomeIndex>& outcomes() const { return outcomes_; }

 private:
  std::vector<OutcomeIndex> outcomes_;
};

// Independent model. Each item's outcome is a pure function of (seed, item),
// so the realization does not depend on the order in which items are probed
// and two policies run with the same seed see the same world.
class SampledRealization final : public RealizationSource {
 public:
  SampledRealization(const IndependentInstance& instance, std::uint64_t seed) : instance_(&instance), seed_(seed) {}
  OutcomeIndex observe(ItemId item) override { return outcome(*instance_, seed_, item); }

  static OutcomeIndex outcome(const IndependentInstance& instance, std::uint64_t seed, ItemId item);
  // The realization of every item; equivalent to observing all of them.
  static std::vector<OutcomeIndex> materialize(const IndependentInstance& instance, std::uint64_t seed);

 private:
  const IndependentInstance* instance_;
  std::uint64_t seed_;
};

// Scenario model: the hidden scenario fixes every item.
class ScenarioRealization final : public RealizationSource {
 public:
  ScenarioRealization(const ScenarioInstance& instance, ScenarioId scenario);
  OutcomeIndex observe(ItemId item) override { return instance_->outcome(item, scenario_); }
  ScenarioId scenario() const { return scenario_; }

 private:
  const ScenarioInstance* instance_;
  ScenarioId scenario_;
};

// Stable digest of the full realization a seed induces (independent) or of
// the scenario id (scenario); used to check common random numbers.
std::uint64_t realization_digest(const IndependentInstance& instance, std::uint64_t seed);
std::uint64_t realization_digest(ScenarioId scenario);

}  // namespace roundcover
