#include "roundcover/realization.hpp"

#include <string>

#include "roundcover/element_set.hpp"
#include "roundcover/random.hpp"

namespace roundcover {

OutcomeIndex FixedRealization::observe(ItemId item) {
  if (item >= outcomes_.size()) throw InputError("fixed realization has no entry for item " + std::to_string(item));
  return outcomes_[item];
}

OutcomeIndex SampledRealization::outcome(const IndependentInstance& instance, std::uint64_t seed, ItemId item) {
  const std::uint64_t bits = splitmix64(seed ^ splitmix64(static_cast<std::uint64_t>(item) + 1));
  const double u = static_cast<double>(bits >> 11) * 0x1.0p-53;
  return instance.outcome_at(item, u);
}

std::vector<OutcomeIndex> SampledRealization::materialize(const IndependentInstance& instance, std::uint64_t seed) {
  std::vector<OutcomeIndex> out(instance.item_count());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = outcome(instance, seed, static_cast<ItemId>(i));
  return out;
}

ScenarioRealization::ScenarioRealization(const ScenarioInstance& instance, ScenarioId scenario)
    : instance_(&instance), scenario_(scenario) {
  if (scenario >= instance.scenario_count()) throw InputError("scenario id out of range");
}

std::uint64_t realization_digest(const IndependentInstance& instance, std::uint64_t seed) {
  StableHasher h;
  for (auto o : SampledRealization::materialize(instance, seed)) h.add(o);
  return h.value();
}

std::uint64_t realization_digest(ScenarioId scenario) { return StableHasher().add(scenario).value(); }

}  // namespace roundcover
