#include "roundcover/instance.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <unordered_map>

namespace roundcover {

std::string to_string(FeasibilityStatus status) {
  switch (status) {
    case FeasibilityStatus::kGuaranteedElements:
      return "guaranteed_elements";
    case FeasibilityStatus::kExhaustive:
      return "exhaustive";
    case FeasibilityStatus::kSampled:
      return "sampled";
  }
  return "unknown";
}

std::vector<Rational> normalize_probabilities(std::vector<Rational> probabilities, const std::string& what) {
  if (probabilities.empty()) throw InputError(what + ": empty distribution");
  Rational total = 0;
  for (const auto& p : probabilities) {
    if (p <= 0 || p > 1) throw InputError(what + ": probability " + to_string(p) + " outside (0, 1]");
    total += p;
  }
  const Rational tolerance(1, 1000000000);
  if (abs(total - 1) > tolerance) {
    throw InputError(what + ": probabilities sum to " + to_string(total) + ", not 1");
  }
  if (total != 1) {
    for (auto& p : probabilities) p /= total;
  }
  return probabilities;
}

ScaledCosts scale_costs(std::span<const Rational> costs) {
  std::vector<Rational> work(costs.begin(), costs.end());
  BigInt lcm = 1;
  for (const auto& c : work) {
    if (c <= 0) throw InputError("item cost must be positive, got " + to_string(c));
    mpz_lcm(lcm.get_mpz_t(), lcm.get_mpz_t(), c.get_den_mpz_t());
  }
  const BigInt cap = 1000000;
  if (lcm > cap) {
    lcm = 1;
    for (auto& c : work) {
      c = ratio(floor(c * cap + Rational(1, 2)), cap);
      if (c <= 0) throw InputError("item cost rounds to zero at 6 decimal digits");
      mpz_lcm(lcm.get_mpz_t(), lcm.get_mpz_t(), c.get_den_mpz_t());
    }
  }
  ScaledCosts out;
  out.factor = Rational(lcm);
  for (const auto& c : work) {
    const Rational scaled = c * out.factor;
    if (!mpz_fits_slong_p(scaled.get_num_mpz_t())) throw InputError("scaled item cost overflows");
    out.costs.push_back(static_cast<Cost>(scaled.get_num().get_si()));
  }
  return out;
}

IndependentInstance::IndependentInstance(ObjectivePtr objective, std::vector<IndependentItem> items, Metadata metadata)
    : objective_(std::move(objective)), items_(std::move(items)), metadata_(std::move(metadata)) {
  if (!objective_) throw InputError("instance without objective");
  const std::size_t n = groundset_size();
  for (std::size_t i = 0; i < items_.size(); ++i) {
    auto& item = items_[i];
    const std::string what = "item " + std::to_string(i);
    if (item.cost < 1) throw InputError(what + ": cost must be >= 1");
    if (item.outcomes.empty()) throw InputError(what + ": no outcomes");
    std::vector<Outcome> merged;
    for (auto& outcome : item.outcomes) {
      if (outcome.elements.universe() != n) throw InputError(what + ": outcome over the wrong groundset");
      if (outcome.probability <= 0 || outcome.probability > 1) {
        throw InputError(what + ": probability outside (0, 1]");
      }
      auto it = std::find_if(merged.begin(), merged.end(),
                             [&](const Outcome& o) { return o.elements == outcome.elements; });
      if (it == merged.end()) {
        merged.push_back(std::move(outcome));
      } else {
        it->probability += outcome.probability;
      }
    }
    std::vector<Rational> probs;
    for (const auto& o : merged) probs.push_back(o.probability);
    probs = normalize_probabilities(std::move(probs), what);
    for (std::size_t k = 0; k < merged.size(); ++k) merged[k].probability = probs[k];
    item.outcomes = std::move(merged);

    std::vector<double> cumulative;
    Rational acc = 0;
    for (const auto& o : item.outcomes) {
      acc += o.probability;
      cumulative.push_back(acc.get_d());
    }
    cumulative_.push_back(std::move(cumulative));
  }
  check_feasibility();
}

void IndependentInstance::check_feasibility() {
  const Objective& f = *objective_;
  const std::size_t n = groundset_size();
  const Value q = f.max_value();

  ElementSet guaranteed(n);
  std::vector<ElementSet> per_item_guaranteed;
  for (const auto& item : items_) {
    ElementSet common = item.outcomes.front().elements;
    for (const auto& o : item.outcomes) common &= o.elements;
    guaranteed |= common;
    per_item_guaranteed.push_back(std::move(common));
  }
  if (f.value(guaranteed) == q) {
    feasibility_ = {FeasibilityStatus::kGuaranteedElements, ""};
    return;
  }

  std::vector<ItemId> all(items_.size());
  std::iota(all.begin(), all.end(), 0);
  constexpr std::uint64_t kExhaustiveLimit = 1000000;
  if (support_product(all, kExhaustiveLimit + 1) <= kExhaustiveLimit) {
    // suffix_guaranteed[i]: elements the items i.. produce under every outcome
    std::vector<ElementSet> suffix_guaranteed(items_.size() + 1, ElementSet(n));
    for (std::size_t i = items_.size(); i-- > 0;) {
      suffix_guaranteed[i] = suffix_guaranteed[i + 1] | per_item_guaranteed[i];
    }
    auto dfs = [&](auto&& self, std::size_t i, const ElementSet& covered) -> bool {
      if (f.value_union(covered, suffix_guaranteed[i]) == q) return true;
      if (i == items_.size()) return false;
      for (const auto& o : items_[i].outcomes) {
        if (!self(self, i + 1, covered | o.elements)) return false;
      }
      return true;
    };
    if (!dfs(dfs, 0, ElementSet(n))) {
      throw InfeasibleError("some realization of the items does not reach Q");
    }
    feasibility_ = {FeasibilityStatus::kExhaustive, ""};
    return;
  }

  constexpr std::size_t kSamples = 2000;
  Rng rng(0x5eed'f00dULL);
  for (std::size_t k = 0; k < kSamples; ++k) {
    ElementSet covered(n);
    for (std::size_t i = 0; i < items_.size(); ++i) {
      covered |= items_[i].outcomes[sample_outcome(static_cast<ItemId>(i), rng)].elements;
    }
    if (f.value(covered) != q) throw InfeasibleError("a sampled realization of the items does not reach Q");
  }
  feasibility_ = {FeasibilityStatus::kSampled,
                  "feasibility certified only on " + std::to_string(kSamples) + " sampled realizations"};
}

Cost IndependentInstance::max_cost() const {
  Cost best = 0;
  for (const auto& item : items_) best = std::max(best, item.cost);
  return best;
}

OutcomeIndex IndependentInstance::outcome_at(ItemId id, double u) const {
  const auto& cumulative = cumulative_.at(id);
  auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
  if (it == cumulative.end()) --it;
  return static_cast<OutcomeIndex>(it - cumulative.begin());
}

std::vector<OutcomeIndex> IndependentInstance::sample_realization(Rng& rng) const {
  std::vector<OutcomeIndex> out(items_.size());
  for (std::size_t i = 0; i < items_.size(); ++i) out[i] = sample_outcome(static_cast<ItemId>(i), rng);
  return out;
}

std::uint64_t IndependentInstance::support_product(std::span<const ItemId> items, std::uint64_t cap) const {
  std::uint64_t product = 1;
  for (ItemId id : items) {
    const std::uint64_t k = items_.at(id).outcomes.size();
    if (product > cap / k) return cap;
    product *= k;
  }
  return std::min(product, cap);
}

IndependentInstance IndependentInstance::with_costs_scaled(Cost factor) const {
  if (factor < 1) throw InputError("cost scale factor must be >= 1");
  IndependentInstance out = *this;
  for (auto& item : out.items_) item.cost *= factor;
  return out;
}

OutcomeAssignment OutcomeAssignment::choose_representation(
    std::size_t scenarios, OutcomeIndex default_outcome, std::vector<std::pair<ScenarioId, OutcomeIndex>> exceptions) {
  OutcomeAssignment a;
  a.scenarios_ = scenarios;
  a.default_ = default_outcome;
  if (scenarios <= 4096 || exceptions.size() * 8 > scenarios) {
    a.dense_.assign(scenarios, default_outcome);
    for (const auto& [s, o] : exceptions) a.dense_[s] = o;
  } else {
    a.exceptions_ = std::move(exceptions);
  }
  return a;
}

OutcomeAssignment OutcomeAssignment::dense(std::vector<OutcomeIndex> per_scenario) {
  if (per_scenario.empty()) return {};
  std::unordered_map<OutcomeIndex, std::size_t> counts;
  for (auto o : per_scenario) ++counts[o];
  OutcomeIndex best = per_scenario.front();
  for (const auto& [o, c] : counts) {
    if (c > counts[best] || (c == counts[best] && o < best)) best = o;
  }
  std::vector<std::pair<ScenarioId, OutcomeIndex>> exceptions;
  for (std::size_t s = 0; s < per_scenario.size(); ++s) {
    if (per_scenario[s] != best) exceptions.emplace_back(static_cast<ScenarioId>(s), per_scenario[s]);
  }
  return choose_representation(per_scenario.size(), best, std::move(exceptions));
}

OutcomeAssignment OutcomeAssignment::sparse(std::size_t scenarios, OutcomeIndex default_outcome,
                                            std::vector<std::pair<ScenarioId, OutcomeIndex>> exceptions) {
  std::sort(exceptions.begin(), exceptions.end());
  for (std::size_t i = 0; i < exceptions.size(); ++i) {
    if (exceptions[i].first >= scenarios) throw InputError("assignment exception for unknown scenario");
    if (i > 0 && exceptions[i].first == exceptions[i - 1].first) {
      throw InputError("assignment lists a scenario twice");
    }
  }
  std::erase_if(exceptions, [&](const auto& e) { return e.second == default_outcome; });
  return choose_representation(scenarios, default_outcome, std::move(exceptions));
}

OutcomeIndex OutcomeAssignment::operator()(ScenarioId s) const {
  if (!dense_.empty()) return dense_[s];
  auto it = std::lower_bound(exceptions_.begin(), exceptions_.end(), std::make_pair(s, OutcomeIndex{0}));
  if (it != exceptions_.end() && it->first == s) return it->second;
  return default_;
}

std::size_t OutcomeAssignment::exception_count() const {
  if (!dense_.empty()) {
    return static_cast<std::size_t>(std::count_if(dense_.begin(), dense_.end(),
                                                  [&](OutcomeIndex o) { return o != default_; }));
  }
  return exceptions_.size();
}

OutcomeAssignment OutcomeAssignment::select(std::span<const ScenarioId> kept) const {
  if (!dense_.empty()) {
    std::vector<OutcomeIndex> out;
    out.reserve(kept.size());
    for (ScenarioId s : kept) out.push_back(dense_[s]);
    return dense(std::move(out));
  }
  std::vector<std::pair<ScenarioId, OutcomeIndex>> exceptions;
  for (std::size_t i = 0; i < kept.size(); ++i) {
    const OutcomeIndex o = (*this)(kept[i]);
    if (o != default_) exceptions.emplace_back(static_cast<ScenarioId>(i), o);
  }
  return choose_representation(kept.size(), default_, std::move(exceptions));
}

OutcomeAssignment OutcomeAssignment::remap_outcomes(std::span<const OutcomeIndex> mapping) const {
  OutcomeAssignment out = *this;
  out.default_ = mapping[default_];
  for (auto& o : out.dense_) o = mapping[o];
  for (auto& [s, o] : out.exceptions_) o = mapping[o];
  std::erase_if(out.exceptions_, [&](const auto& e) { return e.second == out.default_; });
  return out;
}

namespace {

using Signature = std::vector<std::pair<ItemId, OutcomeIndex>>;

// Deduplicates an item's outcome list and drops outcomes no scenario uses.
void canonicalize_outcomes(ScenarioItem& item) {
  const std::size_t k = item.outcomes.size();
  std::vector<OutcomeIndex> first(k);
  std::vector<ElementSet> distinct;
  for (std::size_t i = 0; i < k; ++i) {
    auto it = std::find(distinct.begin(), distinct.end(), item.outcomes[i]);
    first[i] = static_cast<OutcomeIndex>(it - distinct.begin());
    if (it == distinct.end()) distinct.push_back(item.outcomes[i]);
  }
  OutcomeAssignment merged = item.assignment.remap_outcomes(first);

  std::vector<bool> used(distinct.size(), false);
  if (merged.exception_count() < merged.scenario_count()) used[merged.default_outcome()] = true;
  merged.for_each_exception([&](ScenarioId, OutcomeIndex o) { used[o] = true; });
  std::vector<OutcomeIndex> compact(distinct.size(), 0);
  std::vector<ElementSet> kept;
  for (std::size_t i = 0; i < distinct.size(); ++i) {
    if (!used[i]) continue;
    compact[i] = static_cast<OutcomeIndex>(kept.size());
    kept.push_back(std::move(distinct[i]));
  }
  // An unused default still needs a valid index; point it at outcome 0.
  if (!used[merged.default_outcome()]) compact[merged.default_outcome()] = 0;
  item.assignment = merged.remap_outcomes(compact);
  item.outcomes = std::move(kept);
}

}  // namespace

ScenarioInstance::ScenarioInstance(ObjectivePtr objective, std::vector<ScenarioItem> items,
                                   std::vector<Rational> probabilities, Metadata metadata)
    : objective_(std::move(objective)), items_(std::move(items)), metadata_(std::move(metadata)) {
  if (!objective_) throw InputError("instance without objective");
  const std::size_t n = groundset_size();
  const std::size_t s = probabilities.size();
  if (s == 0) throw InputError("scenario instance without scenarios");
  probabilities = normalize_probabilities(std::move(probabilities), "scenario distribution");

  for (std::size_t i = 0; i < items_.size(); ++i) {
    auto& item = items_[i];
    const std::string what = "item " + std::to_string(i);
    if (item.cost < 1) throw InputError(what + ": cost must be >= 1");
    if (item.outcomes.empty()) throw InputError(what + ": no outcomes");
    for (const auto& o : item.outcomes) {
      if (o.universe() != n) throw InputError(what + ": outcome over the wrong groundset");
    }
    if (item.assignment.scenario_count() != s) throw InputError(what + ": assignment has the wrong scenario count");
    bool bad = item.assignment.default_outcome() >= item.outcomes.size();
    item.assignment.for_each_exception([&](ScenarioId, OutcomeIndex o) { bad = bad || o >= item.outcomes.size(); });
    if (bad) throw InputError(what + ": assignment references a missing outcome");
    canonicalize_outcomes(item);
  }

  std::vector<Signature> signatures(s);
  for (std::size_t i = 0; i < items_.size(); ++i) {
    items_[i].assignment.for_each_exception(
        [&](ScenarioId w, OutcomeIndex o) { signatures[w].emplace_back(static_cast<ItemId>(i), o); });
  }

  // Merge scenarios with identical realization vectors, keeping the first.
  std::vector<ScenarioId> order(s);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](ScenarioId a, ScenarioId b) { return signatures[a] < signatures[b]; });
  std::vector<ScenarioId> representative(s);
  for (std::size_t k = 0; k < s; ++k) {
    const ScenarioId w = order[k];
    representative[w] = (k > 0 && signatures[order[k - 1]] == signatures[w]) ? representative[order[k - 1]] : w;
  }
  std::vector<ScenarioId> kept;
  for (std::size_t w = 0; w < s; ++w) {
    if (representative[w] == w) {
      kept.push_back(static_cast<ScenarioId>(w));
    } else {
      probabilities[representative[w]] += probabilities[w];
    }
  }
  merged_duplicates_ = s - kept.size();
  if (merged_duplicates_ > 0) {
    for (auto& item : items_) {
      item.assignment = item.assignment.select(kept);
      canonicalize_outcomes(item);
    }
    for (ScenarioId w : kept) probabilities_.push_back(probabilities[w]);
    signatures.assign(kept.size(), {});
    for (std::size_t i = 0; i < items_.size(); ++i) {
      items_[i].assignment.for_each_exception(
          [&](ScenarioId w, OutcomeIndex o) { signatures[w].emplace_back(static_cast<ItemId>(i), o); });
    }
  } else {
    probabilities_ = std::move(probabilities);
  }

  const std::size_t live = probabilities_.size();
  denominator_ = 1;
  for (const auto& p : probabilities_) {
    mpz_lcm(denominator_.get_mpz_t(), denominator_.get_mpz_t(), p.get_den_mpz_t());
  }
  double acc = 0.0;
  for (const auto& p : probabilities_) {
    weights_.push_back(p.get_num() * (denominator_ / p.get_den()));
    acc += p.get_d();
    probabilities_d_.push_back(acc);
  }

  // Feasibility: every scenario's full realization must reach Q. Either OR
  // every item directly, or start from per-element counts of the default
  // outcomes and apply each scenario's exceptions, whichever is cheaper.
  const Objective& f = *objective_;
  const Value q = f.max_value();
  const std::size_t words = (n + 63) / 64;
  double direct_work = static_cast<double>(live) * static_cast<double>(items_.size()) * static_cast<double>(words);
  double delta_work = static_cast<double>(live) * static_cast<double>(words);
  for (const auto& sig : signatures) {
    for (const auto& [e, o] : sig) {
      delta_work += static_cast<double>(items_[e].outcomes[items_[e].assignment.default_outcome()].count() +
                                        items_[e].outcomes[o].count());
    }
  }
  auto fail = [&](std::size_t w) {
    throw InfeasibleError("scenario " + std::to_string(w) + " cannot be covered by probing every item");
  };
  if (direct_work <= delta_work) {
    for (std::size_t w = 0; w < live; ++w) {
      if (f.value(full_realization(static_cast<ScenarioId>(w))) != q) fail(w);
    }
  } else {
    std::vector<std::uint32_t> counts(n, 0);
    for (const auto& item : items_) {
      item.outcomes[item.assignment.default_outcome()].for_each([&](Element x) { ++counts[x]; });
    }
    ElementSet base(n);
    for (std::size_t x = 0; x < n; ++x) {
      if (counts[x] > 0) base.insert(static_cast<Element>(x));
    }
    std::vector<Element> touched;
    for (std::size_t w = 0; w < live; ++w) {
      touched.clear();
      for (const auto& [e, o] : signatures[w]) {
        const auto& item = items_[e];
        item.outcomes[item.assignment.default_outcome()].for_each([&](Element x) {
          --counts[x];
          touched.push_back(x);
        });
        item.outcomes[o].for_each([&](Element x) {
          ++counts[x];
          touched.push_back(x);
        });
      }
      ElementSet realized = base;
      for (Element x : touched) {
        if (counts[x] > 0) {
          realized.insert(x);
        } else {
          realized.erase(x);
        }
      }
      if (f.value(realized) != q) fail(w);
      for (const auto& [e, o] : signatures[w]) {
        const auto& item = items_[e];
        item.outcomes[item.assignment.default_outcome()].for_each([&](Element x) { ++counts[x]; });
        item.outcomes[o].for_each([&](Element x) { --counts[x]; });
      }
    }
  }
}

Cost ScenarioInstance::max_cost() const {
  Cost best = 0;
  for (const auto& item : items_) best = std::max(best, item.cost);
  return best;
}

bool ScenarioInstance::uniform_probabilities() const {
  return std::all_of(probabilities_.begin(), probabilities_.end(),
                     [&](const Rational& p) { return p == probabilities_.front(); });
}

bool ScenarioInstance::unit_costs() const {
  return std::all_of(items_.begin(), items_.end(), [](const ScenarioItem& item) { return item.cost == 1; });
}

ElementSet ScenarioInstance::full_realization(ScenarioId s) const {
  ElementSet out(groundset_size());
  for (const auto& item : items_) out |= item.realization(s);
  return out;
}

ScenarioId ScenarioInstance::sample_scenario(Rng& rng) const {
  const double u = rng.uniform01() * probabilities_d_.back();
  auto it = std::upper_bound(probabilities_d_.begin(), probabilities_d_.end(), u);
  if (it == probabilities_d_.end()) --it;
  return static_cast<ScenarioId>(it - probabilities_d_.begin());
}

ScenarioInstance ScenarioInstance::with_costs_scaled(Cost factor) const {
  if (factor < 1) throw InputError("cost scale factor must be >= 1");
  ScenarioInstance out = *this;
  for (auto& item : out.items_) item.cost *= factor;
  return out;
}

}  // namespace roundcover
