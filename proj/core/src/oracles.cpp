#include "roundcover/oracles.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <map>
#include <numeric>
#include <optional>

namespace roundcover {

namespace {

class ScenarioOpt {
 public:
  explicit ScenarioOpt(const ScenarioInstance& instance)
      : instance_(instance), f_(*instance.objective()), q_(f_.max_value()) {}

  Rational solve(std::uint32_t h, const ElementSet& realized) {
    if (f_.value(realized) >= q_) return Rational(0);
    std::vector<std::uint64_t> key(realized.words().begin(), realized.words().end());
    key.push_back(h);
    if (auto it = memo_.find(key); it != memo_.end()) return it->second;

    const BigInt mass = weight_of(h);
    std::optional<Rational> best;
    for (std::size_t e = 0; e < instance_.item_count(); ++e) {
      const auto& item = instance_.item(static_cast<ItemId>(e));
      std::map<OutcomeIndex, std::uint32_t> branches;
      for (std::uint32_t rest = h; rest != 0; rest &= rest - 1) {
        const auto w = static_cast<ScenarioId>(std::countr_zero(rest));
        branches[item.assignment(w)] |= std::uint32_t{1} << w;
      }
      if (branches.size() == 1 && (realized | item.outcomes[branches.begin()->first]) == realized) continue;
      if (best && Rational(item.cost) >= *best) continue;
      Rational total(item.cost);
      for (const auto& [o, part] : branches) {
        total += ratio(weight_of(part), mass) * solve(part, realized | item.outcomes[o]);
      }
      if (!best || total < *best) best = total;
    }
    if (!best) throw InfeasibleError("adaptive optimum: a compatible set cannot be covered");
    memo_.emplace(std::move(key), *best);
    return *best;
  }

 private:
  BigInt weight_of(std::uint32_t set) const {
    BigInt w = 0;
    for (std::uint32_t rest = set; rest != 0; rest &= rest - 1) {
      w += instance_.weight(static_cast<ScenarioId>(std::countr_zero(rest)));
    }
    return w;
  }

  const ScenarioInstance& instance_;
  const Objective& f_;
  Value q_;
  std::map<std::vector<std::uint64_t>, Rational> memo_;
};

class IndependentOpt {
 public:
  explicit IndependentOpt(const IndependentInstance& instance)
      : instance_(instance), f_(*instance.objective()), q_(f_.max_value()) {}

  Rational solve(std::uint32_t probed, const ElementSet& realized) {
    if (f_.value(realized) >= q_) return Rational(0);
    std::vector<std::uint64_t> key(realized.words().begin(), realized.words().end());
    key.push_back(probed);
    if (auto it = memo_.find(key); it != memo_.end()) return it->second;

    std::optional<Rational> best;
    for (std::size_t e = 0; e < instance_.item_count(); ++e) {
      if (probed >> e & 1U) continue;
      const auto& item = instance_.item(static_cast<ItemId>(e));
      if (best && Rational(item.cost) >= *best) continue;
      Rational total(item.cost);
      for (const auto& o : item.outcomes) {
        total += o.probability * solve(probed | std::uint32_t{1} << e, realized | o.elements);
      }
      if (!best || total < *best) best = total;
    }
    if (!best) throw InfeasibleError("adaptive optimum: a realization cannot be covered");
    memo_.emplace(std::move(key), *best);
    return *best;
  }

 private:
  const IndependentInstance& instance_;
  const Objective& f_;
  Value q_;
  std::map<std::vector<std::uint64_t>, Rational> memo_;
};

}  // namespace

Rational optimal_adaptive_scenario(const ScenarioInstance& instance) {
  if (instance.scenario_count() > 12 || instance.item_count() > 12) {
    throw SizeGuardError("adaptive optimum needs s <= 12 and m <= 12");
  }
  ScenarioOpt opt(instance);
  const auto all = static_cast<std::uint32_t>((std::uint64_t{1} << instance.scenario_count()) - 1);
  return opt.solve(all, ElementSet(instance.groundset_size()));
}

Rational optimal_adaptive_independent(const IndependentInstance& instance) {
  std::vector<ItemId> all(instance.item_count());
  std::iota(all.begin(), all.end(), ItemId{0});
  if (instance.item_count() > 6 || instance.support_product(all, 4097) > 4096) {
    throw SizeGuardError("adaptive optimum needs m <= 6 and support product <= 4096");
  }
  IndependentOpt opt(instance);
  return opt.solve(0, ElementSet(instance.groundset_size()));
}

namespace {

class BranchAndBound {
 public:
  BranchAndBound(const Objective& f, std::span<const ElementSet> sets, std::span<const Cost> costs)
      : f_(f), sets_(sets), costs_(costs), q_(f.max_value()) {}

  // Fractional knapsack over current marginal gains: a lower bound on the
  // cost still needed, valid by submodularity. nullopt if unreachable.
  std::optional<Rational> bound(const ElementSet& current, Value value, const std::vector<bool>& decided) const {
    const Value need = q_ - value;
    if (need <= 0) return Rational(0);
    struct Cand {
      Value gain;
      Cost cost;
    };
    std::vector<Cand> cands;
    Value reach = 0;
    for (std::size_t i = 0; i < sets_.size(); ++i) {
      if (decided[i]) continue;
      const Value g = f_.value_union(current, sets_[i]) - value;
      if (g <= 0) continue;
      cands.push_back({g, costs_[i]});
      reach += g;
    }
    if (reach < need) return std::nullopt;
    std::sort(cands.begin(), cands.end(), [](const Cand& a, const Cand& b) {
      return static_cast<__int128>(a.gain) * b.cost > static_cast<__int128>(b.gain) * a.cost;
    });
    Rational lb = 0;
    Value left = need;
    for (const auto& c : cands) {
      if (c.gain >= left) {
        lb += Rational(c.cost) * Rational(left) / Rational(c.gain);
        break;
      }
      lb += Rational(c.cost);
      left -= c.gain;
    }
    return lb;
  }

  Cost greedy(ElementSet current) const {
    Value value = f_.value(current);
    Cost total = 0;
    std::vector<bool> used(sets_.size(), false);
    while (value < q_) {
      std::size_t best = sets_.size();
      Value best_gain = 0;
      for (std::size_t i = 0; i < sets_.size(); ++i) {
        if (used[i]) continue;
        const Value g = f_.value_union(current, sets_[i]) - value;
        if (g <= 0) continue;
        if (best == sets_.size() ||
            static_cast<__int128>(g) * costs_[best] > static_cast<__int128>(best_gain) * costs_[i]) {
          best = i;
          best_gain = g;
        }
      }
      if (best == sets_.size()) throw InfeasibleError("offline optimum: the realization cannot reach Q");
      used[best] = true;
      current |= sets_[best];
      value = f_.value(current);
      total += costs_[best];
    }
    return total;
  }

  void search(const ElementSet& current, Value value, Cost spent, std::vector<bool>& decided) {
    if (value >= q_) {
      incumbent_ = std::min(incumbent_, spent);
      return;
    }
    const auto lb = bound(current, value, decided);
    if (!lb || spent + static_cast<Cost>(ceil(*lb).get_si()) >= incumbent_) return;
    // branch on the best-ratio undecided item
    std::size_t pick = sets_.size();
    Value pick_gain = 0;
    for (std::size_t i = 0; i < sets_.size(); ++i) {
      if (decided[i]) continue;
      const Value g = f_.value_union(current, sets_[i]) - value;
      if (g <= 0) continue;
      if (pick == sets_.size() ||
          static_cast<__int128>(g) * costs_[pick] > static_cast<__int128>(pick_gain) * costs_[i]) {
        pick = i;
        pick_gain = g;
      }
    }
    decided[pick] = true;
    const ElementSet with = current | sets_[pick];
    search(with, f_.value(with), spent + costs_[pick], decided);
    search(current, value, spent, decided);
    decided[pick] = false;
  }

  Cost incumbent_ = 0;

 private:
  const Objective& f_;
  std::span<const ElementSet> sets_;
  std::span<const Cost> costs_;
  Value q_;
};

}  // namespace

OfflineResult offline_optimal(const Objective& f, std::span<const ElementSet> realizations,
                              std::span<const Cost> costs) {
  if (realizations.size() != costs.size()) throw InputError("offline optimum: one cost per item required");
  BranchAndBound bb(f, realizations, costs);
  const ElementSet empty(f.groundset_size());
  const Value v0 = f.value(empty);
  std::vector<bool> decided(realizations.size(), false);
  if (realizations.size() > 40) {
    const auto lb = bb.bound(empty, v0, decided);
    if (!lb) throw InfeasibleError("offline optimum: the realization cannot reach Q");
    return {static_cast<Cost>(ceil(*lb).get_si()), false};
  }
  bb.incumbent_ = bb.greedy(empty);
  bb.search(empty, v0, 0, decided);
  return {bb.incumbent_, true};
}

OfflineResult offline_optimal(const IndependentInstance& instance, std::span<const OutcomeIndex> outcomes) {
  if (outcomes.size() != instance.item_count()) throw InputError("offline optimum: one outcome per item required");
  std::vector<ElementSet> sets;
  std::vector<Cost> costs;
  for (std::size_t i = 0; i < instance.item_count(); ++i) {
    const auto& item = instance.item(static_cast<ItemId>(i));
    if (outcomes[i] >= item.outcomes.size()) throw InputError("offline optimum: unknown outcome index");
    sets.push_back(item.outcomes[outcomes[i]].elements);
    costs.push_back(item.cost);
  }
  return offline_optimal(*instance.objective(), sets, costs);
}

OfflineResult offline_optimal(const ScenarioInstance& instance, ScenarioId scenario) {
  if (scenario >= instance.scenario_count()) throw InputError("offline optimum: scenario out of range");
  std::vector<ElementSet> sets;
  std::vector<Cost> costs;
  for (const auto& item : instance.items()) {
    sets.push_back(item.realization(scenario));
    costs.push_back(item.cost);
  }
  return offline_optimal(*instance.objective(), sets, costs);
}

EntropyBound entropy_lower_bound(const ScenarioInstance& instance) {
  EntropyBound out;
  out.heuristic = !instance.unit_costs();
  if (instance.uniform_probabilities()) {
    out.kind = "log2(s)";
    out.bits = std::log2(static_cast<double>(instance.scenario_count()));
    return out;
  }
  out.kind = "H(p)";
  for (const Rational& p : instance.probabilities()) {
    const double x = p.get_d();
    if (x > 0) out.bits -= x * std::log2(x);
  }
  return out;
}

}  // namespace roundcover
