#include "support.hpp"

#include <algorithm>
#include <limits>
#include <map>

#include "roundcover/objective.hpp"

namespace rctest {

ElementSet random_subset(Rng& rng, std::size_t universe, double p) {
  ElementSet s(universe);
  for (Element e = 0; e < universe; ++e) {
    if (rng.bernoulli(p)) s.insert(e);
  }
  return s;
}

namespace {

std::size_t between(Rng& rng, std::size_t lo, std::size_t hi) {
  return lo + static_cast<std::size_t>(rng.uniform_index(hi - lo + 1));
}

std::vector<Rational> random_weights(Rng& rng, std::size_t n) {
  std::vector<Rational> w(n);
  Rational total = 0;
  for (auto& x : w) {
    x = Rational(static_cast<long>(1 + rng.uniform_index(4)));
    total += x;
  }
  for (auto& x : w) x /= total;
  return w;
}

void visit_rec(const IndependentInstance& inst, std::vector<OutcomeIndex>& outcomes, std::size_t i, const Rational& p,
               const std::function<void(const std::vector<OutcomeIndex>&, const Rational&)>& visit) {
  if (i == inst.item_count()) {
    visit(outcomes, p);
    return;
  }
  const auto& item = inst.item(static_cast<ItemId>(i));
  for (OutcomeIndex o = 0; o < item.outcomes.size(); ++o) {
    outcomes[i] = o;
    visit_rec(inst, outcomes, i + 1, p * item.outcomes[o].probability, visit);
  }
}

}  // namespace

void for_each_realization(const IndependentInstance& instance,
                          const std::function<void(const std::vector<OutcomeIndex>&, const Rational&)>& visit) {
  std::vector<OutcomeIndex> outcomes(instance.item_count(), 0);
  visit_rec(instance, outcomes, 0, Rational(1), visit);
}

IndependentInstance random_independent(Rng& rng, const IndependentShape& shape) {
  for (;;) {
    const std::size_t n = between(rng, 2, std::max<std::size_t>(2, shape.max_groundset));
    const std::size_t m = between(rng, shape.min_items, shape.max_items);
    std::vector<IndependentItem> items(m);
    std::uint64_t product = 1;
    for (auto& item : items) {
      std::size_t k = between(rng, 1, shape.max_support);
      while (k > 1 && product * k > shape.max_product) --k;
      product *= k;
      item.cost = static_cast<Cost>(1 + rng.uniform_index(static_cast<std::uint64_t>(shape.max_cost)));
      const auto probs = random_weights(rng, k);
      for (std::size_t o = 0; o < k; ++o) item.outcomes.push_back({random_subset(rng, n, 0.4), probs[o]});
    }
    // Q = worst-case coverage of probing everything.
    Value q = std::numeric_limits<Value>::max();
    std::vector<OutcomeIndex> pick(m, 0);
    std::function<void(std::size_t, ElementSet)> worst = [&](std::size_t i, ElementSet acc) {
      if (i == m) {
        q = std::min<Value>(q, static_cast<Value>(acc.count()));
        return;
      }
      for (const auto& o : items[i].outcomes) worst(i + 1, acc | o.elements);
    };
    worst(0, ElementSet(n));
    if (q < 1) continue;
    q = 1 + static_cast<Value>(rng.uniform_index(static_cast<std::uint64_t>(q)));
    return IndependentInstance(std::make_shared<TruncatedCoverage>(n, q), std::move(items));
  }
}

ScenarioInstance random_scenario(Rng& rng, const ScenarioShape& shape) {
  for (;;) {
    const std::size_t n = between(rng, 2, std::max<std::size_t>(2, shape.max_groundset));
    const std::size_t m = between(rng, shape.min_items, shape.max_items);
    const std::size_t s = between(rng, shape.min_scenarios, shape.max_scenarios);
    std::vector<ScenarioItem> items(m);
    std::vector<ElementSet> full(s, ElementSet(n));
    for (auto& item : items) {
      item.cost = static_cast<Cost>(1 + rng.uniform_index(static_cast<std::uint64_t>(shape.max_cost)));
      std::vector<OutcomeIndex> assign(s);
      for (std::size_t w = 0; w < s; ++w) {
        ElementSet x = random_subset(rng, n, 0.4);
        full[w] |= x;
        auto it = std::find(item.outcomes.begin(), item.outcomes.end(), x);
        if (it == item.outcomes.end()) {
          item.outcomes.push_back(x);
          it = item.outcomes.end() - 1;
        }
        assign[w] = static_cast<OutcomeIndex>(it - item.outcomes.begin());
      }
      item.assignment = OutcomeAssignment::dense(std::move(assign));
    }
    Value q = std::numeric_limits<Value>::max();
    for (const auto& x : full) q = std::min<Value>(q, static_cast<Value>(x.count()));
    if (q < 1) continue;
    q = 1 + static_cast<Value>(rng.uniform_index(static_cast<std::uint64_t>(q)));
    std::vector<Rational> probs = shape.uniform ? std::vector<Rational>(s, Rational(1, static_cast<long>(s)))
                                                : random_weights(rng, s);
    return ScenarioInstance(std::make_shared<TruncatedCoverage>(n, q), std::move(items), std::move(probs));
  }
}

namespace {

Rational scenario_rec(const ScenarioInstance& inst, const std::vector<ScenarioId>& h, std::vector<bool>& probed,
                      const ElementSet& realized) {
  const Objective& f = *inst.objective();
  const Value v = f.value(realized);
  if (v == f.max_value()) return 0;
  Rational mass = 0;
  for (ScenarioId w : h) mass += inst.probability(w);
  std::optional<Rational> best;
  for (ItemId e = 0; e < inst.item_count(); ++e) {
    if (probed[e]) continue;
    std::map<OutcomeIndex, std::vector<ScenarioId>> classes;
    for (ScenarioId w : h) classes[inst.outcome(e, w)].push_back(w);
    if (classes.size() == 1) {
      const auto& x = inst.item(e).outcomes[classes.begin()->first];
      if (f.value(realized | x) == v) continue;  // no information, no progress
    }
    probed[e] = true;
    Rational total = inst.item(e).cost;
    for (const auto& [o, part] : classes) {
      Rational p = 0;
      for (ScenarioId w : part) p += inst.probability(w);
      total += p / mass * scenario_rec(inst, part, probed, realized | inst.item(e).outcomes[o]);
    }
    probed[e] = false;
    if (!best || total < *best) best = total;
  }
  if (!best) throw InfeasibleError("brute_adaptive_scenario: uncoverable state");
  return *best;
}

Rational independent_rec(const IndependentInstance& inst, std::vector<int>& state, const ElementSet& realized) {
  const Objective& f = *inst.objective();
  if (f.value(realized) == f.max_value()) return 0;
  std::optional<Rational> best;
  for (ItemId e = 0; e < inst.item_count(); ++e) {
    if (state[e] >= 0) continue;
    const auto& item = inst.item(e);
    Rational total = item.cost;
    for (OutcomeIndex o = 0; o < item.outcomes.size(); ++o) {
      state[e] = static_cast<int>(o);
      total += item.outcomes[o].probability * independent_rec(inst, state, realized | item.outcomes[o].elements);
    }
    state[e] = -1;
    if (!best || total < *best) best = total;
  }
  if (!best) throw InfeasibleError("brute_adaptive_independent: uncoverable state");
  return *best;
}

}  // namespace

Rational brute_adaptive_scenario(const ScenarioInstance& instance) {
  std::vector<ScenarioId> all(instance.scenario_count());
  for (ScenarioId w = 0; w < all.size(); ++w) all[w] = w;
  std::vector<bool> probed(instance.item_count(), false);
  return scenario_rec(instance, all, probed, ElementSet(instance.groundset_size()));
}

Rational brute_adaptive_independent(const IndependentInstance& instance) {
  std::vector<int> state(instance.item_count(), -1);
  return independent_rec(instance, state, ElementSet(instance.groundset_size()));
}

Cost brute_offline(const Objective& f, std::span<const ElementSet> realizations, std::span<const Cost> costs) {
  const std::size_t m = realizations.size();
  Cost best = std::numeric_limits<Cost>::max();
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << m); ++mask) {
    ElementSet s(f.groundset_size());
    Cost c = 0;
    for (std::size_t i = 0; i < m; ++i) {
      if (mask >> i & 1) {
        s |= realizations[i];
        c += costs[i];
      }
    }
    if (c < best && f.value(s) == f.max_value()) best = c;
  }
  if (best == std::numeric_limits<Cost>::max()) throw InfeasibleError("brute_offline: no cover");
  return best;
}

Rational brute_score(const IndependentInstance& instance, const Objective& f, const Threshold& threshold,
                     std::span<const ItemId> prefix, ItemId e) {
  Rational total = 0;
  const Value q = threshold.q;
  std::function<void(std::size_t, ElementSet, Rational)> rec = [&](std::size_t i, ElementSet s, Rational p) {
    if (i == prefix.size()) {
      const Value v = f.value(s);
      if (v > threshold.tau_floor) return;
      for (const auto& o : instance.item(e).outcomes) {
        total += p * o.probability * ratio(BigInt(f.value(s | o.elements) - v), BigInt(q - v));
      }
      return;
    }
    for (const auto& o : instance.item(prefix[i]).outcomes) rec(i + 1, s | o.elements, p * o.probability);
  };
  rec(0, ElementSet(instance.groundset_size()), Rational(1));
  return total / instance.item(e).cost;
}

Rational scenario_expectation(const ScenarioInstance& instance, const std::function<Cost(ScenarioId)>& cost) {
  Rational total = 0;
  for (ScenarioId w = 0; w < instance.scenario_count(); ++w) total += instance.probability(w) * cost(w);
  return total;
}

std::vector<Cost> costs_of(const IndependentInstance& instance) {
  std::vector<Cost> c;
  for (const auto& item : instance.items()) c.push_back(item.cost);
  return c;
}

std::vector<Cost> costs_of(const ScenarioInstance& instance) {
  std::vector<Cost> c;
  for (const auto& item : instance.items()) c.push_back(item.cost);
  return c;
}

}  // namespace rctest
