#include "roundcover/setbased.hpp"

#include <algorithm>
#include <functional>

namespace roundcover {

namespace {

std::uint64_t key_seed(std::uint64_t seed, const std::vector<std::uint64_t>& key) {
  return splitmix64(seed ^ StableHasher().add(key).value());
}

// Expected cost of probing the list from position i on, given the prefix
// before it realized `realized`.
Rational expected_probe_cost(const IndependentInstance& instance, const Objective& f, ParcaList& list, std::size_t i,
                             const ElementSet& realized, Value value) {
  if (!list.threshold().below(value)) return Rational(0);
  if (i >= list.size()) throw InvariantViolation("ParCA list exhausted below its threshold");
  const auto& item = instance.item(list.at(i));
  Rational total(item.cost);
  for (const auto& o : item.outcomes) {
    const ElementSet u = realized | o.elements;
    total += o.probability * expected_probe_cost(instance, f, list, i + 1, u, f.value(u));
  }
  return total;
}

}  // namespace

RoundCostEstimate estimate_round_cost(const IndependentInstance& instance, const Objective& f, ParcaList& list,
                                      std::size_t trials, std::uint64_t seed, std::uint64_t exact_limit) {
  RoundCostEstimate out;
  if (instance.support_product(list.available(), exact_limit + 1) <= exact_limit) {
    const ElementSet empty(instance.groundset_size());
    out.mu = expected_probe_cost(instance, f, list, 0, empty, f.value(empty));
    out.exact = true;
    return out;
  }
  if (trials == 0) throw InputError("round-cost estimation needs at least one trial");
  BigInt total = 0;
  for (std::size_t j = 0; j < trials; ++j) {
    SampledRealization oracle(instance, splitmix64(seed + j));
    total += BigInt(static_cast<long>(parca_probe(instance, f, list, oracle).cost));
  }
  out.mu = ratio(total, BigInt(static_cast<unsigned long>(trials)));
  out.samples = trials;
  return out;
}

RoundCostEstimate estimate_round_cost(const ScenarioInstance& instance, const Objective& f, SparcaList& list,
                                      std::size_t trials, std::uint64_t seed, std::uint64_t exact_limit) {
  RoundCostEstimate out;
  const auto& live = list.live();
  if (live.size() <= exact_limit) {
    BigInt weighted = 0;
    BigInt mass = 0;
    for (ScenarioId w : live) {
      ScenarioRealization oracle(instance, w);
      weighted += instance.weight(w) * BigInt(static_cast<long>(sparca_probe(instance, f, list, oracle).cost));
      mass += instance.weight(w);
    }
    out.mu = ratio(weighted, mass);
    out.exact = true;
    return out;
  }
  if (trials == 0) throw InputError("round-cost estimation needs at least one trial");
  std::vector<double> weights;
  weights.reserve(live.size());
  for (ScenarioId w : live) weights.push_back(instance.weight(w).get_d());
  Rng rng(seed);
  BigInt total = 0;
  for (std::size_t j = 0; j < trials; ++j) {
    ScenarioRealization oracle(instance, live[rng.weighted_index(weights)]);
    total += BigInt(static_cast<long>(sparca_probe(instance, f, list, oracle).cost));
  }
  out.mu = ratio(total, BigInt(static_cast<unsigned long>(trials)));
  out.samples = trials;
  return out;
}

namespace {

void check_policy(const SetRoundPolicy& policy) {
  if (policy.rounds < 1) throw InputError("number of rounds must be >= 1");
  if (policy.mode == SetMode::kSmallR && (policy.eta <= 0 || policy.eta >= 1)) {
    throw InputError("eta must lie in (0, 1)");
  }
  if (policy.mu_trials == 0) throw InputError("mu_trials must be positive");
}

int round_limit(const SetRoundPolicy& policy, bool scenario) {
  if (policy.mode == SetMode::kSmallR) return policy.rounds;
  return (scenario ? 4 : 2) * policy.rounds;
}

Cost budget_for(const SetRoundPolicy& policy, const Rational& mu) {
  const Rational factor = policy.mode == SetMode::kSmallR ? Rational(policy.rounds) / policy.eta : Rational(4);
  return static_cast<Cost>(ceil(factor * mu).get_si());
}

// Longest list prefix whose total cost stays within the budget.
template <class List, class CostOf>
std::vector<ItemId> budget_prefix(List& list, Cost budget, CostOf&& cost_of) {
  std::vector<ItemId> batch;
  Cost spent = 0;
  for (std::size_t i = 0; i < list.size(); ++i) {
    const ItemId e = list.at(i);
    if (spent + cost_of(e) > budget) break;
    spent += cost_of(e);
    batch.push_back(e);
  }
  return batch;
}

const RoundCostEstimate& cached_estimate(SetBasedCache& cache, std::vector<std::uint64_t> key,
                                         const std::function<RoundCostEstimate()>& compute) {
  auto it = cache.mu.find(key);
  if (it == cache.mu.end()) it = cache.mu.emplace(std::move(key), compute()).first;
  return it->second;
}

}  // namespace

SetRoundTranscript run_set_based(const SetRoundPolicy& policy, const IndependentInstance& instance,
                                 RealizationSource& oracle, SetBasedCache* cache) {
  check_policy(policy);
  SetBasedCache local_cache;
  SetBasedCache& c = cache ? *cache : local_cache;
  const ObjectivePtr& f = instance.objective();
  const Value q = f->max_value();

  SetRoundTranscript out;
  out.round_limit = round_limit(policy, false);
  out.transcript.target = q;
  ElementSet probed(instance.item_count());
  ElementSet realized(instance.groundset_size());
  Value value = f->value(realized);

  for (int k = 1; k <= out.round_limit && value < q; ++k) {
    const Value qk = q - value;
    const RationalRoot delta =
        policy.mode == SetMode::kSmallR
            ? RationalRoot::inverse_root(BigInt(static_cast<long>(qk)), static_cast<unsigned>(policy.rounds - k + 1))
            : RationalRoot::inverse_root(BigInt(static_cast<long>(q)), static_cast<unsigned>(policy.rounds));
    const Threshold threshold = Threshold::from_delta(qk, delta);
    const ObjectivePtr g = residual(f, realized);
    ParcaList& list = c.parca.get(instance, f, probed, realized, threshold, policy.parca);

    std::vector<std::uint64_t> key{0};
    const auto state = parca_state_key(probed, realized, threshold.t);
    key.insert(key.end(), state.begin(), state.end());
    const std::uint64_t mu_seed = key_seed(policy.seed, key);
    const RoundCostEstimate& est = cached_estimate(c, std::move(key), [&] {
      return estimate_round_cost(instance, *g, list, policy.mu_trials, mu_seed);
    });
    const Cost budget = budget_for(policy, est.mu);
    const auto batch = budget_prefix(list, budget, [&](ItemId e) { return instance.item(e).cost; });

    RoundRecord round;
    round.kind = "batch";
    round.delta = to_string(threshold.effective_delta());
    ElementSet batch_realized(instance.groundset_size());
    for (ItemId e : batch) {
      const OutcomeIndex o = oracle.observe(e);
      const auto& item = instance.item(e);
      if (o >= item.outcomes.size()) throw InputError("realization source returned an unknown outcome");
      round.probed.push_back(e);
      round.observed.push_back(item.outcomes[o].elements);
      round.cost += item.cost;
      batch_realized |= item.outcomes[o].elements;
      probed.insert(e);
    }
    out.success.push_back(!threshold.below(g->value(batch_realized)));
    realized |= batch_realized;
    value = f->value(realized);
    round.value_after = value;
    out.transcript.total_cost += round.cost;
    out.transcript.rounds.push_back(std::move(round));
    out.mu.push_back(est.mu);
    out.budget.push_back(budget);
  }
  out.transcript.final_value = value;
  out.transcript.covered = value == q;
  return out;
}

SetRoundTranscript run_set_based(const SetRoundPolicy& policy, const ScenarioInstance& instance,
                                 RealizationSource& oracle, SetBasedCache* cache) {
  check_policy(policy);
  SetBasedCache local_cache;
  SetBasedCache& c = cache ? *cache : local_cache;
  const ObjectivePtr& f = instance.objective();
  const Value q = f->max_value();

  SetRoundTranscript out;
  out.round_limit = round_limit(policy, true);
  out.transcript.target = q;
  ElementSet probed(instance.item_count());
  ElementSet realized(instance.groundset_size());
  std::vector<ScenarioId> live(instance.scenario_count());
  for (std::size_t w = 0; w < live.size(); ++w) live[w] = static_cast<ScenarioId>(w);
  Value value = f->value(realized);

  SparcaConfig large_config;
  if (policy.mode == SetMode::kLargeR && q > 0) {
    const auto r = static_cast<unsigned>(policy.rounds);
    large_config.delta = RationalRoot::inverse_root(BigInt(static_cast<unsigned long>(instance.scenario_count())), r);
    large_config.epsilon = RationalRoot::inverse_root(BigInt(static_cast<long>(q)), r);
  }

  for (int k = 1; k <= out.round_limit && value < q; ++k) {
    SparcaConfig config = large_config;
    if (policy.mode == SetMode::kSmallR) {
      config.delta = RationalRoot::inverse_root(BigInt(static_cast<unsigned long>(live.size())),
                                                static_cast<unsigned>(policy.rounds - k + 1));
    }
    const ObjectivePtr g = residual(f, realized);
    SparcaList& list = c.sparca.get(instance, f, probed, live, realized, config);

    std::vector<std::uint64_t> key{1};
    const auto state = sparca_state_key(instance, probed, live, config);
    key.insert(key.end(), state.begin(), state.end());
    const std::uint64_t mu_seed = key_seed(policy.seed, key);
    const RoundCostEstimate& est = cached_estimate(c, std::move(key), [&] {
      return estimate_round_cost(instance, *g, list, policy.mu_trials, mu_seed);
    });
    const Cost budget = budget_for(policy, est.mu);
    const auto batch = budget_prefix(list, budget, [&](ItemId e) { return instance.item(e).cost; });

    RoundRecord round;
    round.kind = "batch";
    round.delta = config.delta.str();
    if (config.epsilon) round.epsilon = config.epsilon->str();
    ElementSet batch_realized(instance.groundset_size());
    for (ItemId e : batch) {
      const OutcomeIndex o = oracle.observe(e);
      const auto& item = instance.item(e);
      if (o >= item.outcomes.size()) throw InputError("realization source returned an unknown outcome");
      std::erase_if(live, [&](ScenarioId w) { return item.assignment(w) != o; });
      if (live.empty()) {
        throw InputError("observed realization of item " + std::to_string(e) + " matches no live scenario");
      }
      round.probed.push_back(e);
      round.observed.push_back(item.outcomes[o]);
      round.cost += item.cost;
      batch_realized |= item.outcomes[o];
      probed.insert(e);
    }
    const LargePartRule& rule = list.rule();
    const Value batch_value = g->value(batch_realized);
    out.success.push_back(!rule.large_size(live.size()) || batch_value >= rule.q || !rule.below_target(batch_value));
    realized |= batch_realized;
    value = f->value(realized);
    round.value_after = value;
    round.compatible_after = live.size();
    out.transcript.total_cost += round.cost;
    out.transcript.rounds.push_back(std::move(round));
    out.mu.push_back(est.mu);
    out.budget.push_back(budget);
  }
  out.transcript.final_value = value;
  out.transcript.covered = value == q;
  return out;
}

IndependentInstance motivating_example(int m) {
  if (m < 1 || m > 40) throw InputError("motivating example needs 1 <= m <= 40");
  std::vector<IndependentItem> items;
  for (int i = 1; i <= m; ++i) {
    IndependentItem item;
    item.cost = Cost{1} << i;
    if (i < m) {
      item.outcomes.push_back({ElementSet(1, {0}), Rational(1, 2)});
      item.outcomes.push_back({ElementSet(1), Rational(1, 2)});
    } else {
      item.outcomes.push_back({ElementSet(1, {0}), Rational(1)});
    }
    items.push_back(std::move(item));
  }
  Metadata meta{{"generator", "motivating"}, {"m", std::to_string(m)}};
  return IndependentInstance(std::make_shared<TruncatedCoverage>(1, 1), std::move(items), std::move(meta));
}

Rational motivating_permutation_cost(int m) {
  const IndependentInstance inst = motivating_example(m);
  Rational reach(1);
  Rational total(0);
  for (int i = 0; i < m; ++i) {
    total += reach * Rational(inst.item(static_cast<ItemId>(i)).cost);
    reach /= 2;
  }
  return total;
}

Rational motivating_set_based_optimum(int m, int r) {
  if (m < 1 || r < 1) throw InputError("motivating optimum needs m, r >= 1");
  double combos = 1;
  for (int i = 0; i < m; ++i) combos *= r + 1;
  if (combos > 1e7) throw SizeGuardError("motivating optimum: (r+1)^m exceeds 10^7");

  // round[i] in 0..r, 0 meaning never probed. Item m (the sure one) must be
  // probed, otherwise the realization where every coin fails is uncovered.
  std::vector<int> round(static_cast<std::size_t>(m), 0);
  std::optional<Rational> best;
  std::vector<Cost> round_cost(static_cast<std::size_t>(r) + 1);
  std::vector<int> random_items(static_cast<std::size_t>(r) + 1);
  std::vector<bool> has_sure(static_cast<std::size_t>(r) + 1);
  while (true) {
    if (round.back() != 0) {
      std::fill(round_cost.begin(), round_cost.end(), 0);
      std::fill(random_items.begin(), random_items.end(), 0);
      std::fill(has_sure.begin(), has_sure.end(), false);
      for (int i = 0; i < m; ++i) {
        const auto j = static_cast<std::size_t>(round[static_cast<std::size_t>(i)]);
        if (j == 0) continue;
        round_cost[j] += Cost{1} << (i + 1);
        if (i + 1 == m) {
          has_sure[j] = true;
        } else {
          ++random_items[j];
        }
      }
      Rational reach(1);
      Rational total(0);
      for (int j = 1; j <= r && reach > 0; ++j) {
        total += reach * Rational(round_cost[static_cast<std::size_t>(j)]);
        if (has_sure[static_cast<std::size_t>(j)]) {
          reach = 0;
        } else {
          for (int c = 0; c < random_items[static_cast<std::size_t>(j)]; ++c) reach /= 2;
        }
      }
      if (!best || total < *best) best = total;
    }
    std::size_t pos = 0;
    while (pos < round.size() && round[pos] == r) round[pos++] = 0;
    if (pos == round.size()) break;
    ++round[pos];
  }
  return *best;
}

}  // namespace roundcover
