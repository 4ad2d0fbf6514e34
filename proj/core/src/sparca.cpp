#include "roundcover/sparca.hpp"

#include <algorithm>
#include <map>

namespace roundcover {

bool LargePartRule::large_size(std::size_t part_size) const {
  return delta.covers_fraction(BigInt(static_cast<unsigned long>(part_size)),
                               BigInt(static_cast<unsigned long>(scenarios)));
}

bool LargePartRule::below_target(Value v) const {
  if (!epsilon) return true;
  // v <= Q(1 - eps)  <=>  Q - v >= eps * Q
  if (v > q) return false;
  return epsilon->covers_fraction(BigInt(static_cast<long>(q - v)), BigInt(static_cast<long>(q)));
}

namespace {

// Reusable per-outcome accumulators for grouping a part by one item.
struct Grouping {
  std::vector<std::size_t> counts;
  std::vector<BigInt> weights;
  std::vector<OutcomeIndex> touched;

  void reset(std::size_t outcomes) {
    for (OutcomeIndex o : touched) {
      counts[o] = 0;
      weights[o] = 0;
    }
    touched.clear();
    if (counts.size() < outcomes) {
      counts.resize(outcomes, 0);
      weights.resize(outcomes, 0);
    }
  }

  void add(OutcomeIndex o, const BigInt& w) {
    if (counts[o] == 0) touched.push_back(o);
    ++counts[o];
    weights[o] += w;
  }
};

OutcomeIndex largest_class(const ScenarioItem& item, const Grouping& g) {
  OutcomeIndex best = g.touched.front();
  for (OutcomeIndex o : g.touched) {
    if (g.counts[o] > g.counts[best] ||
        (g.counts[o] == g.counts[best] && lex_less(item.outcomes[o], item.outcomes[best]))) {
      best = o;
    }
  }
  return best;
}

// Contribution of part Z to score(e), in units of the instance's integer
// scenario weights and before dividing by c_e.
Rational part_term(const ScenarioInstance& instance, const Objective& f, Value q,
                   std::span<const ScenarioId> members, const ElementSet& realized, Value value, ItemId e,
                   Grouping& g) {
  const auto& item = instance.item(e);
  g.reset(item.outcomes.size());
  BigInt total = 0;
  for (ScenarioId w : members) {
    g.add(item.assignment(w), instance.weight(w));
    total += instance.weight(w);
  }
  const OutcomeIndex big = largest_class(item, g);
  Rational term(total - g.weights[big]);
  const Value residual_q = q - value;
  if (residual_q > 0) {
    BigInt gain = 0;
    for (OutcomeIndex o : g.touched) {
      const Value d = f.value_union(realized, item.outcomes[o]) - value;
      if (d != 0) gain += g.weights[o] * d;
    }
    if (gain != 0) term += ratio(gain, BigInt(static_cast<long>(residual_q)));
  }
  return term;
}

Rational to_score(const ScenarioInstance& instance, const Rational& weighted, Cost cost) {
  Rational out = weighted / Rational(instance.common_denominator());
  out /= Rational(cost);
  return out;
}

}  // namespace

ScenarioPartition partition_by_prefix(const ScenarioInstance& instance, const Objective& f,
                                      std::span<const ItemId> prefix, std::span<const ScenarioId> live,
                                      const LargePartRule& rule) {
  std::vector<ScenarioId> sorted(live.begin(), live.end());
  std::sort(sorted.begin(), sorted.end());
  ScenarioPartition out;
  std::map<std::vector<OutcomeIndex>, std::size_t> index;
  for (ScenarioId w : sorted) {
    std::vector<OutcomeIndex> signature;
    signature.reserve(prefix.size());
    for (ItemId e : prefix) signature.push_back(instance.outcome(e, w));
    auto [it, inserted] = index.emplace(std::move(signature), out.parts.size());
    if (inserted) {
      ElementSet realized(instance.groundset_size());
      for (ItemId e : prefix) realized |= instance.item(e).realization(w);
      out.parts.emplace_back();
      out.values.push_back(f.value(realized));
      out.realized.push_back(std::move(realized));
    }
    out.parts[it->second].push_back(w);
  }
  for (std::size_t i = 0; i < out.parts.size(); ++i) {
    if (rule.large(out.parts[i].size(), out.values[i])) out.large.push_back(i);
  }
  return out;
}

ItemSplit split_by_item(const ScenarioInstance& instance, std::span<const ScenarioId> z, ItemId e) {
  if (z.empty()) throw InputError("split_by_item on an empty part");
  const auto& item = instance.item(e);
  Grouping g;
  g.reset(item.outcomes.size());
  for (ScenarioId w : z) g.add(item.assignment(w), BigInt(0));
  ItemSplit out;
  out.big_outcome = largest_class(item, g);
  for (ScenarioId w : z) {
    (item.assignment(w) == out.big_outcome ? out.big : out.little).push_back(w);
  }
  return out;
}

Rational scenario_score(const ScenarioInstance& instance, const Objective& f, Value q,
                        const ScenarioPartition& partition, ItemId e) {
  Grouping g;
  Rational total = 0;
  for (std::size_t i : partition.large) {
    total += part_term(instance, f, q, partition.parts[i], partition.realized[i], partition.values[i], e, g);
  }
  return to_score(instance, total, instance.item(e).cost);
}

SparcaList::SparcaList(const ScenarioInstance& instance, ObjectivePtr f, std::vector<ItemId> available,
                       std::vector<ScenarioId> live, const SparcaConfig& config)
    : instance_(&instance),
      f_(std::move(f)),
      available_(std::move(available)),
      live_(std::move(live)),
      taken_(available_.size(), false) {
  std::sort(available_.begin(), available_.end());
  std::sort(live_.begin(), live_.end());
  if (live_.empty()) throw InputError("SParCA needs at least one live scenario");
  if (!config.delta.at_most(Rational(1)) || config.delta.radicand <= 0) throw InputError("delta must lie in (0, 1]");
  if (config.epsilon && (!config.epsilon->at_most(Rational(1)) || config.epsilon->radicand <= 0)) {
    throw InputError("epsilon must lie in (0, 1]");
  }
  rule_ = LargePartRule{config.delta, config.epsilon, live_.size(), f_->max_value()};
  const ElementSet empty(instance.groundset_size());
  const Value v = f_->value(empty);
  if (rule_.large(live_.size(), v)) parts_.push_back({live_, empty, v});
}

ItemId SparcaList::at(std::size_t i) {
  if (i >= available_.size()) throw InputError("list position out of range");
  while (list_.size() <= i) extend();
  return list_[i];
}

const std::vector<ItemId>& SparcaList::materialize() {
  while (list_.size() < available_.size()) extend();
  return list_;
}

void SparcaList::extend() {
  const Objective& f = *f_;
  Grouping g;
  last_scores_.assign(available_.size(), Rational(0));
  std::size_t best = available_.size();
  for (std::size_t c = 0; c < available_.size(); ++c) {
    if (taken_[c]) continue;
    const ItemId e = available_[c];
    Rational total = 0;
    for (const auto& part : parts_) {
      total += part_term(*instance_, f, rule_.q, part.members, part.realized, part.value, e, g);
    }
    last_scores_[c] = to_score(*instance_, total, instance_->item(e).cost);
    if (best == available_.size() || last_scores_[c] > last_scores_[best]) best = c;
  }
  taken_[best] = true;
  const ItemId chosen = available_[best];
  list_.push_back(chosen);
  if (list_.size() < available_.size()) refine(chosen);
}

void SparcaList::refine(ItemId e) {
  const auto& item = instance_->item(e);
  std::vector<Part> next;
  for (auto& part : parts_) {
    std::map<OutcomeIndex, std::size_t> index;
    const std::size_t first = next.size();
    for (ScenarioId w : part.members) {
      const OutcomeIndex o = item.assignment(w);
      auto [it, inserted] = index.emplace(o, next.size());
      if (inserted) {
        ElementSet realized = part.realized | item.outcomes[o];
        const Value v = f_->value(realized);
        next.push_back({{}, std::move(realized), v});
      }
      next[it->second].members.push_back(w);
    }
    // drop sub-parts that are no longer large
    std::size_t keep = first;
    for (std::size_t i = first; i < next.size(); ++i) {
      if (rule_.large(next[i].members.size(), next[i].value)) {
        if (keep != i) next[keep] = std::move(next[i]);
        ++keep;
      }
    }
    next.resize(keep);
  }
  parts_ = std::move(next);
}

std::vector<std::uint64_t> sparca_state_key(const ScenarioInstance& instance, const ElementSet& probed,
                                            const std::vector<ScenarioId>& live, const SparcaConfig& config) {
  ElementSet live_mask(instance.scenario_count());
  for (ScenarioId w : live) live_mask.insert(w);
  std::vector<std::uint64_t> key(probed.words().begin(), probed.words().end());
  key.insert(key.end(), live_mask.words().begin(), live_mask.words().end());
  const std::string params = config.delta.str() + "|" + (config.epsilon ? config.epsilon->str() : "-");
  for (char c : params) key.push_back(static_cast<unsigned char>(c));
  return key;
}

std::unique_ptr<SparcaList> make_state_list(const ScenarioInstance& instance, const ObjectivePtr& base,
                                            const ElementSet& probed, const std::vector<ScenarioId>& live,
                                            const ElementSet& realized, const SparcaConfig& config) {
  std::vector<ItemId> available;
  for (std::size_t i = 0; i < instance.item_count(); ++i) {
    if (!probed.contains(static_cast<Element>(i))) available.push_back(static_cast<ItemId>(i));
  }
  return std::make_unique<SparcaList>(instance, residual(base, realized), std::move(available), live, config);
}

SparcaList& SparcaListCache::get(const ScenarioInstance& instance, const ObjectivePtr& base,
                                 const ElementSet& probed, const std::vector<ScenarioId>& live,
                                 const ElementSet& realized, const SparcaConfig& config) {
  auto key = sparca_state_key(instance, probed, live, config);
  const std::uint64_t h = StableHasher().add(key).value();
  auto& bucket = lists_[h];
  for (auto& [k, list] : bucket) {
    if (k == key) {
      ++hits_;
      return *list;
    }
  }
  if (entries_ >= max_entries_) {
    lists_.clear();
    entries_ = 0;
  }
  auto& slot = lists_[h];
  slot.emplace_back(std::move(key), make_state_list(instance, base, probed, live, realized, config));
  ++entries_;
  return *slot.back().second;
}

SparcaResult sparca_probe(const ScenarioInstance& instance, const Objective& f, SparcaList& list,
                          RealizationSource& oracle) {
  const LargePartRule& rule = list.rule();
  SparcaResult res;
  res.realized = ElementSet(instance.groundset_size());
  res.value = f.value(res.realized);
  res.compatible = list.live();
  auto keep_probing = [&] {
    if (!rule.large_size(res.compatible.size())) return false;
    if (res.value >= rule.q) return false;
    return rule.below_target(res.value);
  };
  std::size_t i = 0;
  for (; i < list.size() && keep_probing(); ++i) {
    const ItemId e = list.at(i);
    const OutcomeIndex o = oracle.observe(e);
    const auto& item = instance.item(e);
    if (o >= item.outcomes.size()) throw InputError("realization source returned an unknown outcome");
    std::erase_if(res.compatible, [&](ScenarioId w) { return item.assignment(w) != o; });
    if (res.compatible.empty()) {
      throw InputError("observed realization of item " + std::to_string(e) + " matches no live scenario");
    }
    res.probed.push_back(e);
    res.outcomes.push_back(o);
    res.realized |= item.outcomes[o];
    res.cost += item.cost;
    res.value = f.value(res.realized);
  }
  if (keep_probing()) throw InvariantViolation("SParCA ran out of items before its stopping rule fired");
  return res;
}

SparcaResult sparca_run(const ScenarioInstance& instance, const SparcaConfig& config, RealizationSource& oracle) {
  std::vector<ItemId> all(instance.item_count());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = static_cast<ItemId>(i);
  std::vector<ScenarioId> live(instance.scenario_count());
  for (std::size_t w = 0; w < live.size(); ++w) live[w] = static_cast<ScenarioId>(w);
  SparcaList list(instance, instance.objective(), std::move(all), std::move(live), config);
  return sparca_probe(instance, *instance.objective(), list, oracle);
}

namespace {

// Shared driver: `round_config(k, live, residual_q)` yields the config of
// round k, or nothing to stop.
template <class ConfigFor>
PolicyTranscript run_rounds(int rounds, const ScenarioInstance& instance, RealizationSource& oracle,
                            SparcaListCache* cache, const char* kind, ConfigFor&& round_config) {
  const ObjectivePtr& f = instance.objective();
  const Value q = f->max_value();
  ElementSet probed(instance.item_count());
  ElementSet realized(instance.groundset_size());
  std::vector<ScenarioId> live(instance.scenario_count());
  for (std::size_t w = 0; w < live.size(); ++w) live[w] = static_cast<ScenarioId>(w);

  PolicyTranscript transcript;
  transcript.target = q;
  Value value = f->value(realized);
  for (int k = 1; k <= rounds && value < q; ++k) {
    const SparcaConfig config = round_config(k, live.size(), q - value);
    const ObjectivePtr g = residual(f, realized);
    std::unique_ptr<SparcaList> local;
    SparcaList* list = nullptr;
    if (cache) {
      list = &cache->get(instance, f, probed, live, realized, config);
    } else {
      local = make_state_list(instance, f, probed, live, realized, config);
      list = local.get();
    }
    SparcaResult res = sparca_probe(instance, *g, *list, oracle);

    RoundRecord round;
    round.kind = kind;
    round.delta = config.delta.str();
    if (config.epsilon) round.epsilon = config.epsilon->str();
    round.probed = res.probed;
    for (std::size_t i = 0; i < res.probed.size(); ++i) {
      round.observed.push_back(instance.item(res.probed[i]).outcomes[res.outcomes[i]]);
      probed.insert(res.probed[i]);
    }
    round.cost = res.cost;
    realized |= res.realized;
    value = f->value(realized);
    live = std::move(res.compatible);
    round.value_after = value;
    round.compatible_after = live.size();
    transcript.total_cost += res.cost;
    transcript.rounds.push_back(std::move(round));
  }
  transcript.final_value = value;
  transcript.covered = value == q;
  if (!transcript.covered) throw InvariantViolation(std::string(kind) + " rounds ended without covering f");
  return transcript;
}

}  // namespace

PolicyTranscript nsc_solve(int r, const ScenarioInstance& instance, RealizationSource& oracle,
                           SparcaListCache* cache) {
  if (r < 1) throw InputError("number of rounds must be >= 1");
  return run_rounds(r, instance, oracle, cache, "sparca", [r](int k, std::size_t live, Value) {
    SparcaConfig config;
    config.delta = RationalRoot::inverse_root(BigInt(static_cast<unsigned long>(live)), static_cast<unsigned>(r - k + 1));
    return config;
  });
}

PolicyTranscript nsc2r_solve(int r, const ScenarioInstance& instance, RealizationSource& oracle,
                             SparcaListCache* cache) {
  if (r < 1) throw InputError("number of rounds must be >= 1");
  const Value q = instance.objective()->max_value();
  if (q == 0) return run_rounds(0, instance, oracle, cache, "sspc", [](int, std::size_t, Value) { return SparcaConfig{}; });
  SparcaConfig config;
  config.delta = RationalRoot::inverse_root(BigInt(static_cast<unsigned long>(instance.scenario_count())),
                                            static_cast<unsigned>(r));
  config.epsilon = RationalRoot::inverse_root(BigInt(static_cast<long>(q)), static_cast<unsigned>(r));
  return run_rounds(2 * r, instance, oracle, cache, "sspc", [config](int, std::size_t, Value) { return config; });
}

}  // namespace roundcover
