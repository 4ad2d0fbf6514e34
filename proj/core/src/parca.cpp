#include "roundcover/parca.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <unordered_map>

namespace roundcover {

Threshold Threshold::from_exponent(Value q, unsigned t) {
  Threshold th;
  th.q = q;
  th.t = t;
  if (q <= 0) {
    th.tau_floor = -1;  // nothing left to cover
    return th;
  }
  BigInt pow2 = 1;
  pow2 <<= t;
  const BigInt tau = floor(ratio(BigInt(q) * (pow2 - 1), pow2));
  th.tau_floor = static_cast<Value>(tau.get_si());
  return th;
}

Threshold Threshold::from_delta(Value q, const RationalRoot& delta) {
  if (!delta.at_most(Rational(1)) || delta.radicand <= 0) throw InputError("delta must lie in (0, 1]");
  return from_exponent(q, delta.power_of_two_floor_exponent());
}

Rational Threshold::tau() const { return Rational(q) * (1 - effective_delta()); }

Rational Threshold::effective_delta() const {
  BigInt pow2 = 1;
  pow2 <<= t;
  return ratio(BigInt(1), pow2);
}

std::uint64_t default_sample_count(std::size_t m, Cost c_max, double constant) {
  const double mc = static_cast<double>(m) * static_cast<double>(c_max);
  const double k = constant * static_cast<double>(m) * mc * std::ceil(std::log2(mc + 2.0));
  if (!(k >= 1.0)) return 1;
  return static_cast<std::uint64_t>(std::min(k, 1e6));
}

Rational default_epsilon(std::size_t m, Cost c_max) {
  return Rational(BigInt(1), BigInt(static_cast<unsigned long>(m)) * BigInt(static_cast<unsigned long>(m)) *
                                 BigInt(static_cast<long>(c_max)));
}

namespace {

// Sum over denominators d of numerators[d] / d.
Rational sum_by_denominator(const std::map<Value, std::int64_t>& numerators) {
  Rational total = 0;
  for (const auto& [d, num] : numerators) {
    if (num != 0) total += ratio(BigInt(static_cast<long>(num)), BigInt(static_cast<long>(d)));
  }
  return total;
}

}  // namespace

Rational score_exact(const IndependentInstance& instance, const Objective& f, const Threshold& threshold,
                     std::span<const ItemId> prefix, ItemId e) {
  constexpr std::uint64_t kLimit = 1000000;
  if (instance.support_product(prefix, kLimit + 1) > kLimit) {
    throw SizeGuardError("score_exact: prefix support product exceeds 10^6; use score_sampled");
  }
  const std::size_t n = instance.groundset_size();
  struct Point {
    ElementSet set;
    Value value;
    Rational probability;
  };
  std::vector<Point> live;
  if (threshold.below(0)) live.push_back({ElementSet(n), f.value(ElementSet(n)), Rational(1)});
  for (ItemId id : prefix) {
    std::vector<Point> next;
    std::unordered_map<ElementSet, std::size_t, ElementSetHash> index;
    for (const auto& point : live) {
      for (const auto& o : instance.item(id).outcomes) {
        ElementSet u = point.set | o.elements;
        const Value v = f.value(u);
        if (!threshold.below(v)) continue;
        auto [it, inserted] = index.emplace(u, next.size());
        if (inserted) {
          next.push_back({std::move(u), v, point.probability * o.probability});
        } else {
          next[it->second].probability += point.probability * o.probability;
        }
      }
    }
    live = std::move(next);
  }
  Rational total = 0;
  for (const auto& point : live) {
    Rational inner = 0;
    for (const auto& o : instance.item(e).outcomes) {
      inner += o.probability * Rational(f.value_union(point.set, o.elements) - point.value);
    }
    total += point.probability * inner / Rational(threshold.q - point.value);
  }
  return total / Rational(instance.item(e).cost);
}

Rational score_sampled(const IndependentInstance& instance, const Objective& f, const Threshold& threshold,
                       std::span<const ItemId> prefix, ItemId e, std::uint64_t k, Rng& rng) {
  if (k < 1) throw InputError("score_sampled needs K >= 1");
  const std::size_t n = instance.groundset_size();
  std::map<Value, std::int64_t> numerators;
  for (std::uint64_t s = 0; s < k; ++s) {
    ElementSet set(n);
    for (ItemId id : prefix) set |= instance.item(id).outcomes[instance.sample_outcome(id, rng)].elements;
    const Value v = f.value(set);
    const OutcomeIndex o = instance.sample_outcome(e, rng);
    if (!threshold.below(v)) continue;
    numerators[threshold.q - v] += f.value_union(set, instance.item(e).outcomes[o].elements) - v;
  }
  return sum_by_denominator(numerators) / Rational(BigInt(static_cast<unsigned long>(k))) /
         Rational(instance.item(e).cost);
}

ParcaList::ParcaList(const IndependentInstance& instance, ObjectivePtr f, std::vector<ItemId> available,
                     Threshold threshold, const ParcaConfig& config)
    : instance_(&instance),
      f_(std::move(f)),
      available_(std::move(available)),
      threshold_(threshold),
      sampler_(config.sampler),
      max_support_(config.max_support),
      taken_(available_.size(), false) {
  std::sort(available_.begin(), available_.end());
  const std::size_t n = instance.groundset_size();
  if (sampler_ == Sampler::kExact) {
    if (threshold_.below(0)) live_.push_back({ElementSet(n), 0, Rational(1)});
  } else {
    k_ = config.samples > 0 ? config.samples
                            : default_sample_count(instance.item_count(), instance.max_cost(), config.sample_constant);
    epsilon_ = config.epsilon ? *config.epsilon : default_epsilon(instance.item_count(), instance.max_cost());
    if (epsilon_ <= 0) throw InputError("epsilon must be positive");
    rng_ = std::make_unique<Rng>(config.seed);
    paths_.assign(k_, ElementSet(n));
    path_values_.assign(k_, 0);
  }
}

ItemId ParcaList::at(std::size_t i) {
  if (i >= available_.size()) throw InputError("list position out of range");
  while (list_.size() <= i) extend();
  return list_[i];
}

const std::vector<ItemId>& ParcaList::materialize() {
  while (list_.size() < available_.size()) extend();
  return list_;
}

void ParcaList::extend() {
  const ItemId e = sampler_ == Sampler::kExact ? choose_exact() : choose_sampled();
  const auto pos = static_cast<std::size_t>(std::lower_bound(available_.begin(), available_.end(), e) -
                                            available_.begin());
  taken_[pos] = true;
  list_.push_back(e);
  if (list_.size() == available_.size()) return;
  if (sampler_ == Sampler::kExact) {
    append_exact(e);
  } else if (!fallback_) {
    append_sampled(e);
  }
}

ItemId ParcaList::choose_exact() {
  const Objective& f = *f_;
  std::vector<Rational> weights;
  weights.reserve(live_.size());
  for (const auto& point : live_) weights.push_back(point.probability / Rational(threshold_.q - point.value));

  last_scores_.assign(available_.size(), Rational(0));
  std::size_t best = available_.size();
  for (std::size_t c = 0; c < available_.size(); ++c) {
    if (taken_[c]) continue;
    const auto& item = instance_->item(available_[c]);
    Rational g = 0;
    for (const auto& o : item.outcomes) {
      Rational inner = 0;
      for (std::size_t p = 0; p < live_.size(); ++p) {
        const Value gain = f.value_union(live_[p].set, o.elements) - live_[p].value;
        if (gain != 0) inner += weights[p] * Rational(gain);
      }
      g += o.probability * inner;
    }
    last_scores_[c] = g / Rational(item.cost);
    if (best == available_.size() || last_scores_[c] > last_scores_[best]) best = c;
  }
  ++informed_;
  return available_[best];
}

void ParcaList::append_exact(ItemId e) {
  const Objective& f = *f_;
  std::vector<Point> next;
  std::unordered_map<ElementSet, std::size_t, ElementSetHash> index;
  for (const auto& point : live_) {
    for (const auto& o : instance_->item(e).outcomes) {
      ElementSet u = point.set | o.elements;
      const Value v = f.value(u);
      if (!threshold_.below(v)) continue;
      auto [it, inserted] = index.emplace(u, next.size());
      if (inserted) {
        next.push_back({std::move(u), v, point.probability * o.probability});
        if (next.size() > max_support_) {
          throw SizeGuardError("exact ParCA scores need more than " + std::to_string(max_support_) +
                               " support points; use the sampled scorer");
        }
      } else {
        next[it->second].probability += point.probability * o.probability;
      }
    }
  }
  live_ = std::move(next);
}

ItemId ParcaList::choose_sampled() {
  std::size_t first_free = 0;
  while (taken_[first_free]) ++first_free;
  if (fallback_) return available_[first_free];

  const Objective& f = *f_;
  last_scores_.assign(available_.size(), Rational(0));
  const Rational kq(BigInt(static_cast<unsigned long>(k_)));
  // Paths below the threshold, grouped by their denominator Q - f.
  std::map<Value, std::uint32_t> slot_of;
  std::vector<std::uint32_t> slot(k_, UINT32_MAX);
  for (std::size_t s = 0; s < k_; ++s) {
    if (!threshold_.below(path_values_[s])) continue;
    auto [it, inserted] = slot_of.emplace(threshold_.q - path_values_[s], static_cast<std::uint32_t>(slot_of.size()));
    slot[s] = it->second;
  }
  std::vector<Value> denominators(slot_of.size());
  for (const auto& [d, i] : slot_of) denominators[i] = d;
  std::vector<std::int64_t> sums(slot_of.size());

  Rational best_g = -1;
  std::size_t best = available_.size();
  for (std::size_t c = 0; c < available_.size(); ++c) {
    if (taken_[c]) continue;
    const ItemId e = available_[c];
    const auto& item = instance_->item(e);
    std::fill(sums.begin(), sums.end(), 0);
    for (std::size_t s = 0; s < k_; ++s) {
      const OutcomeIndex o = instance_->sample_outcome(e, *rng_);
      if (slot[s] == UINT32_MAX) continue;
      sums[slot[s]] += f.value_union(paths_[s], item.outcomes[o].elements) - path_values_[s];
    }
    Rational g = 0;
    for (std::size_t i = 0; i < sums.size(); ++i) {
      if (sums[i] != 0) g += ratio(BigInt(static_cast<long>(sums[i])), BigInt(static_cast<long>(denominators[i])));
    }
    g /= kq;
    last_scores_[c] = g / Rational(item.cost);
    best_g = std::max(best_g, g);
    if (best == available_.size() || last_scores_[c] > last_scores_[best]) best = c;
  }
  if (best_g < epsilon_) {
    fallback_ = true;
    paths_.clear();
    path_values_.clear();
    return available_[first_free];
  }
  ++informed_;
  return available_[best];
}

void ParcaList::append_sampled(ItemId e) {
  const Objective& f = *f_;
  const auto& item = instance_->item(e);
  for (std::size_t s = 0; s < k_; ++s) {
    const OutcomeIndex o = instance_->sample_outcome(e, *rng_);
    if (!threshold_.below(path_values_[s])) continue;
    paths_[s] |= item.outcomes[o].elements;
    path_values_[s] = f.value(paths_[s]);
  }
}

std::vector<std::uint64_t> parca_state_key(const ElementSet& probed, const ElementSet& realized, unsigned t) {
  std::vector<std::uint64_t> key(probed.words().begin(), probed.words().end());
  key.insert(key.end(), realized.words().begin(), realized.words().end());
  key.push_back(t);
  return key;
}

namespace {

std::uint64_t key_hash(const std::vector<std::uint64_t>& key) { return StableHasher().add(key).value(); }

std::unique_ptr<ParcaList> make_list(const IndependentInstance& instance, const ObjectivePtr& base,
                                     const ElementSet& probed, const ElementSet& realized, Threshold threshold,
                                     const ParcaConfig& config, std::uint64_t state_hash) {
  std::vector<ItemId> available;
  for (std::size_t i = 0; i < instance.item_count(); ++i) {
    if (!probed.contains(static_cast<Element>(i))) available.push_back(static_cast<ItemId>(i));
  }
  ParcaConfig list_config = config;
  list_config.seed = splitmix64(config.seed ^ state_hash);
  return std::make_unique<ParcaList>(instance, residual(base, realized), std::move(available), threshold,
                                     list_config);
}

}  // namespace

std::unique_ptr<ParcaList> make_state_list(const IndependentInstance& instance, const ObjectivePtr& base,
                                           const ElementSet& probed, const ElementSet& realized,
                                           Threshold threshold, const ParcaConfig& config) {
  return make_list(instance, base, probed, realized, threshold, config,
                   key_hash(parca_state_key(probed, realized, threshold.t)));
}

ParcaList& ParcaListCache::get(const IndependentInstance& instance, const ObjectivePtr& base,
                               const ElementSet& probed, const ElementSet& realized, Threshold threshold,
                               const ParcaConfig& config) {
  auto key = parca_state_key(probed, realized, threshold.t);
  const std::uint64_t h = key_hash(key);
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
  auto list = make_list(instance, base, probed, realized, threshold, config, h);
  auto& slot = lists_[h];
  slot.emplace_back(std::move(key), std::move(list));
  ++entries_;
  return *slot.back().second;
}

ParcaResult parca_probe(const IndependentInstance& instance, const Objective& f, ParcaList& list,
                        RealizationSource& oracle) {
  ParcaResult res;
  res.threshold = list.threshold();
  res.realized = ElementSet(instance.groundset_size());
  res.value = f.value(res.realized);
  for (std::size_t i = 0; i < list.size() && list.threshold().below(res.value); ++i) {
    const ItemId e = list.at(i);
    const OutcomeIndex o = oracle.observe(e);
    const auto& item = instance.item(e);
    if (o >= item.outcomes.size()) throw InputError("realization source returned an unknown outcome");
    res.probed.push_back(e);
    res.outcomes.push_back(o);
    res.realized |= item.outcomes[o].elements;
    res.cost += item.cost;
    res.value = f.value(res.realized);
  }
  if (list.threshold().below(res.value)) {
    throw InvariantViolation("ParCA ran out of items with f(R) <= tau on a feasible instance");
  }
  return res;
}

ParcaResult parca_run(const IndependentInstance& instance, const ParcaConfig& config, RealizationSource& oracle) {
  const ObjectivePtr& f = instance.objective();
  const Threshold threshold = Threshold::from_delta(f->max_value(), config.delta);
  std::vector<ItemId> all(instance.item_count());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = static_cast<ItemId>(i);
  ParcaList list(instance, f, std::move(all), threshold, config);
  return parca_probe(instance, *f, list, oracle);
}

PolicyTranscript ssc_solve(int r, const IndependentInstance& instance, RealizationSource& oracle,
                           const ParcaConfig& config, ParcaListCache* cache) {
  if (r < 1) throw InputError("number of rounds must be >= 1");
  const ObjectivePtr& f = instance.objective();
  const Value q = f->max_value();
  ElementSet probed(instance.item_count());
  ElementSet realized(instance.groundset_size());
  PolicyTranscript transcript;
  transcript.target = q;
  Value value = f->value(realized);

  for (int k = 1; k <= r && value < q; ++k) {
    const Value qk = q - value;
    const auto delta = RationalRoot::inverse_root(BigInt(static_cast<long>(qk)), static_cast<unsigned>(r - k + 1));
    const Threshold threshold = Threshold::from_delta(qk, delta);
    const ObjectivePtr g = residual(f, realized);

    std::unique_ptr<ParcaList> local;
    ParcaList* list = nullptr;
    if (cache) {
      list = &cache->get(instance, f, probed, realized, threshold, config);
    } else {
      local = make_state_list(instance, f, probed, realized, threshold, config);
      list = local.get();
    }
    ParcaResult res = parca_probe(instance, *g, *list, oracle);

    RoundRecord round;
    round.kind = "parca";
    round.delta = to_string(threshold.effective_delta());
    round.probed = res.probed;
    for (std::size_t i = 0; i < res.probed.size(); ++i) {
      round.observed.push_back(instance.item(res.probed[i]).outcomes[res.outcomes[i]].elements);
      probed.insert(res.probed[i]);
    }
    round.cost = res.cost;
    realized |= res.realized;
    value = f->value(realized);
    round.value_after = value;
    transcript.total_cost += res.cost;
    transcript.rounds.push_back(std::move(round));
  }
  transcript.final_value = value;
  transcript.covered = value == q;
  if (!transcript.covered) throw InvariantViolation("ssc_solve finished its rounds without covering f");
  return transcript;
}

}  // namespace roundcover
