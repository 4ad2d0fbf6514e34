#include "roundcover/objective.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <numeric>

#include "roundcover/random.hpp"

namespace roundcover {

std::string family_name(ObjectiveFamily family) {
  switch (family) {
    case ObjectiveFamily::kTruncatedCoverage:
      return "truncated_coverage";
    case ObjectiveFamily::kWeightedTruncatedCoverage:
      return "weighted_truncated_coverage";
    case ObjectiveFamily::kTruncatedAdditive:
      return "truncated_additive";
    case ObjectiveFamily::kFilterEval:
      return "filter_eval";
    case ObjectiveFamily::kResidual:
      return "residual";
    case ObjectiveFamily::kCustom:
      return "custom";
  }
  return "unknown";
}

namespace {

constexpr std::size_t kMaxParts = 8;

// Calls fn(word_index, OR of the parts' words) for every word.
template <class F>
void for_each_union_word(std::span<const ElementSet* const> parts, F&& fn) {
  if (parts.empty()) return;
  const std::size_t words = parts[0]->words().size();
  for (const ElementSet* p : parts) {
    if (p->universe() != parts[0]->universe()) throw InputError("sets over different universes");
  }
  for (std::size_t w = 0; w < words; ++w) {
    std::uint64_t bits = 0;
    for (const ElementSet* p : parts) bits |= p->words()[w];
    fn(w, bits);
  }
}

template <class F>
void for_each_union_element(std::span<const ElementSet* const> parts, F&& fn) {
  for_each_union_word(parts, [&](std::size_t w, std::uint64_t bits) {
    while (bits != 0) {
      fn(static_cast<Element>(w * 64 + static_cast<std::size_t>(std::countr_zero(bits))));
      bits &= bits - 1;
    }
  });
}

}  // namespace

Value Objective::value_of_union(std::span<const ElementSet* const> parts) const {
  if (parts.empty()) return value(ElementSet(groundset_size()));
  ElementSet u = *parts[0];
  for (std::size_t i = 1; i < parts.size(); ++i) u |= *parts[i];
  return value(u);
}

TruncatedCoverage::TruncatedCoverage(std::size_t groundset_size, Value q, std::optional<ElementSet> relevant)
    : n_(groundset_size), q_(q), relevant_(std::move(relevant)) {
  if (relevant_ && relevant_->universe() != n_) throw InputError("relevant set over the wrong groundset");
  const auto available = static_cast<Value>(relevant_ ? relevant_->count() : n_);
  if (q_ < 0 || q_ > available) {
    throw InputError("truncated coverage target Q=" + std::to_string(q_) + " not in [0, " +
                     std::to_string(available) + "]");
  }
}

Value TruncatedCoverage::value(const ElementSet& s) const {
  if (!relevant_) return std::min(static_cast<Value>(s.count()), q_);
  return std::min(static_cast<Value>((s & *relevant_).count()), q_);
}

Value TruncatedCoverage::value_of_union(std::span<const ElementSet* const> parts) const {
  Value n = 0;
  if (relevant_) {
    const auto mask = relevant_->words();
    for_each_union_word(parts, [&](std::size_t w, std::uint64_t bits) { n += std::popcount(bits & mask[w]); });
  } else {
    for_each_union_word(parts, [&](std::size_t, std::uint64_t bits) { n += std::popcount(bits); });
  }
  return std::min(n, q_);
}

WeightedTruncatedCoverage::WeightedTruncatedCoverage(std::vector<Value> weights, Value q)
    : weights_(std::move(weights)), q_(q) {
  Value total = 0;
  for (Value w : weights_) {
    if (w < 0) throw InputError("negative element weight");
    total += w;
  }
  if (q_ < 0 || q_ > total) throw InputError("weighted coverage target exceeds total weight");
}

Value WeightedTruncatedCoverage::value(const ElementSet& s) const {
  Value total = 0;
  s.for_each([&](Element e) { total += weights_[e]; });
  return std::min(total, q_);
}

Value WeightedTruncatedCoverage::value_of_union(std::span<const ElementSet* const> parts) const {
  Value total = 0;
  for_each_union_element(parts, [&](Element e) { total += weights_[e]; });
  return std::min(total, q_);
}

TruncatedAdditive::TruncatedAdditive(std::vector<Value> values, Value q) : values_(std::move(values)), q_(q) {
  if (q_ < 1) throw InputError("knapsack target Q must be >= 1");
  for (Value& v : values_) {
    if (v < 0) throw InputError("negative element value");
    v = std::min(v, q_);
  }
}

Value TruncatedAdditive::value(const ElementSet& s) const {
  Value total = 0;
  s.for_each([&](Element e) { total += values_[e]; });
  return std::min(total, q_);
}

Value TruncatedAdditive::value_of_union(std::span<const ElementSet* const> parts) const {
  Value total = 0;
  for_each_union_element(parts, [&](Element e) { total += values_[e]; });
  return std::min(total, q_);
}

FilterEval::FilterEval(std::size_t filters, std::vector<std::vector<std::uint32_t>> queries)
    : filters_(filters), queries_(std::move(queries)) {
  for (auto& query : queries_) {
    if (query.empty()) throw InputError("empty filter query");
    std::sort(query.begin(), query.end());
    if (std::adjacent_find(query.begin(), query.end()) != query.end()) {
      throw InputError("duplicate filter in query");
    }
    if (query.back() >= filters_) throw InputError("query references filter out of range");
    q_ += static_cast<Value>(query.size());
  }
}

namespace {

template <class Contains>
Value filter_value(const std::vector<std::vector<std::uint32_t>>& queries, Contains&& contains) {
  Value total = 0;
  for (const auto& query : queries) {
    const auto size = static_cast<Value>(query.size());
    Value seen_false = 0;
    Value seen_true = 0;
    for (auto i : query) {
      if (contains(FilterEval::false_element(i))) ++seen_false;
      if (contains(FilterEval::true_element(i))) ++seen_true;
    }
    total += std::min(size, size * seen_false + seen_true);
  }
  return total;
}

}  // namespace

Value FilterEval::value(const ElementSet& s) const {
  return filter_value(queries_, [&](Element e) { return s.contains(e); });
}

Value FilterEval::value_of_union(std::span<const ElementSet* const> parts) const {
  return filter_value(queries_, [&](Element e) {
    return std::any_of(parts.begin(), parts.end(), [e](const ElementSet* p) { return p->contains(e); });
  });
}

ResidualObjective::ResidualObjective(ObjectivePtr base, ElementSet conditioned)
    : base_(std::move(base)), conditioned_(std::move(conditioned)) {
  if (conditioned_.universe() != base_->groundset_size()) {
    throw InputError("residual conditioned on a set over the wrong groundset");
  }
  base_at_r_ = base_->value(conditioned_);
  q_ = base_->max_value() - base_at_r_;
}

Value ResidualObjective::value(const ElementSet& s) const {
  const ElementSet* parts[] = {&s, &conditioned_};
  return base_->value_of_union(parts) - base_at_r_;
}

Value ResidualObjective::value_of_union(std::span<const ElementSet* const> parts) const {
  if (parts.size() >= kMaxParts) return Objective::value_of_union(parts);
  std::array<const ElementSet*, kMaxParts> all{};
  std::copy(parts.begin(), parts.end(), all.begin());
  all[parts.size()] = &conditioned_;
  return base_->value_of_union(std::span<const ElementSet* const>(all.data(), parts.size() + 1)) - base_at_r_;
}

Value eval(const Objective& f, std::span<const Element> s) {
  return f.value(ElementSet(f.groundset_size(), s));
}

Value eval(const Objective& f, const ElementSet& s) {
  if (s.universe() != f.groundset_size()) throw InputError("set over the wrong groundset");
  return f.value(s);
}

Value marginal(const Objective& f, const ElementSet& s, const ElementSet& t) {
  return eval(f, s | t) - eval(f, s);
}

ObjectivePtr residual(const ObjectivePtr& f, const ElementSet& r) {
  if (const auto* res = dynamic_cast<const ResidualObjective*>(f.get())) {
    return std::make_shared<ResidualObjective>(res->base(), res->conditioned() | r);
  }
  return std::make_shared<ResidualObjective>(f, r);
}

namespace {

ElementSet from_mask(std::size_t n, std::uint32_t mask) {
  ElementSet s(n);
  for (std::size_t i = 0; i < n; ++i) {
    if ((mask >> i) & 1U) s.insert(static_cast<Element>(i));
  }
  return s;
}

}  // namespace

SubmodularityReport verify_monotone_submodular(const Objective& f, CheckMode mode, std::size_t samples,
                                               std::uint64_t seed) {
  const std::size_t n = f.groundset_size();
  const Value q = f.max_value();
  SubmodularityReport report;
  auto fail = [&](std::string what, ElementSet s, ElementSet t, Element e) {
    report.ok = false;
    report.violation = std::move(what);
    report.witness = SubmodularityWitness{std::move(s), std::move(t), e};
    return report;
  };

  if (f.value(ElementSet(n)) != 0) {
    report.ok = false;
    report.violation = "empty-set";
    return report;
  }
  if (f.value(ElementSet::full(n)) != q) {
    report.ok = false;
    report.violation = "full-set";
    return report;
  }

  if (mode == CheckMode::kExhaustive) {
    if (n > 10) throw SizeGuardError("exhaustive submodularity check needs |U| <= 10");
    const std::uint32_t limit = 1U << n;
    std::vector<Value> table(limit);
    for (std::uint32_t mask = 0; mask < limit; ++mask) {
      table[mask] = f.value(from_mask(n, mask));
      if (table[mask] < 0 || table[mask] > q) {
        report.ok = false;
        report.violation = "range";
        report.witness = SubmodularityWitness{from_mask(n, mask), from_mask(n, mask), 0};
        return report;
      }
    }
    for (std::uint32_t mask = 0; mask < limit; ++mask) {
      for (std::size_t e = 0; e < n; ++e) {
        const std::uint32_t be = 1U << e;
        if (mask & be) continue;
        if (table[mask | be] < table[mask]) {
          return fail("monotone", from_mask(n, mask), from_mask(n, mask), static_cast<Element>(e));
        }
        for (std::size_t g = 0; g < n; ++g) {
          const std::uint32_t bg = 1U << g;
          if (g == e || (mask & bg)) continue;
          // f(S+e) - f(S) >= f(S+g+e) - f(S+g)
          if (table[mask | be] - table[mask] < table[mask | bg | be] - table[mask | bg]) {
            return fail("submodular", from_mask(n, mask), from_mask(n, mask | bg), static_cast<Element>(e));
          }
        }
      }
    }
    return report;
  }

  Rng rng(seed);
  for (std::size_t k = 0; k < samples; ++k) {
    ElementSet s(n);
    ElementSet t(n);
    for (std::size_t i = 0; i < n; ++i) {
      const auto u = rng.uniform_index(3);
      if (u == 0) {
        s.insert(static_cast<Element>(i));
        t.insert(static_cast<Element>(i));
      } else if (u == 1) {
        t.insert(static_cast<Element>(i));
      }
    }
    std::vector<Element> outside;
    for (std::size_t i = 0; i < n; ++i) {
      if (!t.contains(static_cast<Element>(i))) outside.push_back(static_cast<Element>(i));
    }
    const Value fs = f.value(s);
    const Value ft = f.value(t);
    if (fs < 0 || ft > q) {
      report.ok = false;
      report.violation = "range";
      report.witness = SubmodularityWitness{s, t, 0};
      return report;
    }
    if (ft < fs) return fail("monotone", s, t, 0);
    if (outside.empty()) continue;
    const Element e = outside[rng.uniform_index(outside.size())];
    ElementSet se = s;
    se.insert(e);
    ElementSet te = t;
    te.insert(e);
    if (f.value(se) - fs < f.value(te) - ft) return fail("submodular", s, t, e);
  }
  return report;
}

}  // namespace roundcover
