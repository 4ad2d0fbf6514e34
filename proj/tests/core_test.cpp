#include <gtest/gtest.h>

#include "roundcover/element_set.hpp"
#include "roundcover/objective.hpp"
#include "roundcover/rational.hpp"
#include "support.hpp"

namespace {

using namespace roundcover;

TEST(Rational, ParsesFractionsAndDecimalsExactly) {
  EXPECT_EQ(parse_rational("3"), Rational(3));
  EXPECT_EQ(parse_rational("-2/7"), Rational(-2, 7));
  EXPECT_EQ(parse_rational("0.1"), Rational(1, 10));
  EXPECT_EQ(parse_rational("1e-3"), Rational(1, 1000));
  EXPECT_EQ(parse_rational("2.5E2"), Rational(250));
  EXPECT_EQ(to_string(parse_rational("6/4")), "3/2");
  EXPECT_THROW(parse_rational("abc"), InputError);
  EXPECT_THROW(parse_rational("1/0"), InputError);
}

TEST(Rational, RatioIsCanonical) {
  const Rational a = ratio(BigInt(3), BigInt(6));
  EXPECT_EQ(a, Rational(1, 2));
  EXPECT_EQ(to_string(a), "1/2");
  EXPECT_EQ(to_string(ratio(BigInt(4), BigInt(-2))), "-2");
}

TEST(Rational, CeilFloor) {
  EXPECT_EQ(ceil(Rational(7, 2)), 4);
  EXPECT_EQ(floor(Rational(7, 2)), 3);
  EXPECT_EQ(ceil(Rational(-7, 2)), -3);
  EXPECT_EQ(floor(Rational(-7, 2)), -4);
  EXPECT_EQ(ceil(Rational(4)), 4);
}

TEST(RationalRoot, InverseRootComparisons) {
  // 16^(-1/2) = 1/4
  const auto d = RationalRoot::inverse_root(16, 2);
  EXPECT_TRUE(d.at_most(Rational(1, 4)));
  EXPECT_FALSE(d.at_most(Rational(1, 5)));
  EXPECT_TRUE(d.covers_fraction(1, 4));   // 1 >= 4/4
  EXPECT_FALSE(d.covers_fraction(0, 1));
  EXPECT_EQ(d.power_of_two_floor_exponent(), 2u);
  // 10^(-1/2) ~ 0.316 rounds down to 1/4
  EXPECT_EQ(RationalRoot::inverse_root(10, 2).power_of_two_floor_exponent(), 2u);
  EXPECT_EQ(RationalRoot::exact(Rational(1)).power_of_two_floor_exponent(), 0u);
  EXPECT_NEAR(RationalRoot::inverse_root(8, 3).approx(), 0.5, 1e-12);
}

TEST(ElementSet, BasicOps) {
  ElementSet a(70, {1, 3, 65});
  ElementSet b(70, {3, 4});
  EXPECT_TRUE(a.contains(65));
  EXPECT_EQ(a.count(), 3u);
  EXPECT_EQ((a | b).count(), 4u);
  EXPECT_EQ((a & b).elements(), std::vector<Element>({3}));
  ElementSet c = a;
  c.subtract(b);
  EXPECT_EQ(c.elements(), std::vector<Element>({1, 65}));
  EXPECT_TRUE(ElementSet(70, {3}).is_subset_of(b));
  EXPECT_THROW(a |= ElementSet(10), InputError);
  EXPECT_THROW(a.insert(70), InputError);
}

TEST(ElementSet, LexOrder) {
  const ElementSet e(4), s0(4, {0}), s01(4, {0, 1}), s1(4, {1});
  EXPECT_TRUE(lex_less(e, s0));
  EXPECT_TRUE(lex_less(s0, s01));
  EXPECT_TRUE(lex_less(s01, s1));
  EXPECT_FALSE(lex_less(s1, s1));
}

TEST(Objective, FamilyValues) {
  TruncatedCoverage cov(5, 3);
  EXPECT_EQ(eval(cov, ElementSet(5)), 0);
  EXPECT_EQ(eval(cov, ElementSet(5, {0, 1, 2, 3})), 3);

  // one query over filters 0 and 1; F_0 alone decides it
  FilterEval fe(2, {{0, 1}});
  EXPECT_EQ(fe.max_value(), 2);
  EXPECT_EQ(eval(fe, ElementSet(4, {FilterEval::false_element(0)})), 2);
  EXPECT_EQ(marginal(fe, ElementSet(4, {FilterEval::true_element(0)}), ElementSet(4, {FilterEval::true_element(1)})),
            1);

  TruncatedAdditive add({3, 4}, 5);
  EXPECT_EQ(eval(add, ElementSet(2, {0, 1})), 5);

  WeightedTruncatedCoverage w({2, 0, 5}, 4);
  EXPECT_EQ(eval(w, ElementSet(3, {0, 1})), 2);
  EXPECT_EQ(eval(w, ElementSet(3, {2})), 4);

  const std::vector<Element> bad = {9};
  EXPECT_THROW(eval(cov, bad), InputError);
}

TEST(Objective, MarginalExamples) {
  TruncatedCoverage cov(4, 2);
  EXPECT_EQ(marginal(cov, ElementSet(4, {0}), ElementSet(4, {1})), 1);
  EXPECT_EQ(marginal(cov, ElementSet(4, {0, 1}), ElementSet(4, {1})), 0);
}

TEST(Objective, ResidualBasics) {
  auto f = std::make_shared<TruncatedCoverage>(5, 3);
  auto same = residual(f, ElementSet(5));
  auto g = residual(f, ElementSet(5, {0, 1}));
  EXPECT_EQ(g->max_value(), 1);
  for (std::uint32_t mask = 0; mask < 32; ++mask) {
    ElementSet s(5);
    for (Element e = 0; e < 5; ++e) {
      if (mask >> e & 1) s.insert(e);
    }
    EXPECT_EQ(same->value(s), f->value(s));
  }
}

// residual(residual(f, R1), R2) == residual(f, R1 ∪ R2) on every S, |U| = 8
TEST(ObjectiveProperty, ResidualComposes) {
  Rng rng(11);
  for (int rep = 0; rep < 30; ++rep) {
    const std::size_t n = 8;
    std::vector<Value> vals(n);
    for (auto& v : vals) v = static_cast<Value>(rng.uniform_index(4));
    ObjectivePtr f = rep % 2 ? ObjectivePtr(std::make_shared<TruncatedAdditive>(vals, 7))
                             : ObjectivePtr(std::make_shared<TruncatedCoverage>(n, 5));
    const ElementSet r1 = rctest::random_subset(rng, n, 0.3);
    const ElementSet r2 = rctest::random_subset(rng, n, 0.3);
    auto nested = residual(residual(f, r1), r2);
    auto flat = residual(f, r1 | r2);
    EXPECT_EQ(nested->max_value(), flat->max_value());
    for (std::uint32_t mask = 0; mask < 256; ++mask) {
      ElementSet s(n);
      for (Element e = 0; e < n; ++e) {
        if (mask >> e & 1) s.insert(e);
      }
      ASSERT_EQ(nested->value(s), flat->value(s));
    }
  }
}

// value_of_union must agree with value of the materialized union.
TEST(ObjectiveProperty, UnionFastPathMatches) {
  Rng rng(5);
  for (int rep = 0; rep < 50; ++rep) {
    const std::size_t filters = 5;
    std::vector<std::vector<std::uint32_t>> queries = {{0, 1}, {2, 3, 4}, {1, 4}};
    std::vector<ObjectivePtr> fs = {
        std::make_shared<TruncatedCoverage>(10, 2, rctest::random_subset(rng, 10, 0.5) | ElementSet(10, {0, 9})),
        std::make_shared<WeightedTruncatedCoverage>(std::vector<Value>{1, 2, 0, 3, 1, 1, 4, 0, 2, 1}, 9),
        std::make_shared<TruncatedAdditive>(std::vector<Value>{1, 2, 0, 3, 1, 1, 4, 0, 2, 1}, 8),
        std::make_shared<FilterEval>(filters, queries),
    };
    fs.push_back(residual(fs[0], rctest::random_subset(rng, 10, 0.2)));
    for (const auto& f : fs) {
      const std::size_t n = f->groundset_size();
      const ElementSet a = rctest::random_subset(rng, n, 0.3);
      const ElementSet b = rctest::random_subset(rng, n, 0.3);
      const ElementSet c = rctest::random_subset(rng, n, 0.3);
      const ElementSet* parts[] = {&a, &b, &c};
      EXPECT_EQ(f->value_union(a, b), f->value(a | b)) << family_name(f->family());
      EXPECT_EQ(f->value_of_union(parts), f->value(a | b | c)) << family_name(f->family());
    }
  }
}

class Square final : public Objective {
 public:
  Value value(const ElementSet& s) const override {
    const auto c = static_cast<Value>(s.count());
    return c * c;
  }
  Value max_value() const override { return 16; }
  std::size_t groundset_size() const override { return 4; }
  ObjectiveFamily family() const override { return ObjectiveFamily::kCustom; }
};

TEST(Submodularity, AcceptsCoverageRejectsSquare) {
  TruncatedCoverage cov(6, 4);
  EXPECT_TRUE(verify_monotone_submodular(cov, CheckMode::kExhaustive).ok);
  const auto rep = verify_monotone_submodular(Square{}, CheckMode::kExhaustive);
  EXPECT_FALSE(rep.ok);
  EXPECT_EQ(rep.violation, "submodular");
  ASSERT_TRUE(rep.witness.has_value());
  const auto& w = *rep.witness;
  EXPECT_TRUE(w.smaller.is_subset_of(w.larger));
  EXPECT_FALSE(w.larger.contains(w.element));
}

TEST(Submodularity, FilterEvalRandomExhaustive) {
  Rng rng(3);
  for (int rep = 0; rep < 10; ++rep) {
    std::vector<std::vector<std::uint32_t>> queries;
    const std::size_t nq = 1 + rng.uniform_index(3);
    for (std::size_t q = 0; q < nq; ++q) {
      std::vector<std::uint32_t> query;
      for (std::uint32_t i = 0; i < 4; ++i) {
        if (rng.bernoulli(0.6)) query.push_back(i);
      }
      if (query.empty()) query.push_back(static_cast<std::uint32_t>(rng.uniform_index(4)));
      queries.push_back(query);
    }
    FilterEval f(4, queries);
    EXPECT_TRUE(verify_monotone_submodular(f, CheckMode::kExhaustive).ok);
    EXPECT_TRUE(verify_monotone_submodular(*residual(std::make_shared<FilterEval>(4, queries),
                                                     rctest::random_subset(rng, 8, 0.3)),
                                           CheckMode::kExhaustive)
                    .ok);
  }
}

TEST(Submodularity, SampledModeAndGuard) {
  TruncatedCoverage big(40, 20);
  EXPECT_TRUE(verify_monotone_submodular(big, CheckMode::kSampled, 200, 1).ok);
  EXPECT_THROW(verify_monotone_submodular(big, CheckMode::kExhaustive), InputError);
}

}  // namespace
