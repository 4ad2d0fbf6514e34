#pragma once

#include <gmpxx.h>

#include <string>
#include <string_view>

namespace roundcover {

using Rational = mpq_class;
using BigInt = mpz_class;

// Parses "3", "-2/7", "0.125", "1e-3" or "2.5E2" into an exact rational.
// Decimal input is read digit-for-digit, so "0.1" is exactly 1/10.
Rational parse_rational(std::string_view text);

// Canonical text: "n" for integers, "n/d" otherwise (always reduced).
std::string to_string(const Rational& q);

// Fixed 12-significant-digit decimal rendering used in reports.
std::string to_decimal12(double x);

// num/den in canonical form. Two-argument mpq_class construction does not
// reduce, and gmp arithmetic and comparison expect reduced operands.
Rational ratio(const BigInt& num, const BigInt& den);

BigInt ceil(const Rational& q);
BigInt floor(const Rational& q);

// A positive real of the form radicand^(1/degree). Round parameters such as
// Q^(-1/r) are irrational in general; every threshold comparison against
// them is done by raising both sides to the `degree`-th power.
struct RationalRoot {
  Rational radicand{1};
  unsigned degree = 1;

  static RationalRoot exact(const Rational& q) { return {q, 1}; }
  // n^(-1/k)
  static RationalRoot inverse_root(const BigInt& n, unsigned k);

  // x >= value * scale, for non-negative x and scale.
  bool covers_fraction(const BigInt& x, const BigInt& scale) const;
  // value <= q
  bool at_most(const Rational& q) const;

  // Smallest t >= 0 with 2^-t <= value, i.e. value rounded down to a power
  // of two is 2^-t. Requires 0 < value.
  unsigned power_of_two_floor_exponent() const;

  double approx() const;
  std::string str() const;
};

}  // namespace roundcover
