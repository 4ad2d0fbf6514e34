#include "roundcover/rational.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>

#include "roundcover/types.hpp"

namespace roundcover {

namespace {

BigInt pow10(unsigned long e) {
  BigInt r;
  mpz_ui_pow_ui(r.get_mpz_t(), 10, e);
  return r;
}

BigInt pow_big(const BigInt& base, unsigned long e) {
  BigInt r;
  mpz_pow_ui(r.get_mpz_t(), base.get_mpz_t(), e);
  return r;
}

Rational parse_decimal(std::string_view s) {
  bool negative = false;
  std::size_t i = 0;
  if (i < s.size() && (s[i] == '+' || s[i] == '-')) {
    negative = s[i] == '-';
    ++i;
  }
  std::string digits;
  long frac_digits = 0;
  bool seen_point = false;
  bool any_digit = false;
  for (; i < s.size(); ++i) {
    const char c = s[i];
    if (std::isdigit(static_cast<unsigned char>(c))) {
      digits.push_back(c);
      any_digit = true;
      if (seen_point) ++frac_digits;
    } else if (c == '.' && !seen_point) {
      seen_point = true;
    } else {
      break;
    }
  }
  if (!any_digit) throw InputError("not a number: '" + std::string(s) + "'");
  long exponent = 0;
  if (i < s.size() && (s[i] == 'e' || s[i] == 'E')) {
    ++i;
    const std::string exp_text(s.substr(i));
    std::size_t used = 0;
    try {
      exponent = std::stol(exp_text, &used);
    } catch (const std::exception&) {
      throw InputError("bad exponent in '" + std::string(s) + "'");
    }
    i += used;
  }
  if (i != s.size()) throw InputError("trailing characters in '" + std::string(s) + "'");
  if (std::labs(exponent) > 4000) throw InputError("exponent out of range in '" + std::string(s) + "'");

  BigInt mantissa(digits, 10);
  const long shift = exponent - frac_digits;
  Rational q;
  if (shift >= 0) {
    q = Rational(mantissa * pow10(static_cast<unsigned long>(shift)));
  } else {
    q = Rational(mantissa, pow10(static_cast<unsigned long>(-shift)));
  }
  q.canonicalize();
  return negative ? Rational(-q) : q;
}

}  // namespace

Rational parse_rational(std::string_view text) {
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.front()))) text.remove_prefix(1);
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back()))) text.remove_suffix(1);
  if (text.empty()) throw InputError("empty number");
  const auto slash = text.find('/');
  if (slash == std::string_view::npos) return parse_decimal(text);
  const Rational num = parse_decimal(text.substr(0, slash));
  const Rational den = parse_decimal(text.substr(slash + 1));
  if (den == 0) throw InputError("zero denominator in '" + std::string(text) + "'");
  Rational q = num / den;
  q.canonicalize();
  return q;
}

std::string to_string(const Rational& q) {
  if (q.get_den() == 1) return q.get_num().get_str();
  return q.get_num().get_str() + "/" + q.get_den().get_str();
}

std::string to_decimal12(double x) {
  if (x == 0.0) return "0";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

BigInt ceil(const Rational& q) {
  BigInt r;
  mpz_cdiv_q(r.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
  return r;
}

Rational ratio(const BigInt& num, const BigInt& den) {
  if (den == 0) throw InputError("rational with zero denominator");
  Rational q(num, den);
  q.canonicalize();
  return q;
}

BigInt floor(const Rational& q) {
  BigInt r;
  mpz_fdiv_q(r.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
  return r;
}

RationalRoot RationalRoot::inverse_root(const BigInt& n, unsigned k) {
  if (n <= 0) throw InputError("inverse_root of a non-positive value");
  if (k == 0) throw InputError("inverse_root with degree 0");
  return {ratio(BigInt(1), n), k};
}

bool RationalRoot::covers_fraction(const BigInt& x, const BigInt& scale) const {
  // x >= radicand^(1/d) * scale  <=>  x^d * den >= num * scale^d
  const BigInt lhs = pow_big(x, degree) * radicand.get_den();
  const BigInt rhs = pow_big(scale, degree) * radicand.get_num();
  return lhs >= rhs;
}

bool RationalRoot::at_most(const Rational& q) const {
  if (q <= 0) return false;
  // radicand^(1/d) <= q  <=>  radicand <= q^d
  const Rational qd = ratio(pow_big(q.get_num(), degree), pow_big(q.get_den(), degree));
  return radicand <= qd;
}

unsigned RationalRoot::power_of_two_floor_exponent() const {
  if (radicand <= 0) throw InputError("power-of-two rounding of a non-positive value");
  // smallest t with den <= num * 2^(t*d)
  unsigned t = 0;
  BigInt scaled = radicand.get_num();
  const BigInt& den = radicand.get_den();
  while (scaled < den) {
    scaled <<= degree;
    ++t;
    if (t > 4096) throw InputError("threshold too small for power-of-two rounding");
  }
  return t;
}

double RationalRoot::approx() const {
  return std::pow(radicand.get_d(), 1.0 / static_cast<double>(degree));
}

std::string RationalRoot::str() const {
  if (degree == 1) return to_string(radicand);
  return "(" + to_string(radicand) + ")^(1/" + std::to_string(degree) + ")";
}

}  // namespace roundcover
