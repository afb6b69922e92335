#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <cmath>
#include <cstdint>
#include <string>

#include "mdimlab/common.hpp"

namespace mdimlab {

// Exact arithmetic used for construction-time invariants (unit determinants,
// strict disjointness, strict separation). Evaluation paths use doubles.
using Rational = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;

inline double to_double(const Rational& r) { return static_cast<double>(r); }

// Boost's expression templates do not unify with std::min/std::max.
inline Rational rat_min(const Rational& a, const Rational& b) { return b < a ? b : a; }
inline Rational rat_max(const Rational& a, const Rational& b) { return a < b ? b : a; }

// Every finite double is an exact dyadic rational; this conversion is lossless.
inline Rational rational_from_double(double x) {
  if (!std::isfinite(x)) throw InvalidParams("rational_from_double: non-finite value");
  int exp = 0;
  double mant = std::frexp(x, &exp);  // x = mant * 2^exp, |mant| in [0.5, 1)
  const std::int64_t scaled = static_cast<std::int64_t>(std::ldexp(mant, 53));
  exp -= 53;
  Rational r(scaled);
  if (exp > 0) {
    r *= Rational(BigInt(1) << exp);
  } else if (exp < 0) {
    r /= Rational(BigInt(1) << (-exp));
  }
  return r;
}

// Accepts "p/q", plain integers, and decimal/scientific literals
// (the latter converted via their exact double value).
inline Rational parse_rational(const std::string& text) {
  const auto slash = text.find('/');
  if (slash != std::string::npos) {
    BigInt num(text.substr(0, slash));
    BigInt den(text.substr(slash + 1));
    if (den == 0) throw InvalidParams("parse_rational: zero denominator in '" + text + "'");
    return Rational(num, den);
  }
  if (text.find('.') == std::string::npos && text.find('e') == std::string::npos &&
      text.find('E') == std::string::npos) {
    return Rational(BigInt(text));
  }
  std::size_t pos = 0;
  const double v = std::stod(text, &pos);
  if (pos != text.size()) throw InvalidParams("parse_rational: cannot parse '" + text + "'");
  return rational_from_double(v);
}

inline std::string rational_to_string(const Rational& r) {
  const BigInt num = boost::multiprecision::numerator(r);
  const BigInt den = boost::multiprecision::denominator(r);
  if (den == 1) return num.str();
  return num.str() + "/" + den.str();
}

// Natural log of a positive big integer, stable far beyond the double range.
inline double log_bigint(const BigInt& v) {
  if (v <= 0) throw InvalidParams("log_bigint: argument must be positive");
  const unsigned bits = static_cast<unsigned>(boost::multiprecision::msb(v));
  if (bits <= 900) return std::log(static_cast<double>(v));
  const BigInt top = v >> (bits - 52);
  return std::log(static_cast<double>(top)) + static_cast<double>(bits - 52) * std::log(2.0);
}

inline BigInt bigint_pow(const BigInt& base, unsigned exp) {
  BigInt out = 1;
  BigInt b = base;
  unsigned e = exp;
  while (e > 0) {
    if (e & 1u) out *= b;
    b *= b;
    e >>= 1u;
  }
  return out;
}

}  // namespace mdimlab
