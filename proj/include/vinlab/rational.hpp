#pragma once

// Exact arithmetic carriers: arbitrary-precision integers and rationals
// (boost.multiprecision backends), plus parsing/formatting helpers shared
// by the counting, weight and recursion-solver code.
//
// Rationals are kept in canonical form by the backend: gcd(|num|,den) = 1,
// den > 0. All weight/recursion identities in this project are exact
// rational statements; doubles only ever appear in reports.

#include <boost/multiprecision/cpp_int.hpp>
#include <boost/multiprecision/eigen.hpp>

#include <optional>
#include <stdexcept>
#include <string>

namespace vinlab {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

inline BigInt num(const Rational& q) { return boost::multiprecision::numerator(q); }
inline BigInt den(const Rational& q) { return boost::multiprecision::denominator(q); }

// "a/b" or "a"; whitespace not accepted.
std::optional<Rational> parse_rational(const std::string& s);

// Canonical "num/den" (or "num" when den == 1).
std::string to_string(const Rational& q);

inline double to_double(const Rational& q) { return q.convert_to<double>(); }
inline double to_double(const BigInt& v) { return v.convert_to<double>(); }

// Exact conversion; every finite double is a dyadic rational.
Rational rational_from_double(double x);

// floor(a/b) for exact bucket indexing.
BigInt floor_div(const BigInt& a, const BigInt& b);
inline BigInt floor_ratio(const Rational& q) { return floor_div(num(q), den(q)); }

inline BigInt pow_big(const BigInt& base, unsigned e) {
  BigInt r = 1, b = base;
  for (; e; e >>= 1, b *= b)
    if (e & 1) r *= b;
  return r;
}

inline Rational pow_rat(const Rational& base, long e) {
  if (e < 0) {
    if (base == 0) throw std::domain_error("pow_rat: 0^negative");
    Rational inv(den(base), num(base));
    return pow_rat(inv, -e);
  }
  Rational r = 1, b = base;
  for (unsigned long k = static_cast<unsigned long>(e); k; k >>= 1, b *= b)
    if (k & 1) r *= b;
  return r;
}

}  // namespace vinlab
