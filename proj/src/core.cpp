#include "vinlab/core.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace vinlab {

std::optional<Rational> parse_rational(const std::string& s) {
  if (s.empty()) return std::nullopt;
  auto slash = s.find('/');
  try {
    if (slash == std::string::npos) return Rational(BigInt(s));
    BigInt n(s.substr(0, slash)), d(s.substr(slash + 1));
    if (d == 0) return std::nullopt;
    return Rational(n, d);
  } catch (const std::exception&) {
    return std::nullopt;
  }
}

std::string to_string(const Rational& q) {
  std::string s = num(q).str();
  if (den(q) != 1) s += "/" + den(q).str();
  return s;
}

Rational rational_from_double(double x) {
  if (!std::isfinite(x)) throw ValidationError("rational_from_double: non-finite input");
  if (x == 0.0) return Rational(0);
  int exp2 = 0;
  double m = std::frexp(x, &exp2);  // x = m * 2^exp2, |m| in [0.5, 1)
  // 53 doublings make the mantissa integral.
  BigInt mant(static_cast<long long>(std::ldexp(m, 53)));
  exp2 -= 53;
  Rational r(mant);
  if (exp2 >= 0) return r * pow_big(BigInt(2), static_cast<unsigned>(exp2));
  return r / pow_big(BigInt(2), static_cast<unsigned>(-exp2));
}

BigInt floor_div(const BigInt& a, const BigInt& b) {
  if (b == 0) throw ValidationError("floor_div: division by zero");
  BigInt q = a / b, r = a % b;
  if (r != 0 && ((r < 0) != (b < 0))) --q;
  return q;
}

double weight_eval(const Ball& ball, const WeightProfile& profile, const Vec& x) {
  profile.validate(ball.dim());
  // squared deviations summed in sorted order, so coordinate permutations
  // give bitwise-identical values
  std::vector<double> sq(ball.dim());
  for (int i = 0; i < ball.dim(); ++i) {
    const double d = x[i] - ball.center[i];
    sq[i] = d * d;
  }
  std::sort(sq.begin(), sq.end());
  double s = 0;
  for (double v : sq) s += v;
  const double r = std::sqrt(s) / ball.radius;
  // integer-exponent binary powering in long double keeps the result within
  // an ulp even at exponent several hundred
  long double base = 1.0L / (1.0L + static_cast<long double>(r));
  long double out = 1.0L;
  for (unsigned e = static_cast<unsigned>(profile.exponent); e; e >>= 1, base *= base)
    if (e & 1) out *= base;
  return static_cast<double>(out);
}

namespace {

double binom(int n, int k) {
  double r = 1;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

// log of integral_a^inf u^(n-1) (1+u)^-E du, exact via binomial expansion:
//   sum_k C(n-1,k) (-1)^(n-1-k) (1+a)^(k-E+1) / (E-k-1).
// Returned in log space so that E ~ several hundred stays representable.
long double log_radial_tail(int n, int E, double a) {
  if (E <= n) throw ValidationError("weight tail: exponent must exceed dimension");
  const long double l1a = std::log1p(static_cast<long double>(a));
  long double sum = 0.0L;
  // Factor out the k = n-1 term's magnitude to keep the sum near unity.
  const long double lead = (n - E) * l1a;
  for (int k = 0; k <= n - 1; ++k) {
    long double term = binom(n - 1, k) / static_cast<long double>(E - k - 1);
    if ((n - 1 - k) % 2 == 1) term = -term;
    sum += term * std::exp((k - E + 1) * l1a - lead);
  }
  return lead + std::log(sum);
}

}  // namespace

double weight_radial_tail(int n, int exponent, double a) {
  return static_cast<double>(std::exp(log_radial_tail(n, exponent, a)));
}

double weight_tail_fraction(int n, int exponent, double factor) {
  const long double lt = log_radial_tail(n, exponent, factor);
  const long double l0 = log_radial_tail(n, exponent, 0.0);
  return static_cast<double>(std::exp(lt - l0));
}

double weight_mass_within(int n, int exponent, double factor, double radius) {
  // surface(S^{n-1}) = n * vol(B^n)
  const double surf = n * unit_ball_volume(n);
  const long double whole = std::exp(log_radial_tail(n, exponent, 0.0));
  const long double tail = std::exp(log_radial_tail(n, exponent, factor));
  return surf * std::pow(radius, n) * static_cast<double>(whole - tail);
}

double unit_ball_volume(int n) {
  return std::pow(M_PI, 0.5 * n) / std::tgamma(0.5 * n + 1.0);
}

}  // namespace vinlab
