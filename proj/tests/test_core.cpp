#include <doctest.h>

#include <boost/multiprecision/cpp_bin_float.hpp>

#include "vinlab/core.hpp"
#include "vinlab/expsum.hpp"
#include "vinlab/rng.hpp"

using namespace vinlab;
using Float100 = boost::multiprecision::cpp_bin_float_100;

TEST_CASE("e_of roots of unity") {
  CHECK(e_of(0.0) == Complex(1, 0));
  CHECK(std::abs(e_of(0.5) - Complex(-1, 0)) < 1e-15);
  CHECK(std::abs(e_of(1.0 / 3.0) - Complex(-0.5, std::sqrt(3.0) / 2)) < 1e-12);
  for (double z : {0.123, -7.8, 41.5}) CHECK(std::abs(e_of(z + 1) - e_of(z)) < 1e-12);
  CHECK(std::abs(std::abs(e_of(12345.6789)) - 1.0) < 1e-14);
}

TEST_CASE("weight_eval values") {
  Ball ball((Vec(2) << 1.0, -2.0).finished(), 3.0);
  WeightProfile prof = WeightProfile::standard(2);

  CHECK(weight_eval(ball, prof, ball.center) == 1.0);

  // |x-c| = R gives 2^-E exactly (powers of two are exact doubles)
  Vec x = ball.center + (Vec(2) << 3.0, 0.0).finished();
  CHECK(weight_eval(ball, prof, x) == doctest::Approx(std::exp2(-200.0)).epsilon(1e-14));

  // |x-c| = 3R: compare to a 100-digit evaluation (1 ulp relative)
  Vec y = ball.center + (Vec(2) << 0.0, 9.0).finished();
  const double got = weight_eval(ball, prof, y);
  const double want = static_cast<double>(weight_radial<Float100>(Float100(3), 200));
  CHECK(std::abs(got - want) <= 2.3e-16 * want);
}

TEST_CASE("weight_eval is radially symmetric under coordinate permutation") {
  Ball ball(Vec::Zero(3), 2.5);
  WeightProfile prof = WeightProfile::standard(3);
  Vec a(3), b(3), c(3);
  a << 0.3, -1.7, 0.9;
  b << -1.7, 0.9, 0.3;
  c << 0.9, 0.3, -1.7;
  CHECK(weight_eval(ball, prof, a) == weight_eval(ball, prof, b));
  CHECK(weight_eval(ball, prof, b) == weight_eval(ball, prof, c));
}

TEST_CASE("weight profile validation") {
  const WeightProfile bad{2, 4.0};   // exponent < n+1
  CHECK_THROWS_AS(bad.validate(2), ValidationError);
  const WeightProfile ok{3, 4.0};
  CHECK_NOTHROW(ok.validate(2));
  CHECK_THROWS_AS(Ball(Vec::Zero(2), 0.0), ValidationError);
}

// Radial quadrature oracle for the truncation tail: substituting v = 1/(1+u)
// turns int_a^inf u^(n-1)(1+u)^-E du into int_0^{1/(1+a)} (1-v)^(n-1) v^(E-n-1) dv,
// a polynomial of degree E-2, integrated exactly by Gauss-Legendre.
static long double radial_tail_quadrature(int n, int E, double a) {
  const auto [nodes, weights] = gauss_legendre((E + 3) / 2 + 2);
  const long double hi = 1.0L / (1.0L + a);
  long double sum = 0;
  for (size_t q = 0; q < nodes.size(); ++q) {
    const long double v = 0.5L * hi * (nodes[q] + 1.0L);
    sum += static_cast<long double>(weights[q]) * powl(1.0L - v, n - 1) * powl(v, E - n - 1);
  }
  return sum * 0.5L * hi;
}

TEST_CASE("weight tail beyond 4B is negligible for the standard profile") {
  for (int n = 2; n <= 4; ++n) {
    const int E = 100 * n;
    const double frac = weight_tail_fraction(n, E, 4.0);
    CHECK(frac < 1e-30);
    // cross-check the closed form against the radial quadrature
    const long double tail_q = radial_tail_quadrature(n, E, 4.0);
    const long double total_q = radial_tail_quadrature(n, E, 0.0);
    const double frac_q = static_cast<double>(tail_q / total_q);
    CHECK(frac == doctest::Approx(frac_q).epsilon(1e-9));
    CHECK(weight_radial_tail(n, E, 4.0) ==
          doctest::Approx(static_cast<double>(tail_q)).epsilon(1e-9));
  }
}

TEST_CASE("weight mass within increasing radii is monotone and consistent") {
  // small exponent, so the successive shells carry visible mass
  const double full = weight_mass_within(2, 5, 1e9, 5.0);
  double prev = 0;
  for (double f : {0.5, 1.0, 2.0, 4.0}) {
    const double m = weight_mass_within(2, 5, f, 5.0);
    CHECK(m > prev);
    CHECK(m <= full * (1 + 1e-12));
    prev = m;
  }
  // with the standard profile everything inside B/2 already carries the mass
  CHECK(weight_mass_within(2, 200, 0.5, 5.0) ==
        doctest::Approx(weight_mass_within(2, 200, 4.0, 5.0)).epsilon(1e-12));
}

TEST_CASE("rational arithmetic reconstruction identity") {
  Rng rng(417);
  for (int k = 0; k < 1000; ++k) {
    const long long a = static_cast<long long>(rng.next_below(2000001)) - 1000000;
    const long long c = static_cast<long long>(rng.next_below(2000001)) - 1000000;
    const long long b = 1 + static_cast<long long>(rng.next_below(1000000));
    const long long d = 1 + static_cast<long long>(rng.next_below(1000000));
    const Rational lhs = (Rational(a, b) + Rational(c, d)) * (BigInt(b) * BigInt(d));
    CHECK(lhs == BigInt(a) * d + BigInt(c) * b);
  }
}

TEST_CASE("rational parse/format round trip and canonical form") {
  CHECK(to_string(*parse_rational("6/4")) == "3/2");
  CHECK(to_string(*parse_rational("-6/4")) == "-3/2");
  CHECK(to_string(*parse_rational("7")) == "7");
  CHECK(!parse_rational("1/0"));
  CHECK(!parse_rational(""));
  CHECK(!parse_rational("x"));
  CHECK(den(*parse_rational("5/10")) == 2);
}

TEST_CASE("rational_from_double is exact") {
  CHECK(rational_from_double(0.125) == Rational(1, 8));
  CHECK(rational_from_double(-2.75) == Rational(-11, 4));
  CHECK(rational_from_double(0.1) == Rational(BigInt("3602879701896397"), BigInt(1) << 55));
  CHECK(to_double(rational_from_double(0.1)) == 0.1);
}

TEST_CASE("floor_div matches mathematical floor") {
  CHECK(floor_div(7, 2) == 3);
  CHECK(floor_div(-7, 2) == -4);
  CHECK(floor_div(7, -2) == -4);
  CHECK(floor_div(-7, -2) == 3);
  CHECK(floor_ratio(Rational(-1, 3)) == -1);
}

TEST_CASE("rng determinism and substreams") {
  Rng a(42), b(42), c(43);
  for (int i = 0; i < 100; ++i) {
    CHECK(a.next_u64() == b.next_u64());
  }
  CHECK(c.next_u64() != Rng(42).next_u64());
  CHECK(substream_seed(1, 0) != substream_seed(1, 1));
  CHECK(substream_seed(1, 0) == substream_seed(1, 0));
  Rng d(7);
  for (int i = 0; i < 1000; ++i) {
    const double u = d.next_double();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
  }
}

TEST_CASE("torus reduction") {
  TorusPoint p{(Vec(2) << 1.75, -0.25).finished()};
  const TorusPoint r = p.reduced();
  CHECK(r.x[0] == doctest::Approx(0.75));
  CHECK(r.x[1] == doctest::Approx(0.75));
}
