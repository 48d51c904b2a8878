#include <doctest.h>

#include "vinlab/counting.hpp"
#include "vinlab/expsum.hpp"
#include "vinlab/rng.hpp"

using namespace vinlab;

TEST_CASE("eval_F pinned values") {
  // x = 0: all phases vanish
  CHECK(std::abs(eval_F(TorusPoint{Vec::Zero(2)}, 7, 2) - Complex(7, 0)) < 1e-12);
  // n=2, x=(1/2, 0), N=4: alternating +-1 sums to zero
  TorusPoint half{(Vec(2) << 0.5, 0.0).finished()};
  CHECK(std::abs(eval_F(half, 4, 2)) < 1e-12);
}

TEST_CASE("eval_F against extended-precision term-by-term summation") {
  TorusPoint x{(Vec(2) << 0.37, 0.11).finished()};
  const long N = 50;
  long double re = 0, im = 0;
  for (long j = 1; j <= N; ++j) {
    const long double phase = 2.0L * M_PIl * (0.37L * j + 0.11L * j * j);
    re += cosl(phase);
    im += sinl(phase);
  }
  const Complex got = eval_F(x, N, 2);
  const long double mag = hypotl(re, im);
  CHECK(std::abs(got - Complex(double(re), double(im))) < 1e-10 * double(mag));
}

TEST_CASE("eval_F is bounded by N and 1-periodic") {
  Rng rng(5150);
  for (int k = 0; k < 10000; ++k) {
    TorusPoint x{(Vec(2) << rng.next_double(), rng.next_double()).finished()};
    CHECK(std::abs(eval_F(x, 23, 2)) <= 23.0 + 1e-9);
  }
  Rng rng2(6);
  for (int k = 0; k < 100; ++k) {
    TorusPoint x{(Vec(3) << rng2.next_double(), rng2.next_double(), rng2.next_double()).finished()};
    for (int i = 0; i < 3; ++i) {
      TorusPoint y = x;
      y.x[i] += 1.0;
      CHECK(std::abs(eval_F(x, 31, 3) - eval_F(y, 31, 3)) <= 1e-9 * 31);
    }
  }
}

TEST_CASE("eval_extension basic values") {
  StepFunction one = StepFunction::constant(8);
  // x = 0: the plain integral of g
  CHECK(std::abs(eval_extension(one, {0.0, 1.0}, Vec::Zero(2)) - Complex(1, 0)) < 1e-12);

  // closed form (e(x1) - 1) / (2 pi i x1) for the pure-frequency case
  Vec x = (Vec(2) << 3.7, 0.0).finished();
  const Complex expected = (e_of(3.7) - Complex(1, 0)) / (Complex(0, 2 * M_PI * 3.7));
  CHECK(std::abs(eval_extension(one, {0.0, 1.0}, x) - expected) < 1e-10);
}

TEST_CASE("eval_extension against a dense Riemann oracle") {
  StepFunction g = [] {
    Rng rng(77);
    CVec c(8);
    for (int i = 0; i < 8; ++i) c[i] = Complex(2 * rng.next_double() - 1, 2 * rng.next_double() - 1);
    return StepFunction(c);
  }();
  Vec x = (Vec(2) << 100.0, -50.0).finished();

  // 4e6-point midpoint rule in long double; absolute accuracy ~1e-9 at these
  // frequencies, which is what the comparison needs (the value itself is ~1e-3)
  const long M = 4000000;
  long double re = 0, im = 0;
  for (long k = 0; k < M; ++k) {
    const long double t = (k + 0.5L) / M;
    const Complex gv = g.coeffs[std::min<int>(7, static_cast<int>(t * 8))];
    const long double phase = 2.0L * M_PIl * (t * 100.0L - t * t * 50.0L);
    re += gv.real() * cosl(phase) - gv.imag() * sinl(phase);
    im += gv.real() * sinl(phase) + gv.imag() * cosl(phase);
  }
  const Complex oracle(double(re / M), double(im / M));
  const Complex got = eval_extension(g, {0.0, 1.0}, x);
  CHECK(std::abs(got - oracle) < 1e-8);
}

TEST_CASE("eval_extension linearity and interval additivity") {
  Rng rng(99);
  CVec ca(8), cb(8);
  for (int i = 0; i < 8; ++i) {
    ca[i] = Complex(rng.next_double(), rng.next_double());
    cb[i] = Complex(rng.next_double(), rng.next_double());
  }
  StepFunction ga(ca), gb(cb);
  const Complex wa(1.7, -0.3), wb(0.4, 2.2);
  StepFunction combo(wa * ca + wb * cb);
  Vec x = (Vec(2) << 17.0, 5.0).finished();
  const Complex direct = eval_extension(combo, {0.0, 1.0}, x);
  const Complex split = wa * eval_extension(ga, {0.0, 1.0}, x) + wb * eval_extension(gb, {0.0, 1.0}, x);
  CHECK(std::abs(direct - split) <= 1e-10 * std::max(1.0, std::abs(direct)));

  const Complex whole = eval_extension(ga, {0.0, 0.5}, x);
  const Complex parts =
      eval_extension(ga, {0.0, 0.25}, x) + eval_extension(ga, {0.25, 0.5}, x);
  CHECK(std::abs(whole - parts) < 1e-11);
}

TEST_CASE("eval_extension validates alignment and budget") {
  StepFunction g = StepFunction::constant(8);
  CHECK_THROWS_AS(eval_extension(g, {0.0, 0.3}, Vec::Zero(2)), ValidationError);
  QuadratureConfig tiny;
  tiny.max_panels = 1;
  Vec far = (Vec(2) << 1e4, 1e4).finished();
  CHECK_THROWS_AS(eval_extension(g, {0.0, 1.0}, far, tiny), QuadratureBudgetExceeded);
}

TEST_CASE("weighted_norm of constants matches the radial mass") {
  const Ball ball((Vec(2) << 0.3, -0.4).finished(), 7.3);
  const WeightProfile prof = WeightProfile::standard(2);
  QuadratureConfig cfg;
  const Complex c(2.0, 1.0);
  for (double p : {2.0, 6.0}) {
    auto res = weighted_norm([&](const Vec&) { return c; }, ball, p, prof, cfg, true);
    const double a = effective_truncation_factor(2, prof);
    const double expect =
        std::abs(c) *
        std::pow(weight_mass_within(2, prof.exponent, a, ball.radius) / ball_volume(2, ball.radius),
                 1.0 / p);
    CHECK(res.value == doctest::Approx(expect).epsilon(0.02));
  }
  auto zero = weighted_norm([](const Vec&) { return Complex(0, 0); }, ball, 2.0, prof, cfg);
  CHECK(zero.value == 0.0);
}

TEST_CASE("engine norms match an independent dense pointwise oracle") {
  // p=2, g == 1, n=2, ball radius 64: the engine's rank-1 panel path against
  // direct pointwise extension evaluation on the generic tensor grid
  StepFunction g = StepFunction::constant(8);
  const Ball ball(Vec::Zero(2), 64.0);
  const WeightProfile prof = WeightProfile::standard(2);
  QuadratureConfig engine_cfg;
  engine_cfg.panels_per_oscillation = 1.0 / 3.0;
  engine_cfg.nodes_per_panel = 16;
  auto norms = extension_norms(g, {{0.0, 1.0}}, 2, ball, prof, {2.0}, engine_cfg, true);

  QuadratureConfig oracle_cfg;  // pointwise spec defaults, denser rate
  oracle_cfg.density = 1.7;
  auto oracle = weighted_norm(
      [&](const Vec& x) { return eval_extension(g, {0.0, 1.0}, x, oracle_cfg); }, ball, 2.0, prof,
      oracle_cfg, true);
  CHECK(norms.total[0].value == doctest::Approx(oracle.value).epsilon(0.01));
}

TEST_CASE("torus integral equals the exact counts") {
  CHECK(torus_integral_power(Instance(2, 2, 2)) == 6);
  CHECK(torus_integral_power(Instance(2, 1, 3)) == 3);
  CHECK(torus_integral_power(Instance(2, 3, 3)) == count_mitm(Instance(2, 3, 3)));
  CHECK_THROWS_AS(torus_integral_power(Instance(2, 3, 400)), BudgetExceeded);
}

TEST_CASE("monte carlo moment estimates") {
  QuadratureConfig cfg;
  cfg.mc_samples = 100000;
  cfg.seed = 314159;
  auto est = moment_monte_carlo(Instance(2, 2, 2), cfg);
  CHECK(std::abs(est.estimate - 6.0) <= 3.0 * est.standard_error);

  auto unit = moment_monte_carlo(Instance(2, 1, 1), cfg);
  CHECK(unit.estimate == 1.0);
  CHECK(unit.standard_error == 0.0);

  auto big = moment_monte_carlo(Instance(3, 2, 4), cfg);
  const double expect = count_mitm(Instance(3, 2, 4)).convert_to<double>();
  CHECK(std::abs(big.estimate - expect) <= 3.0 * big.standard_error);

  QuadratureConfig small;
  small.mc_samples = 10;
  CHECK_THROWS_AS(moment_monte_carlo(Instance(2, 1, 2), small), ValidationError);
}

TEST_CASE("monte carlo norm path (n=3) is consistent on constants") {
  const Ball ball(Vec::Zero(3), 16.0);
  const WeightProfile prof = WeightProfile::standard(3);
  QuadratureConfig cfg;
  cfg.mc_samples = 20000;
  cfg.seed = 404;
  auto res = weighted_norm([](const Vec&) { return Complex(3, 0); }, ball, 6.0, prof, cfg, true);
  const double a = effective_truncation_factor(3, prof);
  const double expect =
      3.0 * std::pow(weight_mass_within(3, prof.exponent, a, ball.radius) /
                         ball_volume(3, ball.radius),
                     1.0 / 6.0);
  // constants have zero sampling variance in this estimator
  CHECK(res.value == doctest::Approx(expect).epsilon(1e-9));
  CHECK(res.quadrature_estimate_error <= 1e-12 * expect);
}

TEST_CASE("phase oscillation bound") {
  Vec x = (Vec(3) << -3.0, 2.0, 1.0).finished();
  CHECK(phase_oscillation_bound(x) == doctest::Approx(3 + 4 + 3));
}
