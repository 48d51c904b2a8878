#include <doctest.h>

#include "vinlab/decouple.hpp"

using namespace vinlab;

namespace {
StepFunction single_interval(int cells, int which) {
  CVec c = CVec::Zero(cells);
  c[which] = Complex(1, 0);
  return StepFunction(c);
}
}  // namespace

TEST_CASE("single-interval g gives ratio 1") {
  auto cfg = experiment_config(1);
  const Ball ball(Vec::Zero(2), 64.0);
  auto r = decoupling_ratio(2, 6.0, single_interval(8, 3), ball, WeightProfile::standard(2), cfg);
  CHECK(r.ratio == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("baseline constant-g ratio and the Cauchy-Schwarz cap") {
  auto cfg = experiment_config(1);
  const Ball ball(Vec::Zero(2), 64.0);
  auto r = decoupling_ratio(2, 6.0, StepFunction::constant(8), ball, WeightProfile::standard(2), cfg);
  CHECK(r.ratio >= 0.5);
  CHECK(std::isfinite(r.ratio));
  CHECK(r.ratio <= std::sqrt(8.0) * (1 + 1e-6));
}

TEST_CASE("ratios are invariant under scaling and unimodular rotation of g") {
  auto cfg = experiment_config(7);
  const Ball ball(Vec::Zero(2), 64.0);
  const WeightProfile prof = WeightProfile::standard(2);
  auto g = random_unimodular_step(8, 123);
  const double base = decoupling_ratio(2, 6.0, g, ball, prof, cfg).ratio;

  StepFunction scaled(g.coeffs * Complex(5.0, 0.0));
  CHECK(decoupling_ratio(2, 6.0, scaled, ball, prof, cfg).ratio ==
        doctest::Approx(base).epsilon(1e-10));

  StepFunction rotated(g.coeffs * e_of(0.37));
  CHECK(decoupling_ratio(2, 6.0, rotated, ball, prof, cfg).ratio ==
        doctest::Approx(base).epsilon(1e-10));
}

TEST_CASE("vp_scan structure on a cheap grid") {
  auto scan = vp_scan(2, 6.0, {4, 8}, 2, 42, experiment_config(42));
  REQUIRE(scan.points.size() == 2);
  CHECK(scan.points[0].trial_ratios.size() == 2);
  // the max over trials dominates the constant-g trial (trial 0)
  for (const auto& pt : scan.points) CHECK(pt.max_ratio >= pt.trial_ratios[0] - 1e-12);
  CHECK(std::isfinite(scan.eta_hat));
  for (const auto& pt : scan.points) CHECK(pt.doubling_shift < 0.05);
}

TEST_CASE("l2 orthogonality: single fine interval gives 1, baseline is density-stable") {
  auto cfg = experiment_config(3);
  auto r1 = l2_orthogonality_ratio(2, single_interval(16, 5), cfg);
  CHECK(r1.ratio == doctest::Approx(1.0).epsilon(1e-6));

  auto base = l2_orthogonality_ratio(2, StepFunction::constant(8), cfg);
  auto dense_cfg = cfg;
  dense_cfg.density = 2.0;
  auto dense = l2_orthogonality_ratio(2, StepFunction::constant(8), dense_cfg);
  CHECK(std::abs(dense.ratio - base.ratio) <= 0.05 * base.ratio);
}

TEST_CASE("lower-dimensional ratio: single piece gives 1; stability across t0") {
  auto cfg = experiment_config(5);
  cfg.mc_samples = 4000;
  // sigma = 1/4, R = 64: pieces of length 1/8, so two pieces per arc
  auto single = lower_dim_ratio(0.0, 0.125, 64.0, 6.0, single_interval(8, 0), cfg);
  CHECK(single.ratio == doctest::Approx(1.0).epsilon(1e-5));

  std::vector<double> ratios;
  for (double t0 : {0.0, 0.25, 0.5}) {
    auto r = lower_dim_ratio(t0, 0.25, 64.0, 6.0, StepFunction::constant(8), cfg);
    CHECK(std::isfinite(r.ratio));
    ratios.push_back(r.ratio);
  }
  for (double r : ratios) CHECK(r == doctest::Approx(ratios[0]).epsilon(0.10));
}

TEST_CASE("lower-dimensional ratio validates the scale relation") {
  auto cfg = experiment_config(5);
  CHECK_THROWS_AS(lower_dim_ratio(0.0, 0.5, 1.5, 6.0, StepFunction::constant(8), cfg),
                  ValidationError);  // sigma^-2 > R
}

TEST_CASE("discrete restriction: single wave saturates exactly") {
  auto cfg = experiment_config(9);
  cfg.mc_samples = 2000;
  std::vector<Complex> a(8, Complex(0, 0));
  a[3] = Complex(2.5, 0);
  std::vector<double> t(8);
  for (int i = 0; i < 8; ++i) t[i] = (i + 1) / 8.0;
  auto r = discrete_restriction_ratio(2, 6.0, 8, a, t, 64.0, cfg);
  // |f| == |a_3| pointwise, so LHS = |a_3| up to the mass normalization
  CHECK(r.lhs == doctest::Approx(2.5).epsilon(1e-6));
  CHECK(r.ratio <= 1.0);
}

TEST_CASE("discrete restriction: bounded ratio across seeds") {
  std::vector<Complex> a(8, Complex(1, 0));
  std::vector<double> t(8);
  for (int i = 0; i < 8; ++i) t[i] = (i + 1) / 8.0;
  for (std::uint64_t seed : {1ULL, 2ULL, 3ULL, 4ULL, 5ULL}) {
    auto cfg = experiment_config(seed);
    cfg.mc_samples = 4000;
    auto r = discrete_restriction_ratio(2, 6.0, 8, a, t, 64.0, cfg);
    CHECK(r.ratio > 0);
    CHECK(r.ratio <= 10.0);
  }
}

TEST_CASE("discrete restriction: supercritical growth exponent in range") {
  // LHS/||a||_2 against N at p=12; predicted slope 1/2 (1 - 6/12) = 1/4
  std::vector<double> logN, logL;
  for (int N : {4, 8, 16}) {
    std::vector<Complex> a(N, Complex(1, 0));
    std::vector<double> t(N);
    for (int i = 0; i < N; ++i) t[i] = double(i + 1) / N;
    auto cfg = experiment_config(17);
    cfg.mc_samples = 20000;
    auto r = discrete_restriction_ratio(2, 12.0, N, a, t, std::pow(double(N), 2), cfg);
    logN.push_back(std::log(double(N)));
    logL.push_back(std::log(r.lhs / std::sqrt(double(N))));
  }
  const double slope =
      (logL.back() - logL.front()) / (logN.back() - logN.front());
  CHECK(slope >= 0.1);
  CHECK(slope <= 0.4);
}

TEST_CASE("ball inflation: degenerate single-piece product and scale growth") {
  auto cfg = experiment_config(2);
  // one active piece in each separated interval
  CVec c = CVec::Zero(8);
  c[0] = Complex(1, 0);  // inside I_1 = [0, 1/4]
  c[4] = Complex(1, 0);  // inside I_2 = [1/2, 3/4]
  StepFunction g(c);
  auto r = ball_inflation_ratio(4.0, 8, 4, g, cfg);
  CHECK(std::isfinite(r.ratio));
  CHECK(r.ratio > 0);

  auto r8 = ball_inflation_ratio(4.0, 8, 4, StepFunction::constant(8), cfg);
  auto r16 = ball_inflation_ratio(4.0, 16, 4, StepFunction::constant(16), cfg);
  CHECK(r8.ratio <= 10.0);
  CHECK(r16.ratio / r8.ratio <= 2.0);

  // homogeneity passes through the bilinear expression
  StepFunction g5(g.coeffs * Complex(0, 5));
  auto r5 = ball_inflation_ratio(4.0, 8, 4, g5, cfg);
  CHECK(r5.ratio == doctest::Approx(r.ratio).epsilon(1e-9));
}

TEST_CASE("ball inflation parameter validation") {
  auto cfg = experiment_config(2);
  CHECK_THROWS_AS(ball_inflation_ratio(4.0, 8, 3, StepFunction::constant(8), cfg),
                  ValidationError);  // K < 4
  CHECK_THROWS_AS(ball_inflation_ratio(4.0, 4, 4, StepFunction::constant(4), cfg),
                  ValidationError);  // rho >= 1/K
}
