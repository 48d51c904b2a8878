#pragma once

// Shared domain types for the Vinogradov / decoupling laboratory:
// system parameters, power-sum keys, torus points, balls, the standard
// decay weight w_B(x) = (1 + |x-c|/R)^-E, and step functions on a uniform
// 1/delta grid. All types are immutable values; operations are pure.

#include <Eigen/Dense>

#include <complex>
#include <stdexcept>
#include <vector>

#include "vinlab/rational.hpp"

namespace vinlab {

using Complex = std::complex<double>;
using Vec = Eigen::VectorXd;
using CVec = Eigen::VectorXcd;

// ---------------------------------------------------------------------------
// Errors. Budget violations are hard errors, never silent truncation.
// ---------------------------------------------------------------------------

struct BudgetExceeded : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct QuadratureBudgetExceeded : BudgetExceeded {
  using BudgetExceeded::BudgetExceeded;
};
struct DepthBudgetExceeded : BudgetExceeded {
  using BudgetExceeded::BudgetExceeded;
};
struct ValidationError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};
struct NonIntegerResult : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Domain types
// ---------------------------------------------------------------------------

// Vinogradov system parameters: degree n >= 2, multiplicity s >= 1, range N >= 1.
struct Instance {
  int n;
  int s;
  long N;

  Instance(int n_, int s_, long N_) : n(n_), s(s_), N(N_) {
    if (n < 2) throw ValidationError("Instance: n must be >= 2");
    if (s < 1) throw ValidationError("Instance: s must be >= 1");
    if (N < 1) throw ValidationError("Instance: N must be >= 1");
  }
};

// (sum X^1, ..., sum X^n) of an s-tuple from {1..N}, exact integers.
struct PowerSumKey {
  std::vector<BigInt> v;

  bool operator==(const PowerSumKey& o) const { return v == o.v; }
  bool operator<(const PowerSumKey& o) const { return v < o.v; }
};

// A point of the n-torus [0,1)^n, or an unreduced spatial point in R^n.
struct TorusPoint {
  Vec x;

  // Reduce every coordinate mod 1 into [0,1).
  TorusPoint reduced() const {
    TorusPoint r{x};
    for (int i = 0; i < r.x.size(); ++i) {
      double f = r.x[i] - std::floor(r.x[i]);
      r.x[i] = (f >= 1.0) ? 0.0 : f;  // guard against floor rounding at 1-eps
    }
    return r;
  }
};

struct Ball {
  Vec center;
  double radius;

  Ball(Vec c, double r) : center(std::move(c)), radius(r) {
    if (!(radius > 0)) throw ValidationError("Ball: radius must be positive");
  }
  int dim() const { return static_cast<int>(center.size()); }
};

// Weight profile for w_B(x) = (1 + |x-c|/R)^-exponent, integrated over
// truncation_factor * B. The default exponent is 100n; near the 4B boundary
// the weight underflows double precision, so weighted quadrature accumulates
// in extended precision.
struct WeightProfile {
  int exponent;
  double truncation_factor = 4.0;

  static WeightProfile standard(int n) { return WeightProfile{100 * n, 4.0}; }

  void validate(int n) const {
    if (exponent < n + 1)
      throw ValidationError("WeightProfile: exponent must be >= n+1 for an integrable tail");
    if (!(truncation_factor > 0))
      throw ValidationError("WeightProfile: truncation_factor must be positive");
  }
};

// Complex-valued function on [0,1], constant on a uniform grid of width
// delta = 1/cells(). coeffs[j] is the value on [j*delta, (j+1)*delta).
struct StepFunction {
  CVec coeffs;

  explicit StepFunction(CVec c) : coeffs(std::move(c)) {
    if (coeffs.size() < 1) throw ValidationError("StepFunction: needs at least one cell");
  }
  static StepFunction constant(int inv_delta, Complex value = Complex(1, 0)) {
    return StepFunction(CVec::Constant(inv_delta, value));
  }
  int cells() const { return static_cast<int>(coeffs.size()); }
  double delta() const { return 1.0 / cells(); }
  double max_abs() const { return coeffs.cwiseAbs().maxCoeff(); }
};

// Closed interval [lo, hi] in [0,1], aligned to a step-function grid.
struct Interval {
  double lo = 0.0;
  double hi = 1.0;
  double length() const { return hi - lo; }
};

// ---------------------------------------------------------------------------
// Elementary operations
// ---------------------------------------------------------------------------

// e(z) = exp(2 pi i z).
inline Complex e_of(double z) {
  double f = z - std::floor(z);  // reduce before scaling; keeps phase accurate for large z
  double a = 2.0 * M_PI * f;
  return Complex(std::cos(a), std::sin(a));
}

// w_B at x: (1 + |x-c|/R)^-E. Total function, radially symmetric, equals 1
// at the center and decreases strictly in |x-c|.
double weight_eval(const Ball& ball, const WeightProfile& profile, const Vec& x);

// Same profile as a function of the distance r = |x-c| (scalar template so
// oracles can run it in extended precision).
template <typename Real>
Real weight_radial(Real r_over_R, int exponent) {
  using std::pow;
  return pow(Real(1) + r_over_R, -Real(exponent));
}

// Exact integral of u^(n-1) (1+u)^-E over [a, infinity), from the binomial
// expansion of u^(n-1) = ((1+u)-1)^(n-1). Requires E > n.
double weight_radial_tail(int n, int exponent, double a);

// Integral of w_B over the ball of radius factor*R around the center
// (equals total minus tail, times the sphere area factor).
double weight_mass_within(int n, int exponent, double factor, double radius);

// Fraction of the total weight mass lying beyond factor*B.
double weight_tail_fraction(int n, int exponent, double factor);

double unit_ball_volume(int n);
inline double ball_volume(int n, double radius) {
  return unit_ball_volume(n) * std::pow(radius, n);
}

}  // namespace vinlab
