#pragma once

// Exact-rational solver for the weight recursion
//
//   omega_j = (1-alpha_j) eta_j + alpha_j omega_{j+1}      1 <= j <= n-1
//   eta_j   = (1-beta_j) (j+1)/j eta_{j-1}
//             + beta_j (j+1)/j omega_j                     2 <= j <= n-1
//   omega_n = theta,  eta_1 = 2
//
// with alpha_j = (Delta-(j+1))/(Delta-j), beta_j = 2Delta/((j+1)(Delta-j+1)).
//
// Two independent routes:
//   (a) iterate the omega-equation into
//         omega_j = (eta_j + ... + eta_{n-1})/(Delta-j) + theta (Delta-n)/(Delta-j),
//       substitute into the eta-equation, and solve the resulting
//       (n-2)x(n-2) system for eta_2..eta_{n-1};
//   (b) solve the full (2n-3)-variable system directly.
// Both are exact and must agree exactly.
//
// omega_1(Delta, theta) is affine in theta; its value at
// theta = (Delta-n-1)/(Delta-2) is exactly 1, and omega_1(Delta, 0) > 1 for
// Delta slightly below n+1 is the threshold this module verifies.

#include <vector>

#include "vinlab/rational_linalg.hpp"
#include "vinlab/weights.hpp"

namespace vinlab {

struct DimensionTooSmall : std::domain_error {
  using std::domain_error::domain_error;
};
struct NonAffine : std::logic_error {
  using std::logic_error::logic_error;
};

struct SystemSolution {
  int n = 0;
  Rational Delta;
  Rational theta;
  std::vector<Rational> omega;  // omega_1 .. omega_n (omega_n = theta)
  std::vector<Rational> eta;    // eta_1 .. eta_{n-1} (eta_1 = 2)

  const Rational& w(int j) const { return omega.at(j - 1); }
  const Rational& e(int j) const { return eta.at(j - 1); }
};

// Exact residuals of every recursion equation; all zero for a solution.
std::vector<Rational> system_residuals(const SystemSolution& sol);

SystemSolution solve_system(int n, const Rational& Delta, const Rational& theta);

struct OmegaAffine {
  Rational A;  // omega_1(Delta, 0)
  Rational B;  // slope in theta
};

// Exact affine representation omega_1 = A + B theta, validated at a third theta.
OmegaAffine omega1_affine(int n, const Rational& Delta);

struct ThresholdResult {
  bool above_one = false;
  Rational margin;  // omega_1(Delta, 0) - 1, exact
};

ThresholdResult verify_threshold(int n, const Rational& Delta);

// Iterative affine substitution: after r rounds omega_1 is represented as
//   A_r + B_r theta + sum a_{i,r} omega_i + sum b_{i,r} eta_i
// with nonnegative, nondecreasing A_r, B_r and vanishing residual
// coefficient mass. Exposes the monotone limits A, B.
struct AffineIteration {
  std::vector<Rational> A_r;
  std::vector<Rational> B_r;
  Rational residual_mass;  // sum of leftover omega/eta coefficients at round r
};

AffineIteration iterate_affine(int n, const Rational& Delta, int rounds);

}  // namespace vinlab
