#include "vinlab/appendix.hpp"

namespace vinlab {

namespace {

void check_domain(int n, const Rational& Delta) {
  if (n < 3) throw DimensionTooSmall("solve_system: n >= 3 required");
  if (Delta == 0) throw SingularSystem("solve_system: Delta = 0");
  for (int j = 1; j <= n; ++j)
    if (Delta == j) throw SingularSystem("solve_system: Delta in the pole set {1..n}");
}

Rational alpha_of(const Rational& D, int j) { return (D - (j + 1)) / (D - j); }
Rational beta_of(const Rational& D, int j) { return 2 * D / ((j + 1) * (D - j + 1)); }

// Route (a): reduce to the eta system.
SystemSolution solve_reduced(int n, const Rational& D, const Rational& theta) {
  const int m = n - 2;  // unknowns eta_2..eta_{n-1}
  RationalMatrix A = RationalMatrix::Zero(m, m);
  RationalVector rhs = RationalVector::Zero(m);
  for (int j = 2; j <= n - 1; ++j) {
    const int row = j - 2;
    const Rational cj = (1 - beta_of(D, j)) * Rational(j + 1, j);       // eta_{j-1} factor
    const Rational sj = 2 * D / (j * (D - j) * (D - j + 1));            // running-sum factor
    const Rational tj = sj * (D - n);                                   // theta factor
    A(row, row) += 1;
    for (int k = j; k <= n - 1; ++k) A(row, k - 2) -= sj;
    if (j == 2)
      rhs(row) += cj * 2;  // eta_1 = 2
    else
      A(row, j - 3) -= cj;
    rhs(row) += tj * theta;
  }
  RationalVector eta = solve_linear_exact(A, rhs);

  SystemSolution sol;
  sol.n = n;
  sol.Delta = D;
  sol.theta = theta;
  sol.eta.resize(n - 1);
  sol.eta[0] = 2;
  for (int j = 2; j <= n - 1; ++j) sol.eta[j - 1] = eta(j - 2);
  sol.omega.resize(n);
  sol.omega[n - 1] = theta;
  for (int j = 1; j <= n - 1; ++j) {
    Rational s = 0;
    for (int k = j; k <= n - 1; ++k) s += sol.eta[k - 1];
    sol.omega[j - 1] = s / (D - j) + theta * (D - n) / (D - j);
  }
  return sol;
}

// Route (b): the full system in (omega_1..omega_{n-1}, eta_2..eta_{n-1}).
SystemSolution solve_direct(int n, const Rational& D, const Rational& theta) {
  const int m = 2 * n - 3;
  auto wi = [&](int j) { return j - 1; };          // omega_j, 1 <= j <= n-1
  auto ei = [&](int j) { return (n - 1) + j - 2; }; // eta_j, 2 <= j <= n-1
  RationalMatrix A = RationalMatrix::Zero(m, m);
  RationalVector rhs = RationalVector::Zero(m);
  int row = 0;
  for (int j = 1; j <= n - 1; ++j, ++row) {
    const Rational aj = alpha_of(D, j);
    A(row, wi(j)) = 1;
    if (j == 1)
      rhs(row) += (1 - aj) * 2;  // eta_1 = 2
    else
      A(row, ei(j)) -= (1 - aj);
    if (j + 1 <= n - 1)
      A(row, wi(j + 1)) -= aj;
    else
      rhs(row) += aj * theta;  // omega_n = theta
  }
  for (int j = 2; j <= n - 1; ++j, ++row) {
    const Rational bj = beta_of(D, j);
    const Rational f(j + 1, j);
    A(row, ei(j)) = 1;
    A(row, wi(j)) -= bj * f;
    if (j == 2)
      rhs(row) += (1 - bj) * f * 2;
    else
      A(row, ei(j - 1)) -= (1 - bj) * f;
  }
  RationalVector x = solve_linear_exact(A, rhs);

  SystemSolution sol;
  sol.n = n;
  sol.Delta = D;
  sol.theta = theta;
  sol.omega.resize(n);
  for (int j = 1; j <= n - 1; ++j) sol.omega[j - 1] = x(wi(j));
  sol.omega[n - 1] = theta;
  sol.eta.resize(n - 1);
  sol.eta[0] = 2;
  for (int j = 2; j <= n - 1; ++j) sol.eta[j - 1] = x(ei(j));
  return sol;
}

}  // namespace

std::vector<Rational> system_residuals(const SystemSolution& sol) {
  const int n = sol.n;
  const Rational& D = sol.Delta;
  std::vector<Rational> res;
  for (int j = 1; j <= n - 1; ++j) {
    const Rational aj = alpha_of(D, j);
    res.push_back(sol.w(j) - (1 - aj) * sol.e(j) - aj * (j + 1 <= n - 1 ? sol.w(j + 1) : sol.theta));
  }
  for (int j = 2; j <= n - 1; ++j) {
    const Rational bj = beta_of(D, j);
    const Rational f(j + 1, j);
    res.push_back(sol.e(j) - (1 - bj) * f * sol.e(j - 1) - bj * f * sol.w(j));
  }
  return res;
}

SystemSolution solve_system(int n, const Rational& Delta, const Rational& theta) {
  check_domain(n, Delta);
  SystemSolution a = solve_reduced(n, Delta, theta);
  SystemSolution b = solve_direct(n, Delta, theta);
  if (a.omega != b.omega || a.eta != b.eta) {
    std::string msg = "solve_system: reduction and direct routes disagree:";
    for (int j = 1; j <= n; ++j)
      msg += " w" + std::to_string(j) + "=" + to_string(a.w(j)) + "|" + to_string(b.w(j));
    throw SingularSystem(msg);
  }
  return a;
}

OmegaAffine omega1_affine(int n, const Rational& Delta) {
  const Rational w0 = solve_system(n, Delta, Rational(0)).w(1);
  const Rational w1 = solve_system(n, Delta, Rational(1)).w(1);
  OmegaAffine aff{w0, w1 - w0};
  const Rational check_theta(1, 3);
  const Rational w3 = solve_system(n, Delta, check_theta).w(1);
  if (w3 != aff.A + aff.B * check_theta)
    throw NonAffine("omega1_affine: three-point collinearity failed");
  return aff;
}

ThresholdResult verify_threshold(int n, const Rational& Delta) {
  const Rational w0 = solve_system(n, Delta, Rational(0)).w(1);
  ThresholdResult r;
  r.margin = w0 - 1;
  r.above_one = r.margin > 0;
  return r;
}

AffineIteration iterate_affine(int n, const Rational& Delta, int rounds) {
  check_domain(n, Delta);
  if (rounds < 1) throw ValidationError("iterate_affine: rounds >= 1");
  const Rational& D = Delta;

  // coefficient vector layout: [const, theta, omega_1.., omega_{n-1}, eta_2.., eta_{n-1}]
  const int m = 2 + (n - 1) + (n - 2);
  auto wi = [&](int j) { return 2 + j - 1; };
  auto ei = [&](int j) { return 2 + (n - 1) + j - 2; };

  RationalVector c = RationalVector::Zero(m);
  c(wi(1)) = 1;  // start from omega_1 itself

  AffineIteration out;
  for (int r = 0; r < rounds; ++r) {
    RationalVector next = RationalVector::Zero(m);
    next(0) = c(0);
    next(1) = c(1);
    for (int j = 1; j <= n - 1; ++j) {
      const Rational coef = c(wi(j));
      if (coef == 0) continue;
      const Rational aj = alpha_of(D, j);
      // omega_j = (1-alpha_j) eta_j + alpha_j omega_{j+1}
      if (j == 1)
        next(0) += coef * (1 - aj) * 2;
      else
        next(ei(j)) += coef * (1 - aj);
      if (j + 1 <= n - 1)
        next(wi(j + 1)) += coef * aj;
      else
        next(1) += coef * aj;  // omega_n = theta
    }
    for (int j = 2; j <= n - 1; ++j) {
      const Rational coef = c(ei(j));
      if (coef == 0) continue;
      const Rational bj = beta_of(D, j);
      const Rational f(j + 1, j);
      // eta_j = (1-beta_j)(j+1)/j eta_{j-1} + beta_j (j+1)/j omega_j
      if (j == 2)
        next(0) += coef * (1 - bj) * f * 2;
      else
        next(ei(j - 1)) += coef * (1 - bj) * f;
      next(wi(j)) += coef * bj * f;
    }
    c = next;
    out.A_r.push_back(c(0));
    out.B_r.push_back(c(1));
  }
  Rational mass = 0;
  for (int i = 2; i < m; ++i) mass += c(i);
  out.residual_mass = mass;
  return out;
}

}  // namespace vinlab
