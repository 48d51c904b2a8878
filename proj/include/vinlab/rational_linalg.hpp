#pragma once

// Exact Gaussian elimination over the rationals on Eigen dense storage.
// Pivoting prefers the entry with the largest numerator magnitude among
// nonzero candidates; system sizes here are tiny (<= 2(n-1)) so coefficient
// growth is a non-issue.

#include <Eigen/Dense>

#include "vinlab/core.hpp"

namespace vinlab {

using RationalMatrix = Eigen::Matrix<Rational, Eigen::Dynamic, Eigen::Dynamic>;
using RationalVector = Eigen::Matrix<Rational, Eigen::Dynamic, 1>;

struct SingularSystem : std::domain_error {
  using std::domain_error::domain_error;
};

inline RationalVector solve_linear_exact(RationalMatrix A, RationalVector b) {
  const Eigen::Index m = A.rows();
  if (A.cols() != m || b.size() != m) throw ValidationError("solve_linear_exact: shape");
  for (Eigen::Index k = 0; k < m; ++k) {
    Eigen::Index piv = -1;
    BigInt best = 0;
    for (Eigen::Index r = k; r < m; ++r) {
      if (A(r, k) == 0) continue;
      BigInt mag = abs(num(A(r, k)));
      if (piv < 0 || mag > best) {
        piv = r;
        best = mag;
      }
    }
    if (piv < 0) throw SingularSystem("solve_linear_exact: singular matrix");
    if (piv != k) {
      A.row(piv).swap(A.row(k));
      std::swap(b(piv), b(k));
    }
    for (Eigen::Index r = k + 1; r < m; ++r) {
      if (A(r, k) == 0) continue;
      Rational f = A(r, k) / A(k, k);
      A.row(r) -= f * A.row(k);
      b(r) -= f * b(k);
    }
  }
  RationalVector x(m);
  for (Eigen::Index k = m - 1; k >= 0; --k) {
    Rational s = b(k);
    for (Eigen::Index c = k + 1; c < m; ++c) s -= A(k, c) * x(c);
    x(k) = s / A(k, k);
  }
  return x;
}

}  // namespace vinlab
