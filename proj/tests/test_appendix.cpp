#include <doctest.h>

#include "vinlab/appendix.hpp"
#include "vinlab/rng.hpp"

using namespace vinlab;

TEST_CASE("boundary identities at Delta = n+1, theta = 0") {
  for (int n = 3; n <= 8; ++n) {
    auto sol = solve_system(n, Rational(n + 1), Rational(0));
    for (int j = 1; j <= n - 1; ++j) {
      CHECK(sol.w(j) == Rational(n - j, n - 1));
      CHECK(sol.e(j) == Rational(2) * Rational(n - j, n - 1));
    }
    CHECK(sol.w(n) == 0);
  }
}

TEST_CASE("degenerate-direction solution for general Delta") {
  // eta_j = 2 (Delta - j - 1)/(Delta - 2) at theta = (Delta - n - 1)/(Delta - 2)
  const int n = 5;
  const Rational D(29, 5);
  const Rational theta = (D - n - 1) / (D - 2);
  auto sol = solve_system(n, D, theta);
  for (int j = 1; j <= n - 1; ++j) {
    CHECK(sol.e(j) == 2 * (D - j - 1) / (D - 2));
    CHECK(sol.w(j) == (D - j - 1) / (D - 2));
  }
}

TEST_CASE("n=3 closed form in exact rationals") {
  // omega_1(Delta, 0) = 9/(p-3) (1 + (12-p)/(p^2-12p+18)) with p = 3 Delta
  auto closed = [](const Rational& D) {
    const Rational p = 3 * D;
    return Rational(9) / (p - 3) * (1 + (12 - p) / (p * p - 12 * p + 18));
  };
  for (int k = 0; k <= 20; ++k) {
    const Rational D = Rational(39, 10) + Rational(k, 200);  // [3.9, 4.0]
    if (D == 4) {
      CHECK(solve_system(3, D, Rational(0)).w(1) == 1);
      continue;
    }
    CHECK(solve_system(3, D, Rational(0)).w(1) == closed(D));
  }
  // the specific pinned sample
  CHECK(solve_system(3, Rational(399, 100), Rational(0)).w(1) == closed(Rational(399, 100)));
}

TEST_CASE("residuals vanish exactly and the two routes agree on random inputs") {
  Rng rng(31337);
  int tested = 0;
  while (tested < 100) {
    const int n = 3 + static_cast<int>(rng.next_below(8));  // 3..10
    const Rational D = Rational(n) + Rational(1 + rng.next_below(2000), 2001);
    const Rational theta(static_cast<long long>(rng.next_below(41)) - 20, 7);
    try {
      auto sol = solve_system(n, D, theta);  // internally asserts both routes agree
      for (const auto& r : system_residuals(sol)) CHECK(r == 0);
      ++tested;
    } catch (const SingularSystem&) {
      // pole samples are skipped
    }
  }
}

TEST_CASE("omega_1 is exactly affine in theta") {
  Rng rng(271828);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 3 + static_cast<int>(rng.next_below(6));
    const Rational D = Rational(n) + Rational(1 + rng.next_below(999), 1000);
    auto aff = omega1_affine(n, D);
    // spot check at two more rationals
    for (const Rational& th : {Rational(5, 2), Rational(-7, 3)}) {
      CHECK(solve_system(n, D, th).w(1) == aff.A + aff.B * th);
    }
    // the degenerate-direction identity: omega_1 = 1 at theta* (ne84 shape)
    CHECK(aff.A + aff.B * ((D - n - 1) / (D - 2)) == 1);
  }
}

TEST_CASE("A at the boundary and B positivity near it") {
  CHECK(omega1_affine(3, Rational(4)).A == 1);
  CHECK(omega1_affine(4, Rational(5)).A == 1);
  CHECK(omega1_affine(3, Rational(4)).B > 0);
  for (int n = 3; n <= 8; ++n)
    for (int k = 0; k < 10; ++k) {
      const Rational D = Rational(n + 1) - Rational(k, 10 * 10);  // [n+1-1/10, n+1]
      CHECK(omega1_affine(n, D).B > 0);
    }
}

TEST_CASE("threshold verdicts") {
  CHECK(verify_threshold(3, Rational(4) - Rational(1, 1000)).above_one);
  CHECK(verify_threshold(3, Rational(4) - Rational(1, 1000)).margin == Rational(999, 1996001));
  for (int n = 3; n <= 8; ++n)
    CHECK(verify_threshold(n, Rational(n + 1) - Rational(1, 1000)).above_one);
  auto at_boundary = verify_threshold(3, Rational(4));
  CHECK(!at_boundary.above_one);
  CHECK(at_boundary.margin == 0);
}

TEST_CASE("margins shrink monotonically toward Delta = n+1") {
  for (int n : {3, 5}) {
    Rational prev_margin = -1;
    bool first = true;
    for (int k = 1; k <= 8; ++k) {
      const Rational D = Rational(n + 1) - pow_rat(Rational(1, 10), k);
      const Rational m = verify_threshold(n, D).margin;
      CHECK(m > 0);
      if (!first) CHECK(m < prev_margin);
      prev_margin = m;
      first = false;
    }
    // |omega_1 - 1| < 1e-6 at Delta = n+1 - 1e-8
    const Rational D = Rational(n + 1) - pow_rat(Rational(1, 10), 8);
    CHECK(std::abs(to_double(verify_threshold(n, D).margin)) < 1e-6);
  }
}

TEST_CASE("domain errors") {
  CHECK_THROWS_AS(solve_system(2, Rational(3), Rational(0)), DimensionTooSmall);
  CHECK_THROWS_AS(solve_system(5, Rational(3), Rational(0)), SingularSystem);  // pole
  CHECK_THROWS_AS(solve_system(4, Rational(0), Rational(0)), SingularSystem);
}

TEST_CASE("affine substitution iteration is monotone with vanishing residual") {
  for (int n : {3, 4, 5}) {
    const Rational D(n + 1);
    auto it = iterate_affine(n, D, 300);
    // A_r, B_r nondecreasing, A bounded by 1, B eventually positive
    for (size_t r = 1; r < it.A_r.size(); ++r) {
      CHECK(it.A_r[r] >= it.A_r[r - 1]);
      CHECK(it.B_r[r] >= it.B_r[r - 1]);
      CHECK(it.A_r[r] <= 1);
    }
    CHECK(it.B_r.back() > 0);
    CHECK(to_double(it.residual_mass) < 1e-8);
    // limits match the closed affine representation
    auto aff = omega1_affine(n, D);
    CHECK(std::abs(to_double(it.A_r.back() - aff.A)) < 1e-6);
    CHECK(std::abs(to_double(it.B_r.back() - aff.B)) < 1e-6);
  }
}
