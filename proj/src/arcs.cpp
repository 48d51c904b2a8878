#include "vinlab/arcs.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "vinlab/expsum.hpp"

namespace vinlab {

namespace {

long gcd_long(long a, long b) { return std::gcd(a, b); }

double torus_dist(double x, double y) {
  double d = std::abs(x - y);
  d -= std::floor(d);
  return std::min(d, 1.0 - d);
}

}  // namespace

long arc_level(long N, int n) {
  if (N < 1) throw ValidationError("arc_level: N >= 1");
  long q = 1;
  while (true) {
    BigInt next = pow_big(BigInt(q + 1), 2 * n);
    if (next > N) break;
    ++q;
  }
  return q;
}

std::optional<MajorArcLabel> classify(const TorusPoint& x0, long N, int n) {
  const TorusPoint x = x0.reduced();
  if (x.x.size() != n) throw ValidationError("classify: dimension mismatch");
  const long L = arc_level(N, n);
  const double Lreal = std::pow(static_cast<double>(N), 1.0 / (2.0 * n));

  for (long q = 1; q <= L; ++q) {
    // candidate residues per coordinate, ascending, so the first full match
    // is lexicographically smallest
    std::vector<std::vector<long>> cand(n);
    bool feasible = true;
    for (int j = 1; j <= n && feasible; ++j) {
      const double window = Lreal * std::pow(static_cast<double>(N), -j);
      for (long a = 1; a <= q; ++a)
        if (torus_dist(x.x[j - 1], static_cast<double>(a) / q) <= window)
          cand[j - 1].push_back(a);
      feasible = !cand[j - 1].empty();
    }
    if (!feasible) continue;
    std::vector<int> idx(n, 0);
    for (;;) {
      long g = q;
      for (int j = 0; j < n; ++j) g = gcd_long(g, cand[j][idx[j]]);
      if (g == 1) {
        MajorArcLabel label;
        label.q = q;
        for (int j = 0; j < n; ++j) label.a.push_back(cand[j][idx[j]]);
        return label;
      }
      int d = n - 1;
      while (d >= 0 && ++idx[d] == static_cast<int>(cand[d].size())) idx[d--] = 0;
      if (d < 0) break;
    }
  }
  return std::nullopt;
}

bool major_window_contains(const MajorArcLabel& label, const std::vector<Rational>& x, long N,
                           int n) {
  // |x_j - a_j/q| <= L N^-j on the torus, compared as d^(2n) <= N^(1-2nj)
  for (int j = 1; j <= n; ++j) {
    Rational d = x[j - 1] - Rational(label.a[j - 1], label.q);
    d -= floor_ratio(d);  // into [0,1)
    if (d > Rational(1, 2)) d = 1 - d;
    Rational lhs = pow_rat(d, 2 * n);
    Rational rhs = pow_rat(Rational(N), 1 - 2 * n * j);
    if (lhs > rhs) return false;
  }
  return true;
}

MajorArcSet enumerate_major_arcs(long N, int n, long mc_samples, std::uint64_t seed,
                                 double max_labels) {
  const long L = arc_level(N, n);
  BigInt bound = pow_big(BigInt(L), n + 1);
  if (bound > BigInt(static_cast<long long>(max_labels)))
    throw BudgetExceeded("enumerate_major_arcs: L^(n+1) exceeds budget");

  MajorArcSet out;
  const double Lreal = std::pow(static_cast<double>(N), 1.0 / (2.0 * n));
  for (long q = 1; q <= L; ++q) {
    std::vector<long> a(n, 1);
    for (;;) {
      long g = q;
      for (long v : a) g = gcd_long(g, v);
      if (g == 1) {
        MajorArcLabel label;
        label.q = q;
        label.a = a;
        out.labels.push_back(std::move(label));
        double vol = 1;
        for (int j = 1; j <= n; ++j)
          vol *= std::min(2.0 * Lreal * std::pow(static_cast<double>(N), -j), 1.0);
        out.measure_union_bound += vol;
      }
      int d = n - 1;
      while (d >= 0 && ++a[d] == q + 1) a[d--] = 1;
      if (d < 0) break;
    }
  }

  // overlap-corrected estimate: fraction of uniform points classified major
  if (mc_samples > 0) {
    Rng rng(seed);
    long hits = 0;
    TorusPoint x{Vec(n)};
    for (long k = 0; k < mc_samples; ++k) {
      for (int i = 0; i < n; ++i) x.x[i] = rng.next_double();
      if (classify(x, N, n)) ++hits;
    }
    const double p = static_cast<double>(hits) / mc_samples;
    out.measure_mc = p;
    out.measure_mc_stderr = std::sqrt(std::max(p * (1 - p), 1e-30) / mc_samples);
  }
  return out;
}

MinorSupResult minor_sup_estimate(long N, int n, long samples, std::uint64_t seed) {
  if (samples < 1000) throw ValidationError("minor_sup_estimate: need >= 1000 samples");
  Rng rng(seed);
  MinorSupResult r;
  r.samples_total = samples;
  TorusPoint x{Vec(n)};
  for (long k = 0; k < samples; ++k) {
    for (int i = 0; i < n; ++i) x.x[i] = rng.next_double();
    if (classify(x, N, n)) continue;  // rejection sampling against the major arcs
    ++r.samples_kept;
    r.sup_estimate = std::max(r.sup_estimate, std::abs(eval_F(x, N, n)));
  }
  r.acceptance_rate = static_cast<double>(r.samples_kept) / samples;
  return r;
}

MinorSupScan minor_sup_scan(const std::vector<long>& N_list, int n, long samples,
                            std::uint64_t seed) {
  MinorSupScan scan;
  scan.N_values = N_list;
  for (size_t i = 0; i < N_list.size(); ++i)
    scan.per_N.push_back(minor_sup_estimate(N_list[i], n, samples, substream_seed(seed, i)));
  if (N_list.size() >= 2) {
    Eigen::MatrixXd A(N_list.size(), 2);
    Eigen::VectorXd y(N_list.size());
    for (size_t i = 0; i < N_list.size(); ++i) {
      A(i, 0) = std::log(static_cast<double>(N_list[i]));
      A(i, 1) = 1.0;
      y(i) = std::log(scan.per_N[i].sup_estimate);
    }
    scan.fitted_slope = Eigen::Vector2d(A.colPivHouseholderQr().solve(y))(0);
  }
  return scan;
}

}  // namespace vinlab
