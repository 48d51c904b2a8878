#pragma once

// Major/minor arc decomposition of the torus for the Weyl sum F(x;N).
// With L = N^(1/2n), the major arc M(q,a) for 1 <= q <= L, 1 <= a_j <= q,
// gcd(q, a_1, ..., a_n) = 1 is the set of x with torus distance
// |x_j - a_j/q| <= L N^-j in every coordinate; the minor arcs are the rest.
//
// q ranges over integers with q^(2n) <= N (exact integer test); window
// checks run in doubles for sampling and in exact rationals on request,
// comparing d^(2n) <= N^(1-2nj) so no irrational L is ever formed.

#include <optional>
#include <vector>

#include "vinlab/core.hpp"
#include "vinlab/rng.hpp"

namespace vinlab {

struct MajorArcLabel {
  long q = 1;
  std::vector<long> a;  // 1 <= a_j <= q

  bool operator==(const MajorArcLabel& o) const { return q == o.q && a == o.a; }
};

// floor(N^(1/2n)) via the exact integer test q^(2n) <= N
long arc_level(long N, int n);

// Containing major arc with the smallest q (then lexicographically smallest
// a), or nullopt for minor points. x is torus-reduced first.
std::optional<MajorArcLabel> classify(const TorusPoint& x, long N, int n);

// Exact membership test for rational points.
bool major_window_contains(const MajorArcLabel& label, const std::vector<Rational>& x, long N,
                           int n);

struct MajorArcSet {
  std::vector<MajorArcLabel> labels;
  double measure_union_bound = 0;  // sum of box volumes, no overlap correction
  double measure_mc = 0;           // overlap-corrected Monte-Carlo estimate
  double measure_mc_stderr = 0;
};

MajorArcSet enumerate_major_arcs(long N, int n, long mc_samples = 200000,
                                 std::uint64_t seed = 7, double max_labels = 1e7);

struct MinorSupResult {
  double sup_estimate = 0;
  long samples_kept = 0;     // minor-arc points among the draws
  long samples_total = 0;
  double acceptance_rate = 0;
};

MinorSupResult minor_sup_estimate(long N, int n, long samples, std::uint64_t seed);

struct MinorSupScan {
  std::vector<long> N_values;
  std::vector<MinorSupResult> per_N;
  double fitted_slope = 0;  // slope of log sup vs log N
};

MinorSupScan minor_sup_scan(const std::vector<long>& N_list, int n, long samples,
                            std::uint64_t seed);

}  // namespace vinlab
