#pragma once

// Weyl sums, the moment-curve extension operator, and weighted L^p norms.
//
//   F(x;N)       = sum_{j=1..N} e(x_1 j + x_2 j^2 + ... + x_n j^n)
//   E_J g(x)     = int_J g(t) e(t x_1 + t^2 x_2 + ... + t^n x_n) dt
//   ||f||_{L^p(w_B)}        weighted norm, optionally ball-normalized (sharp)
//
// The torus integral of |F|^{2s} over [0,1]^n is an exact trigonometric
// polynomial average: a product grid with M_i >= 2 s N^i + 1 points per
// coordinate reproduces J_{s,n}(N) exactly, and the grid phases are reduced
// in integer arithmetic so no precision is lost.
//
// Norm quadrature: for n = 2 a tensor midpoint grid sized from the field
// bandwidth (p/2 cycles per unit per coordinate plus a margin for the
// spectrum of w_B), with the extension fields accumulated as rank-1 outer
// products over Gauss-Legendre t-nodes. For n >= 3, importance sampling
// from the weight's exact radial law. Both report a truncation bound and a
// self-estimated quadrature error.

#include <functional>

#include "vinlab/core.hpp"
#include "vinlab/rng.hpp"

namespace vinlab {

struct QuadratureConfig {
  double panels_per_oscillation = 8.0;  // pointwise extension evaluation
  int nodes_per_panel = 8;              // Gauss-Legendre nodes per panel
  long mc_samples = 100000;
  std::uint64_t seed = 1;
  long max_panels = 50'000'000;  // budget guard for oscillatory paneling
  double density = 1.0;          // scales grid rates and t-nodes (doubling checks)
  double rate_margin = 2.0;      // extra cycles/unit beyond the field bandwidth
  long max_grid_points = 400'000'000;  // guard for tensor grids
};

struct NormResult {
  double value = 0;
  double truncation_bound = 0;         // norm mass possibly lost beyond the region
  double quadrature_estimate_error = 0;  // |I_h - I_2h| propagated through ^(1/p)
};

// ---------------------------------------------------------------------------

Complex eval_F(const TorusPoint& x, long N, int n);

// Requires J to be a union of whole grid cells of g.
Complex eval_extension(const StepFunction& g, const Interval& J, const Vec& x,
                       const QuadratureConfig& cfg = {});

// phase-derivative bound sum_i i |x_i|, in oscillations per unit t
double phase_oscillation_bound(const Vec& x);

// Generic weighted norm of a pointwise-evaluable field. `bandwidth` is the
// field's max frequency in cycles per coordinate unit (1 for extension
// fields, used to size the tensor grid); `sup_bound` bounds |f| for the
// truncation report. Dispatches to the tensor grid for n <= 2 and to
// weight-importance Monte Carlo for n >= 3.
NormResult weighted_norm(const std::function<Complex(const Vec&)>& f, const Ball& ball,
                         double p, const WeightProfile& profile, const QuadratureConfig& cfg,
                         bool sharp_normalized = true, double bandwidth = 1.0,
                         double sup_bound = 1.0);

// Exact J via the minimal exact product grid (practical for n = 2, small s, N).
BigInt torus_integral_power(const Instance& inst, std::uint64_t max_points = 200'000'000);

struct MomentEstimate {
  double estimate = 0;
  double standard_error = 0;
};

MomentEstimate moment_monte_carlo(const Instance& inst, const QuadratureConfig& cfg);

// ---------------------------------------------------------------------------
// Batched extension-field norms on one ball: per-interval norms of E_J g for
// every J in `pieces` plus the norm of E_{union} g, for each exponent in
// p_list, sharing a single field grid (n = 2) or sample set (n = 3).
// This is the workhorse behind the decoupling experiments.
// ---------------------------------------------------------------------------

struct ExtensionNorms {
  std::vector<std::vector<NormResult>> per_piece;  // [piece][p index]
  std::vector<NormResult> total;                   // [p index]
};

ExtensionNorms extension_norms(const StepFunction& g, const std::vector<Interval>& pieces,
                               int n, const Ball& ball, const WeightProfile& profile,
                               const std::vector<double>& p_list, const QuadratureConfig& cfg,
                               bool sharp_normalized = true);

// Effective integration radius (as a multiple of R): the profile's
// truncation factor, shrunk to where the omitted weight mass is provably
// below `tail_target` of the total.
double effective_truncation_factor(int n, const WeightProfile& profile, double tail_target = 1e-15);

std::pair<std::vector<double>, std::vector<double>> gauss_legendre(int m);  // nodes, weights on [-1,1]

}  // namespace vinlab
