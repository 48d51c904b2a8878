#pragma once

// Empirical LHS/RHS ratio experiments for the decoupling-type inequalities,
// at desk scale. Every reported ratio is a certified lower bound on the
// corresponding best constant, up to the quadrature error reported with it;
// the experiments never claim to compute a sup over all inputs.
//
//   main decoupling     ||E_{[0,1]} g||_{L^p(w_B)} vs l2 sum over delta-intervals,
//                       ball radius delta^-n
//   L^2 orthogonality   p = 2, ball radius R = 1/delta, pieces of length 1/R
//   lower dimensional   n = 3 arcs of length sigma on balls of radius ~sigma^-2,
//                       pieces of length R^-1/2
//   discrete restriction modulated wave sums vs l2 coefficients
//   ball inflation      bilinear piece sums averaged over a cover by smaller balls
//
// Trial families default to {g == 1} plus random unimodular-coefficient step
// functions (constants generate the supercritical growth term, so they are
// always included).

#include <optional>
#include <string>
#include <vector>

#include "vinlab/core.hpp"
#include "vinlab/expsum.hpp"

namespace vinlab {

// engine-tuned quadrature defaults for the ratio experiments (pointwise
// evaluation keeps the heavier QuadratureConfig defaults)
QuadratureConfig experiment_config(std::uint64_t seed);

StepFunction random_unimodular_step(int cells, std::uint64_t seed);

struct RatioResult {
  double ratio = 0;
  double lhs = 0;
  double rhs = 0;
  double quadrature_rel_error = 0;  // max relative self-estimate among the norms
  double truncation_bound = 0;
};

// ||E_{[0,1]} g|| / (sum_J ||E_J g||^2)^(1/2) on the given ball, pieces of
// length delta = 1/g.cells().
RatioResult decoupling_ratio(int n, double p, const StepFunction& g, const Ball& ball,
                             const WeightProfile& profile, const QuadratureConfig& cfg);

struct VpScanPoint {
  int inv_delta = 0;
  double max_ratio = 0;
  int max_trial = -1;
  bool converged = false;      // < 5% shift when quadrature density doubles
  double doubling_shift = 0;
  std::vector<double> trial_ratios;
};

struct VpScan {
  double eta_hat = 0;  // fitted growth exponent: -slope of log max-ratio vs log delta
  bool all_converged = true;
  std::vector<VpScanPoint> points;
};

VpScan vp_scan(int n, double p, const std::vector<int>& inv_deltas, int trials,
               std::uint64_t seed, const QuadratureConfig& cfg,
               const std::optional<WeightProfile>& profile = std::nullopt);

// squared-norm ratio ||E_{[0,1]}g||^2_{L^2(w_B)} / sum_{|piece|=1/R} ||E_piece g||^2,
// R = 1/delta
RatioResult l2_orthogonality_ratio(int n, const StepFunction& g, const QuadratureConfig& cfg,
                                   const std::optional<WeightProfile>& profile = std::nullopt);

// n = 3 arc [t0, t0+sigma], pieces of length R^(-1/2), sharp-normalized norms
RatioResult lower_dim_ratio(double t0, double sigma, double R, double p, const StepFunction& g,
                            const QuadratureConfig& cfg);

// LHS = ||sum_i a_i e(x . (t_i,...,t_i^n))||_{L^p_sharp(w_{B_R})},
// ratio = LHS / (||a||_2 (1 + N^((1 - n(n+1)/p)/2))); Monte-Carlo norms.
RatioResult discrete_restriction_ratio(int n, double p, int N, const std::vector<Complex>& a,
                                       const std::vector<double>& t, double R,
                                       const QuadratureConfig& cfg);

// n = 2, k = 1, M = 2: intervals I_1, I_2 of length 1/K separated by 1/K,
// pieces of length rho; LHS averages the bilinear piece expression over a
// cover of B(0, rho^-2) by balls of radius rho^-1 on an axis-aligned grid
// (overlap <= 2^n), RHS evaluates it on B itself.
RatioResult ball_inflation_ratio(double p, int inv_rho, int K, const StepFunction& g,
                                 const QuadratureConfig& cfg);

}  // namespace vinlab
