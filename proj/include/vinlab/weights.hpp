#pragma once

// Iteration-scheme weight bookkeeping. For degree n and Lebesgue exponent p
// (Delta = p/n) the interpolation weights are
//
//   alpha_j = (Delta - (j+1)) / (Delta - j),        1 <= j <= n-1
//   beta_j  = 2 Delta / ((j+1)(Delta - j + 1)),     2 <= j <= n-1
//
// obtained here both by solving the defining Hoelder relations
//
//   1/(j Delta)    = (1-alpha_j)/(j(j+1)) + alpha_j/((j+1) Delta)
//   1/(j(j+1))     = (1-beta_j)/((j-1)j)  + beta_j/(j Delta)
//
// exactly in rationals and by the closed forms; the two must agree.
//
// The iteration tree: a type-j node (2 <= j <= n-1), processed when the
// ball exponent reaches (j+1)/j times the exponent it was born at, spawns
//
//   type j+1 child         weight alpha_j                 (type n is inert)
//   type k children, k=j..2 weight (1-alpha_j) beta_k prod_{i=k+1..j}(1-beta_i)
//   one pivot leaf          weight (1-alpha_j) prod_{i=2..j}(1-beta_i),
//                           carrying ball exponent b = processing exponent
//
// and the root is a type-1 node born at exponent 1 (so the first pivot leaf
// has b = 2 and weight 1-alpha_1). Children weights sum to 1 at every node.
// The series sum_j b_j gamma_j over pivot leaves, aggregated by generation,
// converges to the root value omega_1 of the weight recursion; the exact
// remainder after any truncation is sum over frontier nodes of
// mass * exponent * F_type, with F the per-type future-contribution values.

#include <string>
#include <vector>

#include "vinlab/rational.hpp"
#include "vinlab/core.hpp"

namespace vinlab {

struct DegenerateExponent : std::domain_error {
  using std::domain_error::domain_error;
};

struct WeightSystem {
  int n = 0;
  Rational p;
  Rational Delta;                // p / n
  std::vector<Rational> alpha;   // alpha_1 .. alpha_{n-1}
  std::vector<Rational> beta;    // beta_2 .. beta_{n-1}

  const Rational& a(int j) const { return alpha.at(j - 1); }
  const Rational& b(int j) const { return beta.at(j - 2); }
};

// Solve the defining relations exactly. Throws DegenerateExponent when a
// relation denominator vanishes.
WeightSystem weights_from_relations(int n, const Rational& p);

// The closed forms, for cross-checking.
WeightSystem weights_closed_form(int n, const Rational& p);

struct GammaB {
  std::vector<Rational> gamma;  // gamma_0 .. gamma_r
  std::vector<Rational> b;      // b_0 .. b_r
};

// n = 3 sequences: gamma_0 = 1-alpha_1, gamma_i = alpha_1(1-alpha_2)(1-beta_2)
// [(1-alpha_2) beta_2]^(i-1), b_i = 2 (3/2)^i.
GammaB gamma_b_n3(const Rational& p, int r);

// ---------------------------------------------------------------------------
// Explicit iteration tree
// ---------------------------------------------------------------------------

struct TreeNode {
  enum class Kind { Pivot, Branch, Inert };  // A_p leaf, live D node, D_p leaf
  Kind kind;
  int type_j = 0;                 // branch/inert type index
  Rational edge_weight;           // weight on the edge from the parent
  Rational path_weight;           // product of edge weights from the root
  Rational born_exponent;         // ball exponent at creation
  Rational ball_exponent;         // pivot: b value; branch: processing exponent
  bool processed = false;         // branches only
  int parent = -1;
  std::vector<int> children;
};

struct IterationTree {
  int n = 0;
  Rational p;
  WeightSystem weights;
  std::vector<TreeNode> nodes;  // nodes[0] is the root
  int processings = 0;

  // pivot-leaf (gamma, b) pairs aggregated by equal ball exponent, ascending
  GammaB gamma_b() const;
  // live branch nodes never processed (the truncation frontier)
  std::vector<int> frontier() const;

  std::string to_text() const;
  std::string to_json() const;
};

// Expand `depth` bifurcations in increasing processing-exponent order
// (ties broken by creation order).
IterationTree build_tree(int n, const Rational& p, int depth, int max_nodes = 2'000'000);

// ---------------------------------------------------------------------------
// Series sum_{generation <= r} b gamma via type-aggregated mass dynamics
// (no explicit tree; cost polynomial in r).
// ---------------------------------------------------------------------------

template <typename Scalar>
struct SeriesResult {
  Scalar sum_b_gamma{};      // partial sum of b_j gamma_j
  Scalar sum_gamma{};        // partial sum of gamma_j (stays < 1)
  Scalar frontier_future{};  // exact remainder: omega_1 - sum_b_gamma
  int generations = 0;
  double geometric_tail_bound = 0;  // crude bound from the dominant branch ratio
};

SeriesResult<double> omega1_series(int n, const Rational& p, int r);
SeriesResult<Rational> omega1_series_exact(int n, const Rational& p, int r);

// Per-type future contribution values F_j (unit mass, unit exponent); the
// root value 2((1-alpha_1) + alpha_1 F_2) equals omega_1 of the recursion.
std::vector<Rational> future_contributions(const WeightSystem& ws);
Rational omega1_from_future(const WeightSystem& ws);

}  // namespace vinlab
