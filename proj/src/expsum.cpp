#include "vinlab/expsum.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numeric>

namespace vinlab {

// ---------------------------------------------------------------------------
// Gauss-Legendre nodes/weights (Newton on the Legendre recurrence)
// ---------------------------------------------------------------------------

std::pair<std::vector<double>, std::vector<double>> gauss_legendre(int m) {
  static std::map<int, std::pair<std::vector<double>, std::vector<double>>> cache;
  static std::mutex mu;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(m);
  if (it != cache.end()) return it->second;

  std::vector<double> x(m), w(m);
  for (int i = 0; i < m; ++i) {
    // Chebyshev-like initial guess
    double t = std::cos(M_PI * (i + 0.75) / (m + 0.5));
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = t;
      if (m == 1) { p1 = t; }
      for (int k = 2; k <= m; ++k) {
        double p2 = ((2 * k - 1) * t * p1 - (k - 1) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      double dp = m * (t * p1 - p0) / (t * t - 1.0);
      double dt = p1 / dp;
      t -= dt;
      if (std::abs(dt) < 1e-15) break;
    }
    double p0 = 1.0, p1 = t;
    for (int k = 2; k <= m; ++k) {
      double p2 = ((2 * k - 1) * t * p1 - (k - 1) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    double dp = m * (t * p1 - p0) / (t * t - 1.0);
    x[i] = t;
    w[i] = 2.0 / ((1.0 - t * t) * dp * dp);
  }
  cache[m] = {x, w};
  return cache[m];
}

// ---------------------------------------------------------------------------
// Weyl sum
// ---------------------------------------------------------------------------

Complex eval_F(const TorusPoint& x, long N, int n) {
  if (N < 1) throw ValidationError("eval_F: N >= 1");
  if (x.x.size() != n) throw ValidationError("eval_F: dimension mismatch");
  Complex sum(0, 0);
  for (long j = 1; j <= N; ++j) {
    // Horner in j: phase = j (x1 + j (x2 + ... + j xn))
    double phase = x.x[n - 1];
    for (int i = n - 2; i >= 0; --i) phase = phase * j + x.x[i];
    phase *= j;
    sum += e_of(phase);
  }
  return sum;
}

double phase_oscillation_bound(const Vec& x) {
  double b = 0;
  for (int i = 0; i < x.size(); ++i) b += (i + 1) * std::abs(x[i]);
  return b;
}

// ---------------------------------------------------------------------------
// Extension operator, pointwise
// ---------------------------------------------------------------------------

namespace {

struct CellRange {
  int first;
  int last;  // inclusive cell indices
};

CellRange aligned_cells(const StepFunction& g, const Interval& J) {
  const int m = g.cells();
  double lo = J.lo * m, hi = J.hi * m;
  double rlo = std::round(lo), rhi = std::round(hi);
  if (std::abs(lo - rlo) > 1e-9 * m || std::abs(hi - rhi) > 1e-9 * m)
    throw ValidationError("interval is not a union of whole grid cells");
  int a = static_cast<int>(rlo), b = static_cast<int>(rhi);
  if (a < 0 || b > m || a >= b) throw ValidationError("interval out of range");
  return CellRange{a, b - 1};
}

double curve_phase(double t, const Vec& x) {
  // t x1 + t^2 x2 + ... + t^n xn, Horner from the top
  double p = 0;
  for (int i = static_cast<int>(x.size()) - 1; i >= 0; --i) p = (p + x[i]) * t;
  return p;
}

}  // namespace

Complex eval_extension(const StepFunction& g, const Interval& J, const Vec& x,
                       const QuadratureConfig& cfg) {
  const auto cells = aligned_cells(g, J);
  const double delta = g.delta();
  const double osc = phase_oscillation_bound(x);  // cycles per unit t
  const long panels_per_cell =
      std::max<long>(1, static_cast<long>(std::ceil(cfg.panels_per_oscillation * osc * delta)));
  const long total_panels = panels_per_cell * (cells.last - cells.first + 1);
  if (total_panels > cfg.max_panels)
    throw QuadratureBudgetExceeded("eval_extension: panel budget exceeded");

  const auto [nodes, weights] = gauss_legendre(cfg.nodes_per_panel);
  Complex sum(0, 0);
  for (int c = cells.first; c <= cells.last; ++c) {
    const Complex gc = g.coeffs[c];
    if (gc == Complex(0, 0)) continue;
    const double cell_lo = c * delta;
    const double hw = delta / (2.0 * panels_per_cell);
    for (long p = 0; p < panels_per_cell; ++p) {
      const double mid = cell_lo + (2 * p + 1) * hw;
      Complex acc(0, 0);
      for (int q = 0; q < cfg.nodes_per_panel; ++q)
        acc += weights[q] * e_of(curve_phase(mid + hw * nodes[q], x));
      sum += gc * hw * acc;
    }
  }
  return sum;
}

// ---------------------------------------------------------------------------
// Effective truncation
// ---------------------------------------------------------------------------

double effective_truncation_factor(int n, const WeightProfile& profile, double tail_target) {
  double hi = profile.truncation_factor;
  if (weight_tail_fraction(n, profile.exponent, hi) > tail_target) return hi;
  double lo = 0.0;
  for (int it = 0; it < 200; ++it) {
    double mid = 0.5 * (lo + hi);
    if (mid <= 0) break;
    if (weight_tail_fraction(n, profile.exponent, mid) > tail_target)
      lo = mid;
    else
      hi = mid;
    if (hi - lo < 1e-3 * hi) break;
  }
  return hi;
}

// ---------------------------------------------------------------------------
// Tensor-grid engine (n = 2)
// ---------------------------------------------------------------------------

namespace {

struct Axis {
  double lo = 0, h = 0;
  int count = 0;
  double node(int k) const { return lo + (k + 0.5) * h; }
};

Axis make_axis(double center, double half, double rate) {
  Axis a;
  a.count = std::max(8, static_cast<int>(std::ceil(2.0 * half * rate)));
  a.h = 2.0 * half / a.count;
  a.lo = center - half;
  return a;
}

double sampling_rate(double p_max, double exponent, double radius, const QuadratureConfig& cfg) {
  // field bandwidth p/2 cycles/unit per coordinate, plus enough margin that
  // the weight's spectrum (width ~ E/(2 pi R), kink tails ~ xi^-3) aliases
  // below ~1e-5
  const double w_margin = 46.0 * exponent / (2.0 * M_PI * radius);
  return (p_max / 2.0 + std::max(cfg.rate_margin, w_margin)) * cfg.density;
}

// e(t * x_k) along an axis, incremental rotation resynced every 128 steps
void phase_vector(double t, const Axis& ax, CVec& out) {
  out.resize(ax.count);
  const Complex step = e_of(t * ax.h);
  Complex cur = e_of(t * ax.node(0));
  for (int k = 0; k < ax.count; ++k) {
    if ((k & 127) == 0) cur = e_of(t * ax.node(k));
    out[k] = cur;
    cur *= step;
  }
}

// |z|^p * w summed over the grid; even p uses integer powers of |z|^2.
struct NormAccum {
  long double full = 0.0L;
  long double half = 0.0L;  // odd-odd subgrid, weight x4
};

void accumulate_norms(const Eigen::ArrayXXcd& field, const Eigen::ArrayXXd& wgrid,
                      const std::vector<double>& p_list, std::vector<NormAccum>& acc) {
  const int cols = static_cast<int>(field.cols());
  Eigen::ArrayXd a2, term;
  for (int a = 0; a < cols; ++a) {
    a2 = field.col(a).abs2();
    for (size_t pi = 0; pi < p_list.size(); ++pi) {
      const double p = p_list[pi];
      const long ip = std::lround(p / 2.0);
      if (std::abs(p - 2.0 * ip) < 1e-12) {
        switch (ip) {
          case 1: term = a2; break;
          case 2: term = a2 * a2; break;
          case 3: term = a2 * a2 * a2; break;
          case 6: term = (a2 * a2 * a2); term = term * term; break;
          default: term = a2.pow(static_cast<double>(ip));
        }
      } else {
        term = a2.pow(p / 2.0);
      }
      term *= wgrid.col(a);
      long double s = 0.0L;
      for (int b = 0; b < term.size(); ++b) s += term[b];
      acc[pi].full += s;
      if (a & 1) {
        long double sh = 0.0L;
        for (int b = 1; b < term.size(); b += 2) sh += term[b];
        acc[pi].half += 4.0L * sh;
      }
    }
  }
}

struct EngineContext {
  Axis ax1, ax2;
  Eigen::ArrayXXd wgrid;         // (ax2.count, ax1.count)
  double cell_area = 0;
  double denom = 1;              // |B| if sharp
  double trunc_factor_used = 0;
  double bph = 0;                // phase oscillation bound over the grid
};

EngineContext make_context(int n, const Ball& ball, const WeightProfile& profile,
                           double p_max, const QuadratureConfig& cfg, bool sharp) {
  profile.validate(n);
  if (n != 2) throw ValidationError("tensor engine: n == 2 only");
  EngineContext ctx;
  ctx.trunc_factor_used = effective_truncation_factor(n, profile);
  const double half = ctx.trunc_factor_used * ball.radius;
  const double rate = sampling_rate(p_max, profile.exponent, ball.radius, cfg);
  ctx.ax1 = make_axis(ball.center[0], half, rate);
  ctx.ax2 = make_axis(ball.center[1], half, rate);
  if (static_cast<long>(ctx.ax1.count) * ctx.ax2.count > cfg.max_grid_points)
    throw QuadratureBudgetExceeded("tensor engine: grid budget exceeded");
  ctx.cell_area = ctx.ax1.h * ctx.ax2.h;
  ctx.denom = sharp ? ball_volume(n, ball.radius) : 1.0;

  ctx.wgrid.resize(ctx.ax2.count, ctx.ax1.count);
  const double E = profile.exponent, R = ball.radius;
  for (int a = 0; a < ctx.ax1.count; ++a) {
    const double dx1 = ctx.ax1.node(a) - ball.center[0];
    for (int b = 0; b < ctx.ax2.count; ++b) {
      const double dx2 = ctx.ax2.node(b) - ball.center[1];
      ctx.wgrid(b, a) = std::exp(-E * std::log1p(std::hypot(dx1, dx2) / R));
    }
  }
  const double m1 = std::max(std::abs(ctx.ax1.lo), std::abs(ctx.ax1.lo + 2 * half));
  const double m2 = std::max(std::abs(ctx.ax2.lo), std::abs(ctx.ax2.lo + 2 * half));
  ctx.bph = m1 + 2.0 * m2;
  return ctx;
}

// Accumulate the extension field of the given cells onto the grid via
// batched rank-1 updates (complex GEMM).
void accumulate_field(const StepFunction& g, int cell_first, int cell_last,
                      const EngineContext& ctx, const QuadratureConfig& cfg,
                      Eigen::ArrayXXcd& field) {
  const double delta = g.delta();
  const long panels_per_cell = std::max<long>(
      1, static_cast<long>(std::ceil(cfg.panels_per_oscillation * ctx.bph * delta * cfg.density)));
  const long total_panels = panels_per_cell * (cell_last - cell_first + 1);
  if (total_panels > cfg.max_panels)
    throw QuadratureBudgetExceeded("tensor engine: panel budget exceeded");
  const auto [nodes, weights] = gauss_legendre(cfg.nodes_per_panel);
  const int m = cfg.nodes_per_panel;

  const int batch = std::max<int>(1, 64 / m) * m;  // GEMM inner dimension
  Eigen::MatrixXcd A(ctx.ax1.count, batch), B(ctx.ax2.count, batch);
  int filled = 0;
  CVec va, vb;

  auto flush = [&]() {
    if (filled == 0) return;
    field.matrix().noalias() += B.leftCols(filled) * A.leftCols(filled).transpose();
    filled = 0;
  };

  for (int c = cell_first; c <= cell_last; ++c) {
    const Complex gc = g.coeffs[c];
    if (gc == Complex(0, 0)) continue;
    const double cell_lo = c * delta;
    const double hw = delta / (2.0 * panels_per_cell);
    for (long pl = 0; pl < panels_per_cell; ++pl) {
      const double mid = cell_lo + (2 * pl + 1) * hw;
      for (int q = 0; q < m; ++q) {
        const double t = mid + hw * nodes[q];
        const Complex wq = gc * hw * weights[q];
        phase_vector(t, ctx.ax1, va);
        phase_vector(t * t, ctx.ax2, vb);
        A.col(filled) = va.matrix() * wq;
        B.col(filled) = vb.matrix();
        if (++filled == batch) flush();
      }
    }
  }
  flush();
}

NormResult finish_norm(const NormAccum& acc, double p, const EngineContext& ctx, int n,
                       const WeightProfile& profile, const Ball& ball, double sup_bound) {
  NormResult r;
  const long double full = acc.full * ctx.cell_area / ctx.denom;
  const long double half = acc.half * ctx.cell_area / ctx.denom;
  r.value = static_cast<double>(std::pow(full, 1.0L / p));
  const double halfv = static_cast<double>(std::pow(std::max(half, 0.0L), 1.0L / p));
  r.quadrature_estimate_error = std::abs(r.value - halfv);
  const double tail_mass =
      weight_mass_within(n, profile.exponent, profile.truncation_factor, ball.radius) -
      weight_mass_within(n, profile.exponent, ctx.trunc_factor_used, ball.radius);
  r.truncation_bound =
      std::pow(std::pow(sup_bound, p) * std::max(tail_mass, 0.0) / ctx.denom, 1.0 / p);
  return r;
}

}  // namespace

// ---------------------------------------------------------------------------
// Monte-Carlo norm path (n >= 3): sample |x - c| from the exact radial law
// ---------------------------------------------------------------------------

namespace {

// radius u in units of R, density ~ u^(n-1)(1+u)^-E on [0, a]
double sample_radius(int n, int E, double a, double cdf_target) {
  const double t0 = weight_radial_tail(n, E, 0.0);
  const double ta = weight_radial_tail(n, E, a);
  const double want = t0 - cdf_target * (t0 - ta);
  double lo = 0, hi = a;
  for (int it = 0; it < 80; ++it) {
    double mid = 0.5 * (lo + hi);
    if (weight_radial_tail(n, E, mid) > want)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

Vec sample_direction(int n, Rng& rng) {
  Vec v(n);
  for (int i = 0; i < n; i += 2) {
    double u1 = std::max(rng.next_double(), 1e-300), u2 = rng.next_double();
    double r = std::sqrt(-2.0 * std::log(u1));
    v[i] = r * std::cos(2 * M_PI * u2);
    if (i + 1 < n) v[i + 1] = r * std::sin(2 * M_PI * u2);
  }
  double nn = v.norm();
  return nn == 0 ? Vec::Unit(n, 0) : Vec(v / nn);
}

struct McNorm {
  long double sum = 0, sumsq = 0;
};

NormResult finish_mc(const McNorm& acc, long samples, double p, double mass, double denom,
                     double tail_norm_bound) {
  NormResult r;
  const long double mean = acc.sum / samples;
  const long double var = std::max(0.0L, acc.sumsq / samples - mean * mean);
  const long double se = std::sqrt(var / samples);
  const long double integral = mean * mass / denom;
  r.value = static_cast<double>(std::pow(std::max(integral, 0.0L), 1.0L / p));
  // delta method through the 1/p power
  const long double ierr = se * mass / denom;
  r.quadrature_estimate_error =
      (integral > 0) ? static_cast<double>(r.value * ierr / (p * integral)) : 0.0;
  r.truncation_bound = tail_norm_bound;
  return r;
}

}  // namespace

NormResult weighted_norm(const std::function<Complex(const Vec&)>& f, const Ball& ball, double p,
                         const WeightProfile& profile, const QuadratureConfig& cfg,
                         bool sharp_normalized, double bandwidth, double sup_bound) {
  const int n = ball.dim();
  profile.validate(n);
  if (p < 1) throw ValidationError("weighted_norm: p >= 1");
  const double denom = sharp_normalized ? ball_volume(n, ball.radius) : 1.0;
  const double a = effective_truncation_factor(n, profile);
  const double tail_mass =
      weight_mass_within(n, profile.exponent, profile.truncation_factor, ball.radius) -
      weight_mass_within(n, profile.exponent, a, ball.radius);
  const double tail_norm_bound =
      std::pow(std::pow(sup_bound, p) * std::max(tail_mass, 0.0) / denom, 1.0 / p);

  if (n <= 2) {
    // midpoint tensor grid sized from the declared bandwidth
    const double rate = (bandwidth * p / 2.0 +
                         std::max(cfg.rate_margin, 46.0 * profile.exponent /
                                                       (2.0 * M_PI * ball.radius))) *
                        cfg.density;
    std::vector<Axis> axes;
    long points = 1;
    for (int d = 0; d < n; ++d) {
      axes.push_back(make_axis(ball.center[d], a * ball.radius, rate));
      points *= axes.back().count;
    }
    if (points > cfg.max_grid_points)
      throw QuadratureBudgetExceeded("weighted_norm: grid budget exceeded");
    long double full = 0.0L, half = 0.0L;
    Vec x(n);
    std::vector<int> idx(n, 0);
    double cell = 1;
    for (const auto& ax : axes) cell *= ax.h;
    for (;;) {
      bool oddall = true;
      for (int d = 0; d < n; ++d) {
        x[d] = axes[d].node(idx[d]);
        oddall = oddall && (idx[d] & 1);
      }
      const double w = weight_eval(ball, profile, x);
      const double term = std::pow(std::abs(f(x)), p) * w;
      full += term;
      if (oddall) half += std::pow(2.0, n) * term;
      int d = n - 1;
      while (d >= 0 && ++idx[d] == axes[d].count) idx[d--] = 0;
      if (d < 0) break;
    }
    NormResult r;
    r.value = static_cast<double>(std::pow(full * cell / denom, 1.0L / p));
    const double hv = static_cast<double>(std::pow(std::max(half, 0.0L) * cell / denom, 1.0L / p));
    r.quadrature_estimate_error = std::abs(r.value - hv);
    r.truncation_bound = tail_norm_bound;
    return r;
  }

  // n >= 3: importance sampling from the weight
  const long samples = std::max<long>(100, static_cast<long>(cfg.mc_samples * cfg.density));
  const double mass = weight_mass_within(n, profile.exponent, a, ball.radius);
  Rng rng(cfg.seed);
  McNorm acc;
  for (long k = 0; k < samples; ++k) {
    const double u = sample_radius(n, profile.exponent, a, rng.next_double());
    const Vec x = ball.center + ball.radius * u * sample_direction(n, rng);
    const long double v = std::pow(std::abs(f(x)), p);
    acc.sum += v;
    acc.sumsq += v * v;
  }
  return finish_mc(acc, samples, p, mass, denom, tail_norm_bound);
}

// ---------------------------------------------------------------------------
// Batched extension norms
// ---------------------------------------------------------------------------

ExtensionNorms extension_norms(const StepFunction& g, const std::vector<Interval>& pieces, int n,
                               const Ball& ball, const WeightProfile& profile,
                               const std::vector<double>& p_list, const QuadratureConfig& cfg,
                               bool sharp_normalized) {
  if (ball.dim() != n) throw ValidationError("extension_norms: ball dimension mismatch");
  double p_max = 2;
  for (double p : p_list) p_max = std::max(p_max, p);

  ExtensionNorms out;
  out.per_piece.resize(pieces.size());

  if (n == 2) {
    EngineContext ctx = make_context(n, ball, profile, p_max, cfg, sharp_normalized);
    Eigen::ArrayXXcd total = Eigen::ArrayXXcd::Zero(ctx.ax2.count, ctx.ax1.count);
    Eigen::ArrayXXcd cur(ctx.ax2.count, ctx.ax1.count);
    for (size_t j = 0; j < pieces.size(); ++j) {
      const auto cells = aligned_cells(g, pieces[j]);
      cur.setZero();
      accumulate_field(g, cells.first, cells.last, ctx, cfg, cur);
      std::vector<NormAccum> acc(p_list.size());
      accumulate_norms(cur, ctx.wgrid, p_list, acc);
      const double sup = pieces[j].length() * g.max_abs();
      for (size_t pi = 0; pi < p_list.size(); ++pi)
        out.per_piece[j].push_back(finish_norm(acc[pi], p_list[pi], ctx, n, profile, ball, sup));
      total += cur;
    }
    std::vector<NormAccum> acc(p_list.size());
    accumulate_norms(total, ctx.wgrid, p_list, acc);
    double sup_total = 0;
    for (const auto& J : pieces) sup_total += J.length() * g.max_abs();
    for (size_t pi = 0; pi < p_list.size(); ++pi)
      out.total.push_back(finish_norm(acc[pi], p_list[pi], ctx, n, profile, ball, sup_total));
    return out;
  }

  // n >= 3: one deterministic sample set shared by all pieces
  profile.validate(n);
  const double a = effective_truncation_factor(n, profile);
  const double mass = weight_mass_within(n, profile.exponent, a, ball.radius);
  const double denom = sharp_normalized ? ball_volume(n, ball.radius) : 1.0;
  const double tail_mass =
      weight_mass_within(n, profile.exponent, profile.truncation_factor, ball.radius) -
      weight_mass_within(n, profile.exponent, a, ball.radius);
  const long samples = std::max<long>(100, static_cast<long>(cfg.mc_samples * cfg.density));
  Rng rng(cfg.seed);

  std::vector<std::vector<McNorm>> acc(pieces.size() + 1,
                                       std::vector<McNorm>(p_list.size()));
  for (long k = 0; k < samples; ++k) {
    const double u = sample_radius(n, profile.exponent, a, rng.next_double());
    const Vec x = ball.center + ball.radius * u * sample_direction(n, rng);
    Complex total(0, 0);
    for (size_t j = 0; j < pieces.size(); ++j) {
      const Complex v = eval_extension(g, pieces[j], x, cfg);
      total += v;
      for (size_t pi = 0; pi < p_list.size(); ++pi) {
        const long double t = std::pow(std::abs(v), p_list[pi]);
        acc[j][pi].sum += t;
        acc[j][pi].sumsq += t * t;
      }
    }
    for (size_t pi = 0; pi < p_list.size(); ++pi) {
      const long double t = std::pow(std::abs(total), p_list[pi]);
      acc[pieces.size()][pi].sum += t;
      acc[pieces.size()][pi].sumsq += t * t;
    }
  }
  for (size_t j = 0; j < pieces.size(); ++j) {
    const double sup = pieces[j].length() * g.max_abs();
    for (size_t pi = 0; pi < p_list.size(); ++pi) {
      const double tb = std::pow(std::pow(sup, p_list[pi]) * std::max(tail_mass, 0.0) / denom,
                                 1.0 / p_list[pi]);
      out.per_piece[j].push_back(finish_mc(acc[j][pi], samples, p_list[pi], mass, denom, tb));
    }
  }
  double sup_total = 0;
  for (const auto& J : pieces) sup_total += J.length() * g.max_abs();
  for (size_t pi = 0; pi < p_list.size(); ++pi) {
    const double tb = std::pow(std::pow(sup_total, p_list[pi]) * std::max(tail_mass, 0.0) / denom,
                               1.0 / p_list[pi]);
    out.total.push_back(finish_mc(acc[pieces.size()][pi], samples, p_list[pi], mass, denom, tb));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Exact torus quadrature
// ---------------------------------------------------------------------------

BigInt torus_integral_power(const Instance& inst, std::uint64_t max_points) {
  const int n = inst.n, s = inst.s;
  const long N = inst.N;

  // minimal exact grid: |F|^(2s) has coordinate-i degree <= 2 s N^i
  std::vector<std::uint64_t> M(n);
  BigInt points = 1;
  for (int i = 1; i <= n; ++i) {
    BigInt Mi = 2 * BigInt(s) * pow_big(BigInt(N), i) + 1;
    if (Mi * Mi > (BigInt(1) << 62))
      throw BudgetExceeded("torus_integral_power: modulus exceeds integer range");
    M[i - 1] = Mi.convert_to<std::uint64_t>();
    points *= Mi;
  }
  if (points > BigInt(max_points))
    throw BudgetExceeded("torus_integral_power: grid exceeds point budget");

  // phase residues j^i mod M_i — exact integer reduction
  std::vector<std::vector<std::uint64_t>> res(n, std::vector<std::uint64_t>(N + 1));
  for (int i = 1; i <= n; ++i)
    for (long j = 1; j <= N; ++j) {
      std::uint64_t r = 1;
      for (int k = 0; k < i; ++k) r = (r * static_cast<std::uint64_t>(j)) % M[i - 1];
      res[i - 1][j] = r;
    }

  std::vector<std::uint64_t> k(n, 0);
  long double acc = 0.0L, comp = 0.0L;  // Kahan
  for (;;) {
    double re = 0, im = 0;
    for (long j = 1; j <= N; ++j) {
      double phase = 0;
      for (int i = 0; i < n; ++i) phase += static_cast<double>((k[i] * res[i][j]) % M[i]) / M[i];
      const double a = 2.0 * M_PI * (phase - std::floor(phase));
      re += std::cos(a);
      im += std::sin(a);
    }
    long double t = re * re + im * im;
    long double powv = 1.0L;
    for (int q = 0; q < s; ++q) powv *= t;
    const long double y = powv - comp;
    const long double tt = acc + y;
    comp = (tt - acc) - y;
    acc = tt;

    int d = n - 1;
    while (d >= 0 && ++k[d] == M[d]) k[d--] = 0;
    if (d < 0) break;
  }
  const long double avg = acc / points.convert_to<long double>();
  const long double rounded = std::roundl(avg);
  if (std::abs(static_cast<double>(avg - rounded)) > 1e-6)
    throw NonIntegerResult("torus_integral_power: average not within 1e-6 of an integer");
  return BigInt(static_cast<long long>(rounded));
}

MomentEstimate moment_monte_carlo(const Instance& inst, const QuadratureConfig& cfg) {
  if (cfg.mc_samples < 100) throw ValidationError("moment_monte_carlo: need >= 100 samples");
  Rng rng(cfg.seed);
  long double sum = 0, sumsq = 0;
  TorusPoint x{Vec(inst.n)};
  for (long k = 0; k < cfg.mc_samples; ++k) {
    for (int i = 0; i < inst.n; ++i) x.x[i] = rng.next_double();
    const double a2 = std::norm(eval_F(x, inst.N, inst.n));
    long double v = 1.0L;
    for (int q = 0; q < inst.s; ++q) v *= a2;
    sum += v;
    sumsq += v * v;
  }
  MomentEstimate est;
  const long double mean = sum / cfg.mc_samples;
  const long double var = std::max(0.0L, sumsq / cfg.mc_samples - mean * mean);
  est.estimate = static_cast<double>(mean);
  est.standard_error = static_cast<double>(std::sqrt(var / cfg.mc_samples));
  return est;
}

}  // namespace vinlab
