// vinlab — command-line laboratory for Vinogradov-system counting,
// exponential-sum numerics, arc decompositions, iteration-weight bookkeeping
// and decoupling-ratio experiments.
//
// Exit codes: 0 success, 2 budget exceeded, 3 validation error, 64 usage.
// Every run can persist an ExperimentRecord (JSON) whose `results` field is
// byte-reproducible for identical (subcommand, params, seed).

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cstdlib>
#include <iostream>

#include "vinlab/appendix.hpp"
#include "vinlab/arcs.hpp"
#include "vinlab/counting.hpp"
#include "vinlab/decouple.hpp"
#include "vinlab/expsum.hpp"
#include "vinlab/record.hpp"
#include "vinlab/weights.hpp"

using nlohmann::ordered_json;
using namespace vinlab;

namespace {

struct OutputOptions {
  std::string out;      // single-record JSON path
  std::string append;   // JSONL log path
  std::string csv;      // module-specific CSV emission
  bool quiet = false;
};

void add_output_flags(CLI::App* cmd, OutputOptions& out) {
  cmd->add_option("--out", out.out, "write the record to this JSON file (atomic)");
  cmd->add_option("--append", out.append, "append the record to this JSONL log");
  cmd->add_option("--csv", out.csv, "emit a module-specific CSV next to the record");
  cmd->add_flag("--quiet", out.quiet, "suppress stdout record dump");
}

CountBudget budget_from_env() {
  CountBudget b;
  const char* prof = std::getenv("VINLAB_BUDGET");
  if (!prof) return b;
  const std::string p(prof);
  if (p == "strict") {
    b.max_naive_tuples = 1e7;
    b.max_tuples = 1e8;
    b.max_bytes = 200'000'000;
  } else if (p == "wide") {
    b.max_naive_tuples = 4e9;
    b.max_tuples = 4e10;
    b.max_bytes = 6'000'000'000ULL;
  }
  return b;
}

Rational parse_rational_or_die(const std::string& s, const std::string& what) {
  auto q = parse_rational(s);
  if (!q) throw ValidationError(what + ": cannot parse rational '" + s + "'");
  return *q;
}

int finish(const std::string& subcommand, const ordered_json& params, const ordered_json& results,
           const ordered_json& convergence, double runtime, const OutputOptions& out) {
  ExperimentRecord rec;
  rec.timestamp = now_iso8601_utc();
  rec.subcommand = subcommand;
  rec.params = params;
  rec.results = results;
  rec.convergence = convergence;
  rec.runtime_seconds = runtime;
  if (!out.out.empty()) write_record(out.out, rec);
  if (!out.append.empty()) append_record_jsonl(out.append, rec);
  if (!out.quiet) std::cout << rec.to_json().dump(2) << std::endl;
  return 0;
}

std::vector<long> parse_long_list(const std::string& s) {
  std::vector<long> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(std::stol(item));
  return out;
}

std::vector<int> parse_int_list(const std::string& s) {
  std::vector<int> out;
  for (long v : parse_long_list(s)) out.push_back(static_cast<int>(v));
  return out;
}

struct Timer {
  std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"vinlab — exponential-sum and decoupling laboratory"};
  app.require_subcommand(1);

  int rc = 0;
  std::function<int()> action;

  // ----------------------------------------------------------------- count
  {
    auto* cmd = app.add_subcommand("count", "exact J_{s,n}(N) by independent algorithms");
    auto n = std::make_shared<int>(2);
    auto s = std::make_shared<int>(2);
    auto N = std::make_shared<long>(2);
    auto algo = std::make_shared<std::string>("all");
    auto strategy = std::make_shared<std::string>("sort");
    auto workers = std::make_shared<int>(1);
    auto out = std::make_shared<OutputOptions>();
    cmd->add_option("--n", *n, "degree")->required();
    cmd->add_option("--s", *s, "multiplicity")->required();
    cmd->add_option("--N", *N, "range")->required();
    cmd->add_option("--algo", *algo, "naive|mitm|torus|all")->default_val("all");
    cmd->add_option("--mitm-strategy", *strategy, "sort|hash")->default_val("sort");
    cmd->add_option("--workers", *workers, "partitioned enumeration workers");
    add_output_flags(cmd, *out);
    cmd->callback([=, &action]() {
      action = [=]() {
        Timer timer;
        CountBudget budget = budget_from_env();
        budget.workers = *workers;
        Instance inst(*n, *s, *N);
        ordered_json params{{"n", *n}, {"s", *s}, {"N", *N}, {"algo", *algo},
                            {"mitm_strategy", *strategy}, {"workers", *workers}};
        ordered_json results;
        std::optional<BigInt> naive, mitm, torus;
        if (*algo == "naive" || *algo == "all") {
          naive = count_naive(inst, budget);
          results["naive"] = naive->str();
        }
        if (*algo == "mitm" || *algo == "all") {
          mitm = count_mitm(inst, budget,
                            *strategy == "hash" ? MitmStrategy::HashTable
                                                : MitmStrategy::SortMerge);
          results["mitm"] = mitm->str();
        }
        if (*algo == "torus" || *algo == "all") {
          torus = torus_integral_power(inst);
          results["torus"] = torus->str();
        }
        bool agree = true;
        std::optional<BigInt> ref;
        for (const auto& v : {naive, mitm, torus})
          if (v) {
            if (ref && *ref != *v) agree = false;
            if (!ref) ref = v;
          }
        results["agreement"] = agree;
        return finish("count", params, results, {}, timer.seconds(), *out);
      };
    });
  }

  // ------------------------------------------------------------ count-real
  {
    auto* cmd = app.add_subcommand("count-real", "separated-point inequality count");
    auto n = std::make_shared<int>(2);
    auto s = std::make_shared<int>(1);
    auto N = std::make_shared<long>(4);
    auto offset = std::make_shared<double>(0.0);
    auto jitter = std::make_shared<std::uint64_t>(0);
    auto points_csv = std::make_shared<std::string>();
    auto out = std::make_shared<OutputOptions>();
    cmd->add_option("--n", *n)->required();
    cmd->add_option("--s", *s)->required();
    cmd->add_option("--N", *N, "number of points (ignored when --points is given)");
    cmd->add_option("--offset", *offset, "X_i = i - offset (in [0,1))");
    cmd->add_option("--jitter", *jitter, "seeded uniform jitter inside each window");
    cmd->add_option("--points", *points_csv, "explicit comma-separated points");
    add_output_flags(cmd, *out);
    cmd->callback([=, &action]() {
      action = [=]() {
        Timer timer;
        std::vector<double> pts;
        if (!points_csv->empty()) {
          std::stringstream ss(*points_csv);
          std::string item;
          while (std::getline(ss, item, ',')) pts.push_back(std::stod(item));
        } else if (*jitter != 0) {
          Rng rng(*jitter);
          for (long i = 1; i <= *N; ++i) pts.push_back(i - rng.next_double() * 0.999);
        } else {
          for (long i = 1; i <= *N; ++i) pts.push_back(i - *offset);
        }
        SeparatedPointSet set(pts);
        ordered_json params{{"n", *n}, {"s", *s}, {"N", set.N()}, {"offset", *offset},
                            {"jitter", *jitter}, {"points", *points_csv}};
        BigInt c = count_real(set, *s, *n, budget_from_env());
        ordered_json results{{"count", c.str()}};
        return finish("count-real", params, results, {}, timer.seconds(), *out);
      };
    });
  }

  // ----------------------------------------------------------- torus-moment
  {
    auto* cmd = app.add_subcommand("torus-moment", "Monte-Carlo moment of |F|^(2s)");
    auto n = std::make_shared<int>(2);
    auto s = std::make_shared<int>(2);
    auto N = std::make_shared<long>(2);
    auto samples = std::make_shared<long>(100000);
    auto seed = std::make_shared<std::uint64_t>(1);
    auto out = std::make_shared<OutputOptions>();
    cmd->add_option("--n", *n)->required();
    cmd->add_option("--s", *s)->required();
    cmd->add_option("--N", *N)->required();
    cmd->add_option("--samples", *samples);
    cmd->add_option("--seed", *seed);
    add_output_flags(cmd, *out);
    cmd->callback([=, &action]() {
      action = [=]() {
        Timer timer;
        QuadratureConfig cfg;
        cfg.mc_samples = *samples;
        cfg.seed = *seed;
        auto est = moment_monte_carlo(Instance(*n, *s, *N), cfg);
        ordered_json params{{"n", *n}, {"s", *s}, {"N", *N}, {"samples", *samples},
                            {"seed", *seed}};
        ordered_json results{{"estimate", est.estimate}, {"standard_error", est.standard_error}};
        return finish("torus-moment", params, results, {}, timer.seconds(), *out);
      };
    });
  }

  // ----------------------------------------------------------------- growth
  {
    auto* cmd = app.add_subcommand("growth", "log-log growth fit of J against N");
    auto n = std::make_shared<int>(2);
    auto s = std::make_shared<int>(2);
    auto Ns = std::make_shared<std::string>("8,16,32,64");
    auto out = std::make_shared<OutputOptions>();
    cmd->add_option("--n", *n)->required();
    cmd->add_option("--s", *s)->required();
    cmd->add_option("--N-list", *Ns, "comma-separated increasing N values");
    add_output_flags(cmd, *out);
    cmd->callback([=, &action]() {
      action = [=]() {
        Timer timer;
        auto fit = growth_fit(*n, *s, parse_long_list(*Ns), budget_from_env());
        ordered_json params{{"n", *n}, {"s", *s}, {"N_list", *Ns}};
        ordered_json results;
        results["slope"] = fit.slope;
        results["intercept"] = fit.intercept;
        results["N_values"] = fit.N_values;
        ordered_json counts = ordered_json::array();
        for (const auto& c : fit.counts) counts.push_back(c.str());
        results["counts"] = counts;
        results["residuals"] = fit.residuals;
        return finish("growth", params, results, {}, timer.seconds(), *out);
      };
    });
  }

  // ------------------------------------------------------------------- arcs
  {
    auto* cmd = app.add_subcommand("arcs", "enumerate major arcs and their measure");
    auto n = std::make_shared<int>(2);
    auto N = std::make_shared<long>(16);
    auto mc = std::make_shared<long>(200000);
    auto seed = std::make_shared<std::uint64_t>(7);
    auto out = std::make_shared<OutputOptions>();
    cmd->add_option("--n", *n)->required();
    cmd->add_option("--N", *N)->required();
    cmd->add_option("--mc-samples", *mc);
    cmd->add_option("--seed", *seed);
    add_output_flags(cmd, *out);
    cmd->callback([=, &action]() {
      action = [=]() {
        Timer timer;
        auto set = enumerate_major_arcs(*N, *n, *mc, *seed);
        ordered_json params{{"n", *n}, {"N", *N}, {"mc_samples", *mc}, {"seed", *seed}};
        ordered_json results;
        results["label_count"] = set.labels.size();
        ordered_json labels = ordered_json::array();
        for (const auto& l : set.labels) labels.push_back(ordered_json{{"q", l.q}, {"a", l.a}});
        results["labels"] = labels;
        results["measure_union_bound"] = set.measure_union_bound;
        results["measure_mc"] = set.measure_mc;
        results["measure_mc_stderr"] = set.measure_mc_stderr;
        return finish("arcs", params, results, {}, timer.seconds(), *out);
      };
    });
  }

  // -------------------------------------------------------------- minor-sup
  {
    auto* cmd = app.add_subcommand("minor-sup", "empirical sup of |F| over the minor arcs");
    auto n = std::make_shared<int>(2);
    auto Ns = std::make_shared<std::string>("64,128,256,512");
    auto samples = std::make_shared<long>(100000);
    auto seed = std::make_shared<std::uint64_t>(11);
    auto out = std::make_shared<OutputOptions>();
    cmd->add_option("--n", *n)->required();
    cmd->add_option("--N-list", *Ns);
    cmd->add_option("--samples", *samples);
    cmd->add_option("--seed", *seed);
    add_output_flags(cmd, *out);
    cmd->callback([=, &action]() {
      action = [=]() {
        Timer timer;
        auto scan = minor_sup_scan(parse_long_list(*Ns), *n, *samples, *seed);
        ordered_json params{{"n", *n}, {"N_list", *Ns}, {"samples", *samples}, {"seed", *seed}};
        ordered_json results;
        results["N_values"] = scan.N_values;
        ordered_json sups = ordered_json::array(), acc = ordered_json::array();
        for (const auto& r : scan.per_N) {
          sups.push_back(r.sup_estimate);
          acc.push_back(r.acceptance_rate);
        }
        results["sup_estimates"] = sups;
        results["acceptance_rates"] = acc;
        results["fitted_slope"] = scan.fitted_slope;
        if (!out->csv.empty()) {
          std::ostringstream csv;
          csv << "N,sup_estimate,samples,seed\n";
          for (size_t i = 0; i < scan.N_values.size(); ++i)
            csv << scan.N_values[i] << "," << scan.per_N[i].sup_estimate << "," << *samples << ","
                << *seed << "\n";
          atomic_write_text(out->csv, csv.str());
        }
        return finish("minor-sup", params, results, {}, timer.seconds(), *out);
      };
    });
  }

  // ---------------------------------------------------------------- weights
  {
    auto* cmd = app.add_subcommand("weights", "interpolation weights alpha_j, beta_j");
    auto n = std::make_shared<int>(3);
    auto p = std::make_shared<std::string>("12");
    auto out = std::make_shared<OutputOptions>();
    cmd->add_option("--n", *n)->required();
    cmd->add_option("--p", *p, "rational Lebesgue exponent")->required();
    add_output_flags(cmd, *out);
    cmd->callback([=, &action]() {
      action = [=]() {
        Timer timer;
        const Rational pr = parse_rational_or_die(*p, "--p");
        auto rel = weights_from_relations(*n, pr);
        auto cf = weights_closed_form(*n, pr);
        ordered_json params{{"n", *n}, {"p", *p}};
        ordered_json results;
        results["delta"] = to_string(rel.Delta);
        ordered_json alpha = ordered_json::array(), beta = ordered_json::array();
        for (const auto& a : rel.alpha) alpha.push_back(to_string(a));
        for (const auto& b : rel.beta) beta.push_back(to_string(b));
        results["alpha"] = alpha;
        results["beta"] = beta;
        results["closed_form_agrees"] = (rel.alpha == cf.alpha && rel.beta == cf.beta);
        return finish("weights", params, results, {}, timer.seconds(), *out);
      };
    });
  }

  // ------------------------------------------------------------------- tree
  {
    auto* cmd = app.add_subcommand("tree", "iteration tree expansion and export");
    auto n = std::make_shared<int>(3);
    auto p = std::make_shared<std::string>("12");
    auto depth = std::make_shared<int>(3);
    auto format = std::make_shared<std::string>("json");
    auto series_r = std::make_shared<int>(60);
    auto out = std::make_shared<OutputOptions>();
    cmd->add_option("--n", *n)->required();
    cmd->add_option("--p", *p)->required();
    cmd->add_option("--depth", *depth, "number of bifurcation events");
    cmd->add_option("--format", *format, "text|json export to stdout/--csv path");
    cmd->add_option("--series-r", *series_r, "generations for the omega_1 series");
    add_output_flags(cmd, *out);
    cmd->callback([=, &action]() {
      action = [=]() {
        Timer timer;
        const Rational pr = parse_rational_or_die(*p, "--p");
        auto tree = build_tree(*n, pr, *depth);
        auto gb = tree.gamma_b();
        auto series = omega1_series(*n, pr, *series_r);
        ordered_json params{{"n", *n}, {"p", *p}, {"depth", *depth}, {"series_r", *series_r}};
        ordered_json results;
        results["processings"] = tree.processings;
        results["nodes"] = tree.nodes.size();
        ordered_json pairs = ordered_json::array();
        for (size_t i = 0; i < gb.gamma.size(); ++i)
          pairs.push_back(ordered_json{{"b", to_string(gb.b[i])}, {"gamma", to_string(gb.gamma[i])}});
        results["gamma_b"] = pairs;
        results["series_sum_b_gamma"] = series.sum_b_gamma;
        results["series_sum_gamma"] = series.sum_gamma;
        results["series_remainder"] = series.frontier_future;
        const std::string exported = (*format == "text") ? tree.to_text() : tree.to_json();
        if (!out->csv.empty())
          atomic_write_text(out->csv, exported);
        else if (!out->quiet)
          std::cout << exported << std::endl;
        return finish("tree", params, results, {}, timer.seconds(), *out);
      };
    });
  }

  // --------------------------------------------------------------- appendix
  {
    auto* cmd = app.add_subcommand("appendix", "exact solve of the weight recursion");
    auto n = std::make_shared<int>(3);
    auto delta = std::make_shared<std::string>("4");
    auto theta = std::make_shared<std::string>("0");
    auto out = std::make_shared<OutputOptions>();
    cmd->add_option("--n", *n)->required();
    cmd->add_option("--delta", *delta, "rational Delta")->required();
    cmd->add_option("--theta", *theta, "rational theta")->default_val("0");
    add_output_flags(cmd, *out);
    cmd->callback([=, &action]() {
      action = [=]() {
        Timer timer;
        const Rational D = parse_rational_or_die(*delta, "--delta");
        const Rational th = parse_rational_or_die(*theta, "--theta");
        auto sol = solve_system(*n, D, th);
        auto aff = omega1_affine(*n, D);
        ordered_json params{{"n", *n}, {"delta", *delta}, {"theta", *theta}};
        ordered_json results;
        ordered_json om = ordered_json::array(), et = ordered_json::array();
        for (const auto& w : sol.omega) om.push_back(to_string(w));
        for (const auto& e : sol.eta) et.push_back(to_string(e));
        results["omega"] = om;
        results["eta"] = et;
        results["A"] = to_string(aff.A);
        results["B"] = to_string(aff.B);
        bool zero = true;
        for (const auto& r : system_residuals(sol)) zero = zero && (r == 0);
        results["residuals_zero"] = zero;
        if (!out->csv.empty()) {
          std::ostringstream csv;
          csv << "n,delta,theta,omega,eta,A,B,margin\n";
          csv << *n << "," << *delta << "," << *theta << ",\"";
          for (size_t i = 0; i < sol.omega.size(); ++i)
            csv << (i ? ";" : "") << to_string(sol.omega[i]);
          csv << "\",\"";
          for (size_t i = 0; i < sol.eta.size(); ++i) csv << (i ? ";" : "") << to_string(sol.eta[i]);
          csv << "\"," << to_string(aff.A) << "," << to_string(aff.B) << ","
              << to_string(sol.w(1) - 1) << "\n";
          atomic_write_text(out->csv, csv.str());
        }
        return finish("appendix", params, results, {}, timer.seconds(), *out);
      };
    });
  }

  // -------------------------------------------------------------- threshold
  {
    auto* cmd = app.add_subcommand("threshold", "omega_1(Delta) > 1 verification");
    auto n = std::make_shared<int>(3);
    auto delta = std::make_shared<std::string>("3999/1000");
    auto out = std::make_shared<OutputOptions>();
    cmd->add_option("--n", *n)->required();
    cmd->add_option("--delta", *delta)->required();
    add_output_flags(cmd, *out);
    cmd->callback([=, &action]() {
      action = [=]() {
        Timer timer;
        const Rational D = parse_rational_or_die(*delta, "--delta");
        auto res = verify_threshold(*n, D);
        ordered_json params{{"n", *n}, {"delta", *delta}};
        ordered_json results{{"verdict", res.above_one},
                             {"margin", to_string(res.margin)},
                             {"margin_decimal", to_double(res.margin)}};
        return finish("threshold", params, results, {}, timer.seconds(), *out);
      };
    });
  }

  // --------------------------------------------------------------- decouple
  {
    auto* cmd = app.add_subcommand("decouple", "single decoupling-type ratio experiment");
    auto inequality = std::make_shared<std::string>("main_decoupling");
    auto n = std::make_shared<int>(2);
    auto p = std::make_shared<double>(6.0);
    auto inv_delta = std::make_shared<int>(8);
    auto gkind = std::make_shared<std::string>("const");
    auto seed = std::make_shared<std::uint64_t>(1);
    auto radius = std::make_shared<double>(0.0);
    auto t0 = std::make_shared<double>(0.0);
    auto sigma = std::make_shared<double>(0.25);
    auto R = std::make_shared<double>(16.0);
    auto out = std::make_shared<OutputOptions>();
    cmd->add_option("--inequality", *inequality, "main_decoupling|l2_orth|lower_dim");
    cmd->add_option("--n", *n);
    cmd->add_option("--p", *p);
    cmd->add_option("--inv-delta", *inv_delta, "reciprocal grid width of g");
    cmd->add_option("--g", *gkind, "const|random");
    cmd->add_option("--seed", *seed);
    cmd->add_option("--ball-radius", *radius, "override ball radius (flagged in the record)");
    cmd->add_option("--t0", *t0, "lower_dim arc start");
    cmd->add_option("--sigma", *sigma, "lower_dim arc length");
    cmd->add_option("--R", *R, "lower_dim ball radius");
    add_output_flags(cmd, *out);
    cmd->callback([=, &action]() {
      action = [=]() {
        Timer timer;
        QuadratureConfig cfg = experiment_config(*seed);
        StepFunction g = (*gkind == "const") ? StepFunction::constant(*inv_delta)
                                             : random_unimodular_step(*inv_delta, *seed);
        ordered_json params{{"inequality", *inequality}, {"n", *n}, {"p", *p},
                            {"inv_delta", *inv_delta}, {"g", *gkind}, {"seed", *seed},
                            {"ball_radius_override", *radius}, {"t0", *t0}, {"sigma", *sigma},
                            {"R", *R}};
        RatioResult r;
        if (*inequality == "main_decoupling") {
          const double rad = *radius > 0 ? *radius : std::pow(double(*inv_delta), *n);
          r = decoupling_ratio(*n, *p, g, Ball(Vec::Zero(*n), rad),
                               WeightProfile::standard(*n), cfg);
        } else if (*inequality == "l2_orth") {
          r = l2_orthogonality_ratio(*n, g, cfg);
        } else if (*inequality == "lower_dim") {
          r = lower_dim_ratio(*t0, *sigma, *R, *p, g, cfg);
        } else {
          throw ValidationError("decouple: unknown inequality " + *inequality);
        }
        ordered_json results{{"ratio", r.ratio}, {"lhs", r.lhs}, {"rhs", r.rhs}};
        ordered_json convergence{{"quadrature_rel_error", r.quadrature_rel_error},
                                 {"truncation_bound", r.truncation_bound}};
        return finish("decouple", params, results, convergence, timer.seconds(), *out);
      };
    });
  }

  // ---------------------------------------------------------------- vp-scan
  {
    auto* cmd = app.add_subcommand("vp-scan", "max decoupling ratio across delta with growth fit");
    auto n = std::make_shared<int>(2);
    auto p = std::make_shared<double>(6.0);
    auto invds = std::make_shared<std::string>("4,8,16,32");
    auto trials = std::make_shared<int>(6);
    auto seed = std::make_shared<std::uint64_t>(1);
    auto out = std::make_shared<OutputOptions>();
    cmd->add_option("--n", *n);
    cmd->add_option("--p", *p)->required();
    cmd->add_option("--inv-deltas", *invds);
    cmd->add_option("--trials", *trials);
    cmd->add_option("--seed", *seed);
    add_output_flags(cmd, *out);
    cmd->callback([=, &action]() {
      action = [=]() {
        Timer timer;
        auto scan = vp_scan(*n, *p, parse_int_list(*invds), *trials, *seed,
                            experiment_config(*seed));
        ordered_json params{{"n", *n}, {"p", *p}, {"inv_deltas", *invds}, {"trials", *trials},
                            {"seed", *seed}};
        ordered_json results;
        results["eta_hat"] = scan.eta_hat;
        ordered_json pts = ordered_json::array();
        for (const auto& pt : scan.points)
          pts.push_back(ordered_json{{"inv_delta", pt.inv_delta},
                                     {"max_ratio", pt.max_ratio},
                                     {"max_trial", pt.max_trial},
                                     {"converged", pt.converged},
                                     {"doubling_shift", pt.doubling_shift},
                                     {"trial_ratios", pt.trial_ratios}});
        results["points"] = pts;
        ordered_json convergence{{"all_converged", scan.all_converged}};
        return finish("vp-scan", params, results, convergence, timer.seconds(), *out);
      };
    });
  }

  // ------------------------------------------------------------ restriction
  {
    auto* cmd = app.add_subcommand("restriction", "discrete restriction ratio");
    auto n = std::make_shared<int>(2);
    auto p = std::make_shared<double>(6.0);
    auto N = std::make_shared<int>(8);
    auto R = std::make_shared<double>(0.0);
    auto seed = std::make_shared<std::uint64_t>(1);
    auto samples = std::make_shared<long>(20000);
    auto tjitter = std::make_shared<bool>(false);
    auto out = std::make_shared<OutputOptions>();
    cmd->add_option("--n", *n);
    cmd->add_option("--p", *p)->required();
    cmd->add_option("--N", *N)->required();
    cmd->add_option("--R", *R, "ball radius (default N^n)");
    cmd->add_option("--seed", *seed);
    cmd->add_option("--samples", *samples);
    cmd->add_flag("--t-jitter", *tjitter, "random t_i inside ((i-1)/N, i/N]");
    add_output_flags(cmd, *out);
    cmd->callback([=, &action]() {
      action = [=]() {
        Timer timer;
        const double rad = *R > 0 ? *R : std::pow(double(*N), *n);
        std::vector<Complex> a(*N, Complex(1, 0));
        std::vector<double> t(*N);
        Rng rng(*seed);
        for (int i = 0; i < *N; ++i) {
          const double frac = *tjitter ? rng.next_double() : 0.0;
          t[i] = (i + 1 - frac * 0.999) / *N;
        }
        QuadratureConfig cfg = experiment_config(*seed);
        cfg.mc_samples = *samples;
        auto r = discrete_restriction_ratio(*n, *p, *N, a, t, rad, cfg);
        ordered_json params{{"n", *n}, {"p", *p}, {"N", *N}, {"R", rad}, {"seed", *seed},
                            {"samples", *samples}, {"t_jitter", *tjitter}};
        ordered_json results{{"ratio", r.ratio}, {"lhs", r.lhs}, {"rhs", r.rhs}};
        ordered_json convergence{{"quadrature_rel_error", r.quadrature_rel_error}};
        return finish("restriction", params, results, convergence, timer.seconds(), *out);
      };
    });
  }

  // ---------------------------------------------------------------- inflate
  {
    auto* cmd = app.add_subcommand("inflate", "bilinear ball-inflation ratio (n=2, k=1)");
    auto p = std::make_shared<double>(4.0);
    auto inv_rho = std::make_shared<int>(8);
    auto K = std::make_shared<int>(4);
    auto gkind = std::make_shared<std::string>("const");
    auto seed = std::make_shared<std::uint64_t>(1);
    auto out = std::make_shared<OutputOptions>();
    cmd->add_option("--p", *p);
    cmd->add_option("--inv-rho", *inv_rho);
    cmd->add_option("--K", *K);
    cmd->add_option("--g", *gkind, "const|random");
    cmd->add_option("--seed", *seed);
    add_output_flags(cmd, *out);
    cmd->callback([=, &action]() {
      action = [=]() {
        Timer timer;
        StepFunction g = (*gkind == "const") ? StepFunction::constant(*inv_rho)
                                             : random_unimodular_step(*inv_rho, *seed);
        auto r = ball_inflation_ratio(*p, *inv_rho, *K, g, experiment_config(*seed));
        ordered_json params{{"p", *p}, {"inv_rho", *inv_rho}, {"K", *K}, {"g", *gkind},
                            {"seed", *seed}};
        ordered_json results{{"ratio", r.ratio}, {"lhs", r.lhs}, {"rhs", r.rhs}};
        return finish("inflate", params, results, {}, timer.seconds(), *out);
      };
    });
  }

  // ------------------------------------------------------------------- plot
  {
    auto* cmd = app.add_subcommand("plot", "emit tidy CSV + plot description from records");
    auto kind = std::make_shared<std::string>("growth");
    auto in = std::make_shared<std::string>();
    auto csv_out = std::make_shared<std::string>("plot.csv");
    auto desc_out = std::make_shared<std::string>("plot.json");
    cmd->add_option("--kind", *kind, "growth|vp-scan|threshold|minor-sup")->required();
    cmd->add_option("--in", *in, "JSONL record log")->required();
    cmd->add_option("--csv-out", *csv_out);
    cmd->add_option("--desc-out", *desc_out);
    cmd->callback([=, &action]() {
      action = [=]() {
        auto records = read_records_jsonl(*in);
        auto plot = emit_plotdata(records, *kind);
        atomic_write_text(*csv_out, plot.csv);
        atomic_write_text(*desc_out, plot.description.dump(2) + "\n");
        std::cout << "wrote " << *csv_out << " and " << *desc_out << std::endl;
        return 0;
      };
    });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return 0;  // --help
    std::cerr << e.what() << std::endl;
    return 64;
  }

  try {
    rc = action ? action() : 64;
  } catch (const BudgetExceeded& e) {
    std::cerr << "budget error: " << e.what() << std::endl;
    return 2;
  } catch (const ValidationError& e) {
    std::cerr << "validation error: " << e.what() << std::endl;
    return 3;
  } catch (const std::invalid_argument& e) {
    std::cerr << "validation error: " << e.what() << std::endl;
    return 3;
  } catch (const std::domain_error& e) {
    std::cerr << "validation error: " << e.what() << std::endl;
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << std::endl;
    return 1;
  }
  return rc;
}
