// Verification gate for the whole stack. Each numbered check prints one
// [PASS]/[FAIL] line with its measured figure; the exit status is the number
// of failures. Monte Carlo checks run at fixed seeds so a passing build is
// reproducible.
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "dam/config_io.hpp"
#include "dam/mc_oracle.hpp"
#include "dam/optimizer.hpp"
#include "dam/policy_cost.hpp"
#include "dam/quadrature.hpp"
#include "dam/special_functions.hpp"

using namespace dam;

namespace {

int g_failures = 0;

void report(const char* name, bool ok, const std::string& detail) {
  std::printf("[%s] %s (%s)\n", ok ? "PASS" : "FAIL", name, detail.c_str());
  if (!ok) ++g_failures;
}

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

std::string data_path(const char* name) {
  return std::string(DAMFLOW_TEST_DATA_DIR) + "/" + name;
}

double rel_err(double got, double want) {
  const double scale = std::max(1.0, std::fabs(want));
  return std::fabs(got - want) / scale;
}

// Brownian references, written out from the generator ODE so they share no
// code with the library: exit transforms and mean times for the free and
// reflected fill, and for the release leg with pump M and wall V.
struct BmRef {
  double mu, s2;

  double lt_fill_free(double alpha, double lambda, double x) const {
    const double r = (std::sqrt(mu * mu + 2.0 * alpha * s2) - mu) / s2;
    return std::exp(-r * (lambda - x));
  }
  double mean_fill_free(double lambda, double x) const {
    return mu > 0.0 ? (lambda - x) / mu : kInf;
  }
  // Solves alpha f = mu f' + (s2/2) f'' with f'(0) = 0 (reflecting floor).
  double psi(double alpha, double x) const {
    const double d = std::sqrt(mu * mu + 2.0 * alpha * s2);
    const double rp = (-mu + d) / s2;
    const double rm = (-mu - d) / s2;
    return -rm * std::exp(rp * x) + rp * std::exp(rm * x);
  }
  double lt_fill_refl(double alpha, double lambda, double x) const {
    return psi(alpha, x) / psi(alpha, lambda);
  }
  double mean_fill_refl(double lambda, double x) const {
    if (mu == 0.0) return (lambda * lambda - x * x) / s2;
    return (lambda - x) / mu +
           s2 / (2.0 * mu * mu) *
               (std::exp(-2.0 * mu * lambda / s2) - std::exp(-2.0 * mu * x / s2));
  }
  double lt_release(double M, double V, double tau, double alpha,
                    double x) const {
    const double m = mu - M;
    const double d = std::sqrt(m * m + 2.0 * alpha * s2);
    const double r1 = (-m + d) / s2;
    const double r2 = (-m - d) / s2;
    const double ratio = -(r2 / r1) * std::exp((r2 - r1) * V);
    const double B = 1.0 / (ratio * std::exp(r1 * tau) + std::exp(r2 * tau));
    return ratio * B * std::exp(r1 * x) + B * std::exp(r2 * x);
  }
  double mean_release(double M, double V, double tau, double x) const {
    const double m = mu - M;
    if (m == 0.0) return (2.0 * V * (x - tau) - (x * x - tau * tau)) / s2;
    const double B = -s2 / (2.0 * m * m) * std::exp(2.0 * m * V / s2);
    return (tau - x) / m +
           B * (std::exp(-2.0 * m * x / s2) - std::exp(-2.0 * m * tau / s2));
  }
};

double kolmogorov_q(double t) {
  if (t < 0.2) return 1.0;
  double q = 0.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = std::exp(-2.0 * k * k * t * t);
    q += (k % 2 == 1 ? 2.0 : -2.0) * term;
    if (term < 1e-16) break;
  }
  return std::min(1.0, std::max(0.0, q));
}

// nu([x, inf)) integrated over [0, x], closed form per jump family; used to
// cross-check the table against the renewal bound W(x) (drift - int) <= 1.
double tail_integral_cp_exp(double rate, double b, double x) {
  return rate / b * (1.0 - std::exp(-b * x));
}
double tail_integral_gamma(double a, double b, double x) {
  return a / b * (1.0 - std::exp(-b * x) + b * x * expint_e1(b * x));
}
double tail_integral_ig(double sigma, double c, double x) {
  const double k = c * c / (2.0 * sigma * sigma);
  const double root = std::sqrt(k * x);
  const double nubar = (2.0 * std::exp(-k * x) / std::sqrt(x) -
                        2.0 * std::sqrt(k * M_PI) * std::erfc(root)) /
                       (sigma * std::sqrt(2.0 * M_PI));
  const double beyond = std::sqrt(M_PI / k) * std::erfc(root) /
                            (sigma * std::sqrt(2.0 * M_PI)) -
                        x * nubar;
  return 1.0 / c - beyond;
}

LevyModel cp_exp_model(bool reflected) {
  return LevyModel::bounded_variation(
      2.0, CompoundPoissonJumps{1.0, ExponentialJumps{1.0}}, reflected);
}

// Transform inversion: the table's Laplace transform must reproduce
// 1/(phi(beta) - alpha) well beyond quadrature noise.
void check_transform_inversion() {
  double worst_bm = 0.0;
  for (double mu : {0.0, 1.0}) {
    const double s2 = mu == 0.0 ? 1.0 : 2.0;
    LevyModel m = LevyModel::brownian(mu, s2, false);
    for (double alpha : {0.0, 1.0}) {
      ScaleTable t = build_scale_table(m, alpha, 6.0, 1e-3);
      for (double db : {0.12, 0.6, 1.3, 2.7, 4.9})
        worst_bm = std::max(
            worst_bm, laplace_identity_residual(t, m, t.eta() + db));
    }
  }
  double worst_bv = 0.0;
  LevyModel m = cp_exp_model(false);
  for (double alpha : {0.0, 1.0}) {
    ScaleTable t = build_scale_table(m, alpha, 8.0, 2e-3);
    for (double db : {0.12, 0.6, 1.3, 2.7, 4.9})
      worst_bv =
          std::max(worst_bv, laplace_identity_residual(t, m, t.eta() + db));
  }
  report("C1 scale transform inversion", worst_bm < 1e-8 && worst_bv < 1e-4,
         "brownian " + num(worst_bm) + " < 1e-8, jump " + num(worst_bv) +
             " < 1e-4");
}

// Every brownian exit quantity against the generator-ODE solutions over a
// parameter sweep.
void check_brownian_closed_forms() {
  double worst = 0.0;
  const double lambda = 1.0, x = 0.3, tau = 0.2, V = 2.0, M = 1.0;
  Policy p;
  p.lambda = lambda;
  p.tau = tau;
  p.M = M;
  p.V = V;
  for (double mu : {-0.5, 0.0, 1.0}) {
    for (double s2 : {0.5, 1.0, 2.0}) {
      const BmRef ref{mu, s2};
      ScaleCache free_c(LevyModel::brownian(mu, s2, false), GridSpec{1e-3, 3.5});
      ScaleCache refl_c(LevyModel::brownian(mu, s2, true), GridSpec{1e-3, 3.5});
      for (double alpha : {0.1, 1.0, 2.0}) {
        worst = std::max(worst, rel_err(lt_fill(free_c, alpha, lambda, x),
                                        ref.lt_fill_free(alpha, lambda, x)));
        worst = std::max(worst, rel_err(lt_fill(refl_c, alpha, lambda, x),
                                        ref.lt_fill_refl(alpha, lambda, x)));
        worst = std::max(worst, rel_err(lt_release(refl_c, alpha, p, 1.3),
                                        ref.lt_release(M, V, tau, alpha, 1.3)));
        const double cyc = ref.lt_fill_refl(alpha, lambda, x) *
                           ref.lt_release(M, V, tau, alpha, lambda);
        worst = std::max(worst, rel_err(lt_cycle(refl_c, alpha, p, x), cyc));
      }
      worst = std::max(worst, rel_err(mean_fill(refl_c, lambda, x),
                                      ref.mean_fill_refl(lambda, x)));
      const double mff = ref.mean_fill_free(lambda, x);
      const double got_mff = mean_fill(free_c, lambda, x);
      if (std::isfinite(mff) || std::isfinite(got_mff))
        worst = std::max(worst, rel_err(got_mff, mff));
      worst = std::max(worst, rel_err(mean_release(refl_c, p, 1.3),
                                      ref.mean_release(M, V, tau, 1.3)));
      const double mc = ref.mean_fill_refl(lambda, tau) +
                        ref.mean_release(M, V, tau, lambda);
      worst = std::max(worst, rel_err(mean_cycle(refl_c, p), mc));
    }
  }
  report("C2 brownian closed-form sweep", worst < 1e-10,
         "max relative error " + num(worst) + " < 1e-10");
}

// alpha * (potential mass) + exit transform = 1 for every potential measure.
void check_killing_identity() {
  const double alpha = 0.7;
  double worst = 0.0;

  {
    ScaleCache cache(LevyModel::brownian(0.2, 1.0, true), GridSpec{1e-3, 3.5});
    for (int i = 0; i < 10; ++i) {
      const double x = 0.095 * i;
      PotentialMeasure m = potential_reflected_measure(cache, alpha, 1.0, x);
      worst = std::max(
          worst, std::fabs(alpha * m.mass + lt_fill(cache, alpha, 1.0, x) - 1.0));
    }
  }
  {
    ScaleCache cache(LevyModel::brownian(-0.3, 1.4, false), GridSpec{1e-3, 3.5});
    for (int i = 0; i < 10; ++i) {
      const double x = 0.16 + 0.098 * i;
      PotentialMeasure m = potential_two_sided_measure(cache, alpha, 0.1, 1.2, x);
      const auto [up, down] = lt_two_sided(cache, alpha, 0.1, 1.2, x);
      worst = std::max(worst, std::fabs(alpha * m.mass + up + down - 1.0));
    }
  }
  {
    ScaleCache cache(cp_exp_model(true), GridSpec{1e-3, 3.5});
    Policy p;
    p.lambda = 1.0;
    p.tau = 0.3;
    p.M = 1.0;
    p.V = 2.0;
    for (int i = 0; i < 10; ++i) {
      const double x = 0.35 + 0.177 * i;
      PotentialMeasure m = potential_release_measure(cache, alpha, p, x);
      worst = std::max(worst, std::fabs(alpha * m.mass +
                                        lt_release(cache, alpha, p, x) - 1.0));
    }
  }
  {
    // Free fill: integrate the density by Simpson on both sides of the kink
    // at y = x, then add the exact lower tail of the e^{eta y} factor.
    ScaleCache cache(LevyModel::brownian(-0.5, 1.0, false), GridSpec{1e-3, 3.5});
    const double lambda = 1.0;
    const double eta = eta_root_cached(cache, alpha);
    for (int i = 0; i < 10; ++i) {
      const double x = -0.35 + 0.133 * i;
      const double lo = x - 3.0;
      const auto integrate = [&](double a, double b) {
        const int n = 2000; // even
        std::vector<double> f(n + 1);
        const double h = (b - a) / n;
        for (int i = 0; i <= n; ++i)
          f[size_t(i)] = potential_free(cache, alpha, lambda, x, a + h * i);
        return simpson(f, h);
      };
      const double body = integrate(lo, x) + integrate(x, lambda);
      const double w_here = cache.table(alpha, 0.0).w(lambda - x);
      const double tail = w_here * std::exp(-eta * (lambda - lo)) / eta;
      const double lt = lt_fill(cache, alpha, lambda, x);
      worst = std::max(worst, std::fabs(alpha * (body + tail) + lt - 1.0));
    }
  }
  report("C3 killing identity of potential measures", worst < 1e-6,
         "max |alpha mass + lt - 1| = " + num(worst) + " < 1e-6");
}

// Overshoot law: exponential jumps stay memoryless beyond the threshold,
// continuous input is a pure atom, and the simulated law matches the kernel.
void check_overshoot_law() {
  bool ok = true;
  std::string detail;

  {
    ScaleCache cache(cp_exp_model(true), GridSpec{1e-3, 3.5});
    Policy p;
    p.lambda = 1.0;
    p.tau = 0.3;
    p.M = 1.0;
    p.V = kInf;
    OvershootKernel k =
        overshoot(cache, 0.4, 1.0, 0.3, default_z_max(cache.model(), p));
    const double base = k.tail_beyond(1.0);
    double sup = 0.0;
    for (double u = 0.0; u <= 5.0; u += 0.25)
      sup = std::max(sup,
                     std::fabs(k.tail_beyond(1.0 + u) / base - std::exp(-u)));
    ok = ok && sup < 0.01;
    detail += "memoryless sup " + num(sup);
  }
  {
    ScaleCache cache(LevyModel::brownian(0.1, 1.0, true), GridSpec{1e-3, 3.5});
    OvershootKernel k = overshoot(cache, 0.5, 1.0, 0.2, 2.0);
    const double diff =
        std::fabs(k.atom() - lt_fill(cache, 0.5, 1.0, 0.2));
    ok = ok && diff < 1e-8 && k.density().empty();
    detail += ", brownian atom gap " + num(diff);
  }
  {
    LevyModel model = cp_exp_model(true);
    ScaleCache cache(model, GridSpec{1e-3, 3.5});
    OvershootKernel k = overshoot(cache, 0.0, 1.0, 0.3, 3.0);
    const double total = k.total_mass();
    ok = ok && std::fabs(total - 1.0) < 1e-5;

    SimConfig cfg;
    cfg.n_paths = 100000;
    cfg.seed = 424242;
    FillSimResult r = simulate_fill(model, 1.0, 0.3, {}, cfg);
    std::vector<double> u = r.overshoots;
    std::sort(u.begin(), u.end());
    const double n = static_cast<double>(u.size());
    double d = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
      const double f = 1.0 - k.tail_beyond(1.0 + u[i]) / total;
      d = std::max(d, std::fabs((static_cast<double>(i) + 1.0) / n - f));
      d = std::max(d, std::fabs(static_cast<double>(i) / n - f));
    }
    const double t = (std::sqrt(n) + 0.12 + 0.11 / std::sqrt(n)) * d;
    const double pval = kolmogorov_q(t);
    ok = ok && pval > 0.01;
    detail += ", ks p " + num(pval);
  }
  report("C4 overshoot law", ok, detail);
}

// Simulation vs analytic for the three reference configs: fill, cycle,
// total-cost and long-run quantities inside 3 standard errors at the pinned
// seeds, with 1e5 paths (1e4 for the full-policy discounted runs).
void check_simulation_agreement() {
  double worst_z = 0.0;
  const auto z = [&](const Estimate& e, double target) {
    const double s = std::max(e.std_error, 1e-300);
    const double zz = std::fabs(e.mean - target) / s;
    worst_z = std::max(worst_z, zz);
    return zz;
  };

  for (const char* file :
       {"brownian_reflected.json", "brownian_free.json", "cp_reflected.json"}) {
    RunConfig cfg = load_run_config(data_path(file));
    ScaleCache cache(*cfg.model, resolve_grid(cfg));
    const Policy& p = *cfg.policy;
    const CostSpec& spec = *cfg.cost;
    const double alpha = spec.alpha;

    SimConfig mc = cfg.sim;
    mc.n_paths = 100000;
    FillSimResult fill =
        simulate_fill(*cfg.model, p.lambda, p.tau, {alpha}, mc);
    z(fill.lt[0], lt_fill(cache, alpha, p.lambda, p.tau));
    z(fill.mean_time, mean_fill(cache, p.lambda, p.tau));

    CycleSimResult cyc = simulate_cycle(*cfg.model, p, spec, mc);
    z(cyc.lt_cycle, lt_cycle(cache, alpha, p, p.tau));
    z(cyc.mean_cycle, mean_cycle(cache, p));
    z(cyc.cost_discounted, cycle_cost_fill(cache, p, spec, p.tau));
    const double avg = longrun_average_cost(cache, p, spec);
    z(cyc.cost_undiscounted, avg * mean_cycle(cache, p));

    LongrunSimResult lr = simulate_longrun(*cfg.model, p, spec, 2500.0, cfg.sim);
    Estimate lre;
    lre.mean = lr.rate;
    lre.std_error = lr.std_error;
    z(lre, avg);

    SimConfig total_cfg = cfg.sim;
    total_cfg.n_paths = 10000;
    total_cfg.dt = 1e-3;
    Estimate total =
        simulate_total_discounted(*cfg.model, p, spec, p.tau, 100.0, total_cfg);
    z(total, total_discounted_cost(cache, p, spec, p.tau));
  }
  report("C5 simulation agreement on reference configs", worst_z < 3.0,
         "max |z| = " + num(worst_z) + " < 3");
}

// Release without a capacity wall: linear mean gap, exponential transform,
// and the finite-wall limit.
void check_release_without_wall() {
  ScaleCache cache(LevyModel::brownian(0.5, 1.0, false), GridSpec{1e-3, 70.0});
  Policy p;
  p.lambda = 1.0;
  p.tau = 0.2;
  p.M = 2.0;
  p.V = kInf;
  double worst = 0.0;
  worst = std::max(worst, rel_err(mean_release(cache, p, 1.0), 0.8 / 1.5));
  const double alpha = 0.4;
  const double m = 0.5 - 2.0;
  const double etaM = (m + std::sqrt(m * m + 2.0 * alpha)) / 1.0;
  worst = std::max(
      worst, rel_err(lt_release(cache, alpha, p, 1.0), std::exp(-etaM * 0.8)));
  Policy pw = p;
  pw.V = 60.0;
  worst = std::max(worst, std::fabs(mean_release(cache, pw, 1.0) -
                                    mean_release(cache, p, 1.0)));
  worst = std::max(worst, std::fabs(lt_release(cache, alpha, pw, 1.0) -
                                    lt_release(cache, alpha, p, 1.0)));

  ScaleCache weak(LevyModel::brownian(2.0, 1.0, false), GridSpec{1e-3, 10.0});
  Policy q = p;
  q.M = 1.0; // pump slower than the mean inflow: the gap never closes
  bool diverges = std::isinf(mean_release(weak, q, 1.0));
  // Exact balance point: pump rate equal to the mean inflow rate.
  ScaleCache even(LevyModel::brownian(1.0, 1.0, false), GridSpec{1e-3, 10.0});
  diverges = diverges && std::isinf(mean_release(even, q, 1.0));
  report("C6 release with no wall", worst < 1e-8 && diverges,
         "max error " + num(worst) + " < 1e-8, weak/balanced pump diverges: " +
             (diverges ? "yes" : "no"));
}

// alpha * total discounted cost tends to the long-run average.
void check_vanishing_discount() {
  RunConfig cfg = load_run_config(data_path("brownian_reflected.json"));
  ScaleCache cache(*cfg.model, resolve_grid(cfg));
  CostSpec spec = *cfg.cost;
  spec.alpha = 1e-3;
  const double total =
      total_discounted_cost(cache, *cfg.policy, spec, cfg.policy->tau);
  const double avg = longrun_average_cost(cache, *cfg.policy, *cfg.cost);
  const double gap = std::fabs(spec.alpha * total - avg) / avg;
  report("C7 vanishing discount limit", gap < 0.02,
         "relative gap " + num(gap) + " < 0.02 at alpha 1e-3");
}

// Renewal bound on the zero-rate scale function of every jump family:
// 1/drift <= W(x), W nondecreasing, W(x) (drift - int_0^x nu tail) <= 1.
void check_series_bounds() {
  struct Family {
    const char* name;
    LevyModel model;
    double drift;
    std::function<double(double)> tail_int;
  };
  std::vector<Family> families;
  families.push_back({"cp", cp_exp_model(false), 2.0, [](double x) {
                        return tail_integral_cp_exp(1.0, 1.0, x);
                      }});
  families.push_back(
      {"gamma", LevyModel::bounded_variation(1.0, GammaJumps{1.0, 2.0}, false),
       1.0, [](double x) { return tail_integral_gamma(1.0, 2.0, x); }});
  families.push_back(
      {"ig",
       LevyModel::bounded_variation(1.0, InverseGaussianJumps{1.0, 2.0}, false),
       1.0, [](double x) { return tail_integral_ig(1.0, 2.0, x); }});

  double worst = 0.0;
  for (const Family& fam : families) {
    ScaleTable t = build_scale_table(fam.model, 0.0, 4.0, 2e-3);
    double prev = 0.0;
    for (std::size_t k = 0; k < t.nodes(); ++k) {
      const double x = t.node_x(k);
      const double w = t.w_nodes()[k];
      worst = std::max(worst, w * (fam.drift - fam.tail_int(x)) - 1.0);
      worst = std::max(worst, 1.0 / fam.drift - w);
      if (k > 0) worst = std::max(worst, prev - w);
      prev = w;
    }
  }
  report("C8 renewal bounds on jump-family tables", worst < 1e-8,
         "max violation " + num(worst) + " < 1e-8");
}

// Policy search against a dense 500 x 500 brute-force sweep on two cost
// specs, one per objective, plus thread determinism of the full search.
void check_optimizer() {
  ScaleCache cache(LevyModel::brownian(0.0, 1.0, true), GridSpec{1e-3, 3.0});

  SearchSpec box;
  box.lambda_min = 0.3;
  box.lambda_max = 1.8;
  box.tau_min = 0.0;
  box.tau_max = 0.8;
  box.lambda_points = 13;
  box.tau_points = 9;
  box.refine_tol = 1e-4;
  box.M = 2.0;
  box.V = 2.0;

  struct Bench {
    const char* name;
    CostSpec spec;
    SearchSpec s;
  };
  std::vector<Bench> benches(2);
  benches[0].name = "longrun";
  benches[0].spec.K1 = 0.5;
  benches[0].spec.K2 = 0.5;
  benches[0].spec.R = 0.1;
  benches[0].spec.g = PiecewiseLinear({0.0, 3.0}, {0.0, 3.0});
  benches[0].spec.g_star = PiecewiseLinear({0.0, 3.0}, {0.0, 3.0});
  benches[0].s = box;
  benches[0].s.objective = Objective::kLongRunAverage;
  benches[1].name = "discounted";
  benches[1].spec.K1 = 2.0;
  benches[1].spec.K2 = 1.0;
  benches[1].spec.R = 0.3;
  benches[1].spec.alpha = 0.2;
  benches[1].spec.g = PiecewiseLinear({0.0, 3.0}, {0.2, 1.4});
  benches[1].spec.g_star = PiecewiseLinear::constant(0.5);
  benches[1].s = box;
  benches[1].s.objective = Objective::kTotalDiscounted;
  benches[1].s.x = 0.4;

  bool ok = true;
  std::string detail;
  for (Bench& b : benches) {
    b.s.threads = 1;
    SearchResult r1 = optimize_policy(cache, b.spec, b.s);
    b.s.threads = 4;
    SearchResult r4 = optimize_policy(cache, b.spec, b.s);
    const bool deterministic =
        r1.best.lambda == r4.best.lambda && r1.best.tau == r4.best.tau &&
        r1.cost == r4.cost;

    const int nl = 500, nt = 500;
    double bf_cost = kInf, bf_l = 0.0, bf_t = 0.0;
    for (int i = 0; i < nl; ++i) {
      const double l =
          b.s.lambda_min + (b.s.lambda_max - b.s.lambda_min) * i / (nl - 1);
      for (int j = 0; j < nt; ++j) {
        const double t = b.s.tau_min + (b.s.tau_max - b.s.tau_min) * j / (nt - 1);
        if (!(t < l)) continue;
        if (b.s.objective == Objective::kTotalDiscounted && t > b.s.x) continue;
        Policy p;
        p.lambda = l;
        p.tau = t;
        p.M = b.s.M;
        p.V = b.s.V;
        const double c = b.s.objective == Objective::kLongRunAverage
                             ? longrun_average_cost(cache, p, b.spec)
                             : total_discounted_cost(cache, p, b.spec, b.s.x);
        if (c < bf_cost) {
          bf_cost = c;
          bf_l = l;
          bf_t = t;
        }
      }
    }
    const double l_step = (b.s.lambda_max - b.s.lambda_min) / (nl - 1);
    const double t_step = (b.s.tau_max - b.s.tau_min) / (nt - 1);
    const bool close =
        std::fabs(r1.cost - bf_cost) <= b.s.refine_tol &&
        std::fabs(r1.best.lambda - bf_l) < l_step + b.s.refine_tol &&
        std::fabs(r1.best.tau - bf_t) < t_step + b.s.refine_tol;
    ok = ok && close && deterministic;
    if (!detail.empty()) detail += ", ";
    detail += std::string(b.name) + " cost gap " + num(r1.cost - bf_cost) +
              ", coord gaps " + num(std::fabs(r1.best.lambda - bf_l)) + "/" +
              num(std::fabs(r1.best.tau - bf_t)) +
              (deterministic ? "" : ", THREAD-UNSTABLE");
  }
  report("C9 policy search vs 500x500 brute force", ok, detail);
}

// Bitwise reproducibility of the simulators across reruns and thread counts.
void check_simulation_determinism() {
  LevyModel model = cp_exp_model(true);
  SimConfig cfg;
  cfg.n_paths = 4000;
  cfg.seed = 500;
  cfg.threads = 1;
  FillSimResult a = simulate_fill(model, 1.0, 0.3, {0.2, 1.0}, cfg);
  cfg.threads = 3;
  FillSimResult b = simulate_fill(model, 1.0, 0.3, {0.2, 1.0}, cfg);
  FillSimResult c = simulate_fill(model, 1.0, 0.3, {0.2, 1.0}, cfg);
  bool ok = a.mean_time.mean == b.mean_time.mean &&
            a.mean_time.std_error == b.mean_time.std_error &&
            a.lt[0].mean == b.lt[0].mean && a.lt[1].mean == b.lt[1].mean &&
            b.mean_time.mean == c.mean_time.mean &&
            a.overshoots.size() == b.overshoots.size();
  if (ok)
    for (std::size_t i = 0; i < a.overshoots.size(); ++i)
      ok = ok && a.overshoots[i] == b.overshoots[i];

  Policy p;
  p.lambda = 1.0;
  p.tau = 0.3;
  p.M = 1.0;
  p.V = 2.0;
  CostSpec spec;
  spec.K1 = spec.K2 = 1.0;
  spec.R = 0.5;
  spec.alpha = 0.1;
  spec.g = PiecewiseLinear::constant(0.1);
  spec.g_star = PiecewiseLinear::constant(0.1);
  SimConfig cy;
  cy.n_paths = 2000;
  cy.seed = 7;
  cy.threads = 1;
  CycleSimResult d = simulate_cycle(model, p, spec, cy);
  cy.threads = 2;
  CycleSimResult e = simulate_cycle(model, p, spec, cy);
  ok = ok && d.lt_cycle.mean == e.lt_cycle.mean &&
       d.cost_discounted.mean == e.cost_discounted.mean &&
       d.cost_discounted.std_error == e.cost_discounted.std_error;
  report("C10 simulation determinism", ok,
         ok ? "bitwise equal across reruns and 1/2/3 threads"
            : "results differ");
}

} // namespace

int main() {
  check_transform_inversion();
  check_brownian_closed_forms();
  check_killing_identity();
  check_overshoot_law();
  check_simulation_agreement();
  check_release_without_wall();
  check_vanishing_discount();
  check_series_bounds();
  check_optimizer();
  check_simulation_determinism();
  if (g_failures == 0)
    std::printf("all checks passed\n");
  else
    std::printf("%d check(s) failed\n", g_failures);
  return g_failures;
}
