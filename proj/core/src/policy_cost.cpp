#include "dam/policy_cost.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "dam/errors.hpp"

namespace dam {

namespace {

void require(bool ok, const char* msg) {
  if (!ok) throw ConfigError(msg);
}

// int_a^b g(y) W(y - shift) dy. The constant part of each linear piece goes
// through Wbar differences (exact for the table's interpolant, including the
// kink of W at y = shift); only the slope part needs quadrature.
double integral_g_w(const ScaleTable& T, const PiecewiseLinear& g, double a,
                    double b, double shift) {
  if (g.empty() || !(b > a)) return 0.0;
  std::vector<double> cuts = g.breakpoints_in(a, b);
  cuts.insert(cuts.begin(), a);
  cuts.push_back(b);

  double total = 0.0;
  for (std::size_t p = 0; p + 1 < cuts.size(); ++p) {
    const double pa = cuts[p];
    const double pb = cuts[p + 1];
    if (!(pb > pa)) continue;
    const double ga = g(pa);
    const double gb = g(pb);
    total += ga * (T.wbar(pb - shift) - T.wbar(pa - shift));
    const double slope = (gb - ga) / (pb - pa);
    if (slope != 0.0) {
      const auto n = std::max<std::size_t>(
          2, static_cast<std::size_t>(std::ceil((pb - pa) / T.h())));
      const double hh = (pb - pa) / static_cast<double>(n);
      double s = 0.0;
      for (std::size_t k = 0; k <= n; ++k) {
        const double y = pa + hh * static_cast<double>(k);
        const double w = (k == 0 || k == n) ? 0.5 : 1.0;
        s += w * (y - pa) * T.w(y - shift);
      }
      total += slope * s * hh;
    }
  }
  return total;
}

// int_(a, b] g(y) dW(y), by parts per linear piece; exact for the table's
// interpolant. The atom of W at zero is the caller's business.
double integral_g_dw(const ScaleTable& T, const PiecewiseLinear& g, double a,
                     double b) {
  if (g.empty() || !(b > a)) return 0.0;
  std::vector<double> cuts = g.breakpoints_in(a, b);
  cuts.insert(cuts.begin(), a);
  cuts.push_back(b);

  double total = 0.0;
  for (std::size_t p = 0; p + 1 < cuts.size(); ++p) {
    const double pa = cuts[p];
    const double pb = cuts[p + 1];
    if (!(pb > pa)) continue;
    const double ga = g(pa);
    const double gb = g(pb);
    total += ga * (T.w(pb) - T.w(pa));
    const double slope = (gb - ga) / (pb - pa);
    if (slope != 0.0)
      total += slope * ((pb - pa) * T.w(pb) - (T.wbar(pb) - T.wbar(pa)));
  }
  return total;
}

// int_{-inf}^{b} g(y) e^{-eta (lambda - y)} dy, eta > 0; g is flat below its
// first knot, so the unbounded piece closes in one term.
double integral_g_exp(const PiecewiseLinear& g, double lambda, double eta,
                      double b) {
  if (g.empty()) return 0.0;
  const double k1 = g.knots().front();
  const double lo = std::min(k1, b);
  double total = g(lo) * std::exp(-eta * (lambda - lo)) / eta;
  if (b <= k1) return total;

  std::vector<double> cuts = g.breakpoints_in(k1, b);
  cuts.insert(cuts.begin(), k1);
  cuts.push_back(b);
  for (std::size_t p = 0; p + 1 < cuts.size(); ++p) {
    const double pa = cuts[p];
    const double pb = cuts[p + 1];
    if (!(pb > pa)) continue;
    const double ga = g(pa);
    const double gb = g(pb);
    const double slope = (gb - ga) / (pb - pa);
    const double ea = std::exp(-eta * (lambda - pa));
    const double eb = std::exp(-eta * (lambda - pb));
    total += (gb * eb - ga * ea) / eta - slope * (eb - ea) / (eta * eta);
  }
  return total;
}

double penalty_fill_at(ScaleCache& cache, const PiecewiseLinear& g,
                       double lambda, double alpha, double x) {
  if (g.empty()) return 0.0;
  const ScaleTable& T = cache.table(alpha);
  if (cache.model().reflected()) {
    const double coef = T.w(lambda - x) / T.wprime(lambda);
    return g(0.0) * coef * T.w_at_zero() +
           coef * integral_g_dw(T, g, 0.0, lambda) -
           integral_g_w(T, g, 0.0, lambda, x);
  }
  const double eta = T.eta();
  if (!(eta > 0.0)) return kInf; // fill never completes, cost accrues forever
  return T.w(lambda - x) * integral_g_exp(g, lambda, eta, lambda) -
         integral_g_w(T, g, x, lambda, x);
}

double penalty_release_at(ScaleCache& cache, const PiecewiseLinear& g,
                          const Policy& policy, double alpha, double x) {
  if (g.empty()) return 0.0;
  require(policy.finite_v(), "release holding cost requires finite V");
  const ScaleTable& TM = cache.table(alpha, policy.M);
  const double ratio = TM.z(policy.V - x) / TM.z(policy.V - policy.tau);
  return ratio * integral_g_w(TM, g, policy.tau, policy.V, policy.tau) -
         integral_g_w(TM, g, policy.tau, policy.V, x);
}

} // namespace

double penalty_fill(ScaleCache& cache, const Policy& policy,
                    const CostSpec& spec, double x) {
  policy.validate();
  spec.validate();
  require(x <= policy.lambda, "penalty_fill: x must be <= lambda");
  if (cache.model().reflected())
    require(x >= 0.0, "penalty_fill: x must be >= 0 for a reflected model");
  return penalty_fill_at(cache, spec.g, policy.lambda, spec.alpha, x);
}

double penalty_release(ScaleCache& cache, const Policy& policy,
                       const CostSpec& spec, double x) {
  policy.validate();
  spec.validate();
  require(policy.tau <= x && (!policy.finite_v() || x <= policy.V),
          "penalty_release: x outside [tau, V]");
  return penalty_release_at(cache, spec.g_star, policy, spec.alpha, x);
}

double cycle_cost_release(ScaleCache& cache, const Policy& policy,
                          const CostSpec& spec, double x) {
  policy.validate();
  spec.validate();
  require(policy.tau <= x && (!policy.finite_v() || x <= policy.V),
          "cycle_cost_release: x outside [tau, V]");
  double reward;
  if (spec.alpha > 0.0) {
    const double lt = lt_release(cache, spec.alpha, policy, x);
    reward = spec.R * policy.M * (1.0 - lt) / spec.alpha;
  } else {
    reward = spec.R * policy.M * mean_release(cache, policy, x);
  }
  return policy.M * spec.K1 - reward +
         penalty_release_at(cache, spec.g_star, policy, spec.alpha, x);
}

double cycle_cost_fill(ScaleCache& cache, const Policy& policy,
                       const CostSpec& spec, double x) {
  policy.validate();
  spec.validate();
  require(policy.tau <= x && x <= policy.lambda,
          "cycle_cost_fill: x outside [tau, lambda]");
  if (!(spec.alpha > 0.0))
    throw ConfigError(
        "cycle_cost_fill requires alpha > 0; use longrun_average_cost for "
        "the undiscounted rate");
  const double alpha = spec.alpha;
  const OvershootKernel k = overshoot(cache, alpha, policy.lambda, x,
                                      default_z_max(cache.model(), policy));
  const double ltf = lt_fill(cache, alpha, policy.lambda, x);
  const double ltc = lt_cycle_with_kernel(cache, k, policy);
  double pen_rel = 0.0;
  if (!spec.g_star.empty())
    pen_rel = k.integrate_capped(policy.V, [&](double z) {
      return penalty_release_at(cache, spec.g_star, policy, alpha, z);
    });
  return policy.M * (spec.K2 + spec.K1 * ltf) -
         policy.M * spec.R * (ltf - ltc) / alpha +
         penalty_fill_at(cache, spec.g, policy.lambda, alpha, x) + pen_rel;
}

double total_discounted_cost(ScaleCache& cache, const Policy& policy,
                             const CostSpec& spec, double x) {
  policy.validate();
  spec.validate();
  if (!(spec.alpha > 0.0))
    throw ConfigError("total_discounted_cost requires alpha > 0");
  require(x >= policy.tau, "total_discounted_cost: x must be >= tau");
  require(!policy.finite_v() || x <= policy.V,
          "total_discounted_cost: x must be <= V");

  const double lt_ret = lt_cycle(cache, spec.alpha, policy, policy.tau);
  const double denom = 1.0 - lt_ret;
  if (!(denom > 1e-12))
    throw NumericError("total_discounted_cost: renewal sum diverges "
                       "(cycle transform at tau is 1)");
  const double c_tau = cycle_cost_fill(cache, policy, spec, policy.tau);

  double c_x, lt_x;
  if (x <= policy.lambda) {
    c_x = (x == policy.tau) ? c_tau : cycle_cost_fill(cache, policy, spec, x);
    lt_x = (x == policy.tau) ? lt_ret : lt_cycle(cache, spec.alpha, policy, x);
  } else {
    c_x = cycle_cost_release(cache, policy, spec, x);
    lt_x = lt_release(cache, spec.alpha, policy, x);
  }
  return c_x + lt_x * c_tau / denom;
}

double longrun_average_cost(ScaleCache& cache, const Policy& policy,
                            const CostSpec& spec) {
  policy.validate();
  spec.validate();
  const double mf = mean_fill(cache, policy.lambda, policy.tau);
  if (!std::isfinite(mf)) return kInf;
  if (!policy.finite_v() && !(policy.M > cache.model().mean_rate()))
    return kInf;

  const OvershootKernel k0 =
      overshoot(cache, 0.0, policy.lambda, policy.tau,
                default_z_max(cache.model(), policy));
  const double mrel = k0.integrate_capped(
      policy.V, [&](double z) { return mean_release(cache, policy, z); });
  const double mc = mf + mrel;

  double num = policy.M * (spec.K1 + spec.K2) - policy.M * spec.R * mrel;
  if (!spec.g.empty())
    num += penalty_fill_at(cache, spec.g, policy.lambda, 0.0, policy.tau);
  if (!spec.g_star.empty())
    num += k0.integrate_capped(policy.V, [&](double z) {
      return penalty_release_at(cache, spec.g_star, policy, 0.0, z);
    });
  return num / mc;
}

} // namespace dam
