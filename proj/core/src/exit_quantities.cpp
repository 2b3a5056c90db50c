#include "dam/exit_quantities.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "dam/errors.hpp"
#include "dam/quadrature.hpp"

namespace dam {

namespace {

void require(bool ok, const char* msg) {
  if (!ok) throw ConfigError(msg);
}

struct Grid {
  double lo = 0.0;
  double hi = 0.0;
  double step = 0.0;
  std::size_t cells = 0;
  double node(std::size_t k) const { return lo + step * static_cast<double>(k); }
  double mid(std::size_t j) const {
    return lo + step * (static_cast<double>(j) + 0.5);
  }
};

Grid make_grid(double lo, double hi, double target_h) {
  Grid g;
  g.lo = lo;
  g.hi = hi;
  const double len = hi - lo;
  auto n = static_cast<std::size_t>(std::ceil(len / target_h - 1e-9));
  g.cells = std::max<std::size_t>(n, 2);
  g.step = len / static_cast<double>(g.cells);
  return g;
}

} // namespace

double eta_root_cached(ScaleCache& cache, double alpha, double M) {
  return eta_root(cache.model_with_drift(M), alpha);
}

// ---------------------------------------------------------------------------
// Pointwise potential densities

double potential_two_sided(ScaleCache& cache, double alpha, double a,
                           double lambda, double x, double y) {
  require(a < lambda, "potential_two_sided: a must be < lambda");
  require(a <= x && x <= lambda, "potential_two_sided: x outside [a, lambda]");
  require(a <= y && y <= lambda, "potential_two_sided: y outside [a, lambda]");
  const ScaleTable& T = cache.table(alpha);
  return T.w(lambda - x) * T.w(y - a) / T.w(lambda - a) - T.w(y - x);
}

double potential_free(ScaleCache& cache, double alpha, double lambda, double x,
                      double y) {
  require(x <= lambda, "potential_free: x must be <= lambda");
  require(y <= lambda, "potential_free: y must be <= lambda");
  const ScaleTable& T = cache.table(alpha);
  const double eta = T.eta();
  return T.w(lambda - x) * std::exp(-eta * (lambda - y)) - T.w(y - x);
}

double potential_reflected_density(ScaleCache& cache, double alpha,
                                   double lambda, double x, double y) {
  require(0.0 <= x && x <= lambda,
          "potential_reflected: x outside [0, lambda]");
  require(0.0 <= y && y <= lambda,
          "potential_reflected: y outside [0, lambda]");
  const ScaleTable& T = cache.table(alpha);
  return T.w(lambda - x) * T.wprime(y) / T.wprime(lambda) - T.w(y - x);
}

double potential_release(ScaleCache& cache, double alpha, const Policy& policy,
                         double x, double y) {
  policy.validate();
  require(x >= policy.tau && y >= policy.tau,
          "potential_release: x, y must be >= tau");
  const ScaleTable& TM = cache.table(alpha, policy.M);
  if (policy.finite_v()) {
    require(x <= policy.V && y <= policy.V,
            "potential_release: x, y must be <= V");
    return TM.z(policy.V - x) * TM.w(y - policy.tau) / TM.z(policy.V - policy.tau) -
           TM.w(y - x);
  }
  const double decay =
      alpha > 0.0
          ? std::exp(-eta_root_cached(cache, alpha, policy.M) * (x - policy.tau))
          : 1.0;
  return decay * TM.w(y - policy.tau) - TM.w(y - x);
}

// ---------------------------------------------------------------------------
// Potential measures

PotentialMeasure potential_two_sided_measure(ScaleCache& cache, double alpha,
                                             double a, double lambda,
                                             double x) {
  require(a < lambda, "potential_two_sided: a must be < lambda");
  require(a <= x && x <= lambda, "potential_two_sided: x outside [a, lambda]");
  const ScaleTable& T = cache.table(alpha);
  const Grid g = make_grid(a, lambda, cache.grid().h);

  PotentialMeasure m;
  m.lo = a;
  m.hi = lambda;
  m.y.resize(g.cells + 1);
  m.density.resize(g.cells + 1);
  const double wlx = T.w(lambda - x);
  const double wla = T.w(lambda - a);
  for (std::size_t k = 0; k <= g.cells; ++k) {
    const double y = g.node(k);
    m.y[k] = y;
    m.density[k] = wlx * T.w(y - a) / wla - T.w(y - x);
  }
  m.mass = wlx * T.wbar(lambda - a) / wla - T.wbar(lambda - x);
  return m;
}

PotentialMeasure potential_reflected_measure(ScaleCache& cache, double alpha,
                                             double lambda, double x) {
  require(0.0 <= x && x <= lambda,
          "potential_reflected: x outside [0, lambda]");
  const ScaleTable& T = cache.table(alpha);
  const Grid g = make_grid(0.0, lambda, cache.grid().h);

  PotentialMeasure m;
  m.lo = 0.0;
  m.hi = lambda;
  const double wlx = T.w(lambda - x);
  const double wp = T.wprime(lambda);
  m.atom_location = 0.0;
  m.atom_mass = wlx * T.w_at_zero() / wp;
  m.y.resize(g.cells + 1);
  m.density.resize(g.cells + 1);
  for (std::size_t k = 0; k <= g.cells; ++k) {
    const double y = g.node(k);
    m.y[k] = y;
    m.density[k] = wlx * T.wprime(y) / wp - T.w(y - x);
  }
  m.mass = m.atom_mass + wlx * (T.w(lambda) - T.w_at_zero()) / wp -
           T.wbar(lambda - x);
  return m;
}

PotentialMeasure potential_release_measure(ScaleCache& cache, double alpha,
                                           const Policy& policy, double x) {
  policy.validate();
  require(policy.finite_v(), "potential_release measure requires finite V");
  require(policy.tau <= x && x <= policy.V,
          "potential_release: x outside [tau, V]");
  const ScaleTable& TM = cache.table(alpha, policy.M);
  const Grid g = make_grid(policy.tau, policy.V, cache.grid().h);

  PotentialMeasure m;
  m.lo = policy.tau;
  m.hi = policy.V;
  const double ratio = TM.z(policy.V - x) / TM.z(policy.V - policy.tau);
  m.y.resize(g.cells + 1);
  m.density.resize(g.cells + 1);
  for (std::size_t k = 0; k <= g.cells; ++k) {
    const double y = g.node(k);
    m.y[k] = y;
    m.density[k] = ratio * TM.w(y - policy.tau) - TM.w(y - x);
  }
  m.mass = ratio * TM.wbar(policy.V - policy.tau) - TM.wbar(policy.V - x);
  return m;
}

// ---------------------------------------------------------------------------
// Exit transforms

std::pair<double, double> lt_two_sided(ScaleCache& cache, double alpha,
                                       double a, double lambda, double x) {
  require(a < lambda, "lt_two_sided: a must be < lambda");
  require(a <= x && x <= lambda, "lt_two_sided: x outside [a, lambda]");
  const ScaleTable& T = cache.table(alpha);
  const double ratio = T.w(lambda - x) / T.w(lambda - a);
  const double up = T.z(lambda - x) - T.z(lambda - a) * ratio;
  return {up, ratio};
}

double lt_fill_free(ScaleCache& cache, double alpha, double lambda, double x) {
  require(x <= lambda, "lt_fill_free: x must be <= lambda");
  const ScaleTable& T = cache.table(alpha);
  double coeff;
  if (alpha > 0.0) {
    coeff = alpha / T.eta();
  } else {
    // alpha = 0: the transform is the crossing probability. With positive
    // mean rate the level is reached almost surely; otherwise the defect is
    // phi'(0+) W(lambda - x).
    coeff = T.eta() > 0.0 ? 0.0 : cache.model().laplace_exponent_derivative(0.0);
  }
  return T.z(lambda - x) - coeff * T.w(lambda - x);
}

double lt_fill_reflected(ScaleCache& cache, double alpha, double lambda,
                         double x) {
  require(0.0 <= x && x <= lambda, "lt_fill_reflected: x outside [0, lambda]");
  const ScaleTable& T = cache.table(alpha);
  return T.z(lambda - x) -
         alpha * T.w(lambda - x) * T.w(lambda) / T.wprime(lambda);
}

double lt_fill(ScaleCache& cache, double alpha, double lambda, double x) {
  return cache.model().reflected() ? lt_fill_reflected(cache, alpha, lambda, x)
                                   : lt_fill_free(cache, alpha, lambda, x);
}

double mean_fill_free(ScaleCache& cache, double lambda, double x) {
  require(x <= lambda, "mean_fill_free: x must be <= lambda");
  const ScaleTable& T = cache.table(0.0);
  const double eta0 = T.eta();
  if (!(eta0 > 0.0)) return kInf; // nonpositive mean rate: no finite fill
  return T.w(lambda - x) / eta0 - T.wbar(lambda - x);
}

double mean_fill_reflected(ScaleCache& cache, double lambda, double x) {
  require(0.0 <= x && x <= lambda, "mean_fill_reflected: x outside [0, lambda]");
  const ScaleTable& T = cache.table(0.0);
  return T.w(lambda - x) * T.w(lambda) / T.wprime(lambda) - T.wbar(lambda - x);
}

double mean_fill(ScaleCache& cache, double lambda, double x) {
  return cache.model().reflected() ? mean_fill_reflected(cache, lambda, x)
                                   : mean_fill_free(cache, lambda, x);
}

double lt_release(ScaleCache& cache, double alpha, const Policy& policy,
                  double x) {
  policy.validate();
  require(x >= policy.tau, "lt_release: x must be >= tau");
  if (policy.finite_v()) {
    require(x <= policy.V, "lt_release: x must be <= V");
    const ScaleTable& TM = cache.table(alpha, policy.M);
    return TM.z(policy.V - x) / TM.z(policy.V - policy.tau);
  }
  // No cap: ratio limit exp(-eta_M(alpha) (x - tau)). At alpha = 0 this is
  // the probability the level tau is ever reached again.
  const double etaM = eta_root_cached(cache, alpha, policy.M);
  return std::exp(-etaM * (x - policy.tau));
}

double mean_release(ScaleCache& cache, const Policy& policy, double x) {
  policy.validate();
  require(x >= policy.tau, "mean_release: x must be >= tau");
  if (policy.finite_v()) {
    require(x <= policy.V, "mean_release: x must be <= V");
    const ScaleTable& TM = cache.table(0.0, policy.M);
    return TM.wbar(policy.V - policy.tau) - TM.wbar(policy.V - x);
  }
  const double net = policy.M - cache.model().mean_rate();
  if (!(net > 0.0)) return kInf;
  return (x - policy.tau) / net;
}

// ---------------------------------------------------------------------------
// Overshoot kernels

double OvershootKernel::tail_beyond(double z_from) const {
  double s = 0.0;
  for (std::size_t i = 0; i < tail_y_.size(); ++i) {
    const double c = tail_c_[i];
    if (c == 0.0) continue;
    s += c * model_.levy_tail(std::max(z_from - tail_y_[i], 0.0));
  }
  return std::max(s, 0.0);
}

double OvershootKernel::total_mass() const {
  double s = atom_;
  if (z_.size() >= 2) {
    s += trapezoid(density_, h_);
    s += tail_beyond(z_.back());
  }
  return s;
}

double OvershootKernel::integrate_capped(
    double cap, const std::function<double(double)>& f) const {
  require(cap >= lambda_, "overshoot integral: cap must be >= lambda");
  double s = atom_ * f(lambda_);
  if (z_.size() >= 2) {
    const double z_end = z_.back();
    const double zc = std::min(cap, z_end);
    double fprev = f(z_[0]);
    std::size_t i = 0;
    while (i + 1 < z_.size() && z_[i + 1] <= zc) {
      const double fn = f(z_[i + 1]);
      s += 0.5 * (z_[i + 1] - z_[i]) *
           (density_[i] * fprev + density_[i + 1] * fn);
      fprev = fn;
      ++i;
    }
    if (i + 1 < z_.size() && zc > z_[i]) {
      const double t = (zc - z_[i]) / (z_[i + 1] - z_[i]);
      const double dc = density_[i] + t * (density_[i + 1] - density_[i]);
      s += 0.5 * (zc - z_[i]) * (density_[i] * fprev + dc * f(zc));
    }
    // Everything beyond the cap lands at the cap; beyond the grid the tail
    // weights are exact, so a grid reaching the cap loses nothing.
    const double fc = std::isfinite(cap) ? f(cap) : f(z_end);
    s += tail_beyond(zc) * fc;
  }
  return s;
}

OvershootKernel make_atom_kernel(const LevyModel& model, double lambda,
                                 double alpha, double mass) {
  OvershootKernel k(model);
  k.lambda_ = lambda;
  k.alpha_ = alpha;
  k.atom_ = mass;
  return k;
}

OvershootKernel overshoot_free(ScaleCache& cache, double alpha, double lambda,
                               double x, double z_max) {
  require(x <= lambda, "overshoot_free: x must be <= lambda");
  require(z_max > lambda, "overshoot_free: z_max must be > lambda");
  const LevyModel& model = cache.model();
  if (model.is_brownian())
    return make_atom_kernel(model, lambda, alpha,
                            lt_fill_free(cache, alpha, lambda, x));

  const ScaleTable& T = cache.table(alpha);
  const double h = cache.grid().h;
  const double eta = T.eta();
  const double wlx = T.w(lambda - x);
  const double jm = model.jump_mean();

  // Cut the y-integral where the dropped kernel mass, bounded by
  // W(lambda - x) jm (1 - F_ladder(s)), falls below 1e-12.
  const double frac = 1e-12 / std::max(1.0, wlx * jm);
  double s_cut = 1.0;
  while (model.ladder_pair(s_cut).F < 1.0 - frac && s_cut < 1e9) s_cut *= 2.0;
  if (s_cut > 1.0) {
    double lo = 0.5 * s_cut, hi = s_cut;
    for (int it = 0; it < 60; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (model.ladder_pair(mid).F < 1.0 - frac)
        lo = mid;
      else
        hi = mid;
    }
    s_cut = hi;
  }

  const Grid gy = make_grid(lambda - s_cut, lambda, h);
  const Grid gz = make_grid(lambda, z_max, h);

  OvershootKernel k(model);
  k.lambda_ = lambda;
  k.alpha_ = alpha;
  k.h_ = gz.step;
  k.atom_ = 0.0; // jumps never cross continuously

  k.tail_y_.resize(gy.cells);
  k.tail_c_.resize(gy.cells);
  for (std::size_t j = 0; j < gy.cells; ++j) {
    const double ym = gy.mid(j);
    const double u =
        std::max(0.0, wlx * std::exp(-eta * (lambda - ym)) - T.w(ym - x));
    k.tail_y_[j] = ym;
    k.tail_c_[j] = gy.step * u; // midpoint cell weight
  }

  k.z_.resize(gz.cells + 1);
  k.density_.resize(gz.cells + 1);
  for (std::size_t i = 0; i <= gz.cells; ++i) {
    const double z = gz.node(i);
    double d = 0.0;
    for (std::size_t j = 0; j < gy.cells; ++j) {
      const double c = k.tail_c_[j];
      if (c == 0.0) continue;
      d += c * model.levy_density(z - k.tail_y_[j]);
    }
    k.z_[i] = z;
    k.density_[i] = std::max(d, 0.0);
  }
  return k;
}

OvershootKernel overshoot_reflected(ScaleCache& cache, double alpha,
                                    double lambda, double x, double z_max) {
  require(0.0 <= x && x <= lambda, "overshoot_reflected: x outside [0, lambda]");
  require(z_max > lambda, "overshoot_reflected: z_max must be > lambda");
  const LevyModel& model = cache.model();
  if (model.is_brownian())
    return make_atom_kernel(model, lambda, alpha,
                            lt_fill_reflected(cache, alpha, lambda, x));

  const ScaleTable& T = cache.table(alpha);
  const double h = cache.grid().h;
  const double wp = T.wprime(lambda);
  if (!(wp > 0.0))
    throw NumericError("overshoot_reflected: W'(lambda) is not positive");
  const double w0 = T.w_at_zero();
  const double wlx = T.w(lambda - x);

  const Grid gy = make_grid(0.0, lambda, h);
  const Grid gz = make_grid(lambda, z_max, h);

  OvershootKernel k(model);
  k.lambda_ = lambda;
  k.alpha_ = alpha;
  k.h_ = gz.step;

  // One row for the W atom at 0, one per cell combining the dW Stieltjes
  // mass (exact cell masses, midpoint evaluation) and the -W(y - x) part.
  k.tail_y_.reserve(gy.cells + 1);
  k.tail_c_.reserve(gy.cells + 1);
  k.tail_y_.push_back(0.0);
  k.tail_c_.push_back(wlx * w0 / wp);
  for (std::size_t j = 0; j < gy.cells; ++j) {
    const double ym = gy.mid(j);
    const double dW = T.w(gy.node(j + 1)) - T.w(gy.node(j));
    k.tail_y_.push_back(ym);
    k.tail_c_.push_back(wlx * dW / wp - gy.step * T.w(ym - x));
  }

  k.z_.resize(gz.cells + 1);
  k.density_.resize(gz.cells + 1);
  for (std::size_t i = 0; i <= gz.cells; ++i) {
    const double z = gz.node(i);
    double d = 0.0;
    for (std::size_t j = 0; j < k.tail_y_.size(); ++j) {
      const double c = k.tail_c_[j];
      if (c == 0.0) continue;
      d += c * model.levy_density(z - k.tail_y_[j]);
    }
    k.z_[i] = z;
    k.density_[i] = std::max(d, 0.0);
  }

  // Atom at lambda: creeping mass, recovered as the total transform minus
  // the jump part. Small negatives are quadrature noise.
  const double vr = T.z(lambda - x) - alpha * wlx * T.w(lambda) / wp;
  double atom = vr - k.tail_beyond(lambda);
  if (atom < 0.0) {
    if (atom < -1e-5 * std::max(1.0, std::abs(vr)))
      throw NumericError("overshoot_reflected: atom mass " +
                         std::to_string(atom) + " below tolerance");
    atom = 0.0;
  }
  k.atom_ = atom;
  return k;
}

OvershootKernel overshoot(ScaleCache& cache, double alpha, double lambda,
                          double x, double z_max) {
  return cache.model().reflected()
             ? overshoot_reflected(cache, alpha, lambda, x, z_max)
             : overshoot_free(cache, alpha, lambda, x, z_max);
}

// ---------------------------------------------------------------------------
// Cycle quantities

double default_z_max(const LevyModel& model, const Policy& policy) {
  if (model.is_brownian()) return policy.lambda + 1.0; // atom-only kernel
  if (policy.finite_v()) return policy.V + 1e-2;
  return policy.lambda + model.tail_quantile(1e-9) + 5.0;
}

double lt_cycle_with_kernel(ScaleCache& cache, const OvershootKernel& k,
                            const Policy& policy) {
  const double alpha = k.alpha();
  if (policy.finite_v()) {
    const ScaleTable& TM = cache.table(alpha, policy.M);
    const double denom = TM.z(policy.V - policy.tau);
    return k.integrate_capped(
               policy.V, [&](double z) { return TM.z(policy.V - z); }) /
           denom;
  }
  if (alpha == 0.0) return k.total_mass();
  const double etaM = eta_root_cached(cache, alpha, policy.M);
  return k.integrate_capped(kInf, [&](double z) {
    return std::exp(-etaM * (z - policy.tau));
  });
}

double lt_cycle(ScaleCache& cache, double alpha, const Policy& policy,
                double x) {
  policy.validate();
  require(alpha >= 0.0, "lt_cycle: alpha must be >= 0");
  require(policy.tau <= x && x <= policy.lambda,
          "lt_cycle: x outside [tau, lambda]");
  const OvershootKernel k = overshoot(cache, alpha, policy.lambda, x,
                                      default_z_max(cache.model(), policy));
  return lt_cycle_with_kernel(cache, k, policy);
}

double mean_cycle(ScaleCache& cache, const Policy& policy) {
  policy.validate();
  const double mf = mean_fill(cache, policy.lambda, policy.tau);
  if (!std::isfinite(mf)) return kInf;
  if (!policy.finite_v() && !(policy.M > cache.model().mean_rate()))
    return kInf; // release from any level never ends in mean
  const OvershootKernel k0 =
      overshoot(cache, 0.0, policy.lambda, policy.tau,
                default_z_max(cache.model(), policy));
  const double rel = k0.integrate_capped(
      policy.V, [&](double z) { return mean_release(cache, policy, z); });
  return mf + rel;
}

} // namespace dam
