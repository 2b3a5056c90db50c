#include "dam/scale_table.hpp"

#include <cmath>
#include <string>

#include "dam/quadrature.hpp"

namespace dam {

namespace {

constexpr double kSeriesTol = 1e-10;
constexpr int kMaxLadderTerms = 20000;
constexpr int kMaxAlphaTerms = 2000;

} // namespace

double ScaleTable::interp(const std::vector<double>& a, double x) const {
  const double u = x / h_;
  std::size_t i = static_cast<std::size_t>(u);
  if (i + 1 >= a.size()) i = a.size() - 2; // includes the one-cell overhang
  const double t = u - static_cast<double>(i);
  return a[i] + t * (a[i + 1] - a[i]);
}

double ScaleTable::w(double x) const {
  if (x < 0.0) return 0.0;
  if (closed_form_) {
    if (delta_ == 0.0) return 2.0 * x / sigma2_;
    const double ap = (mu_ + delta_) / sigma2_;
    const double am = (mu_ - delta_) / sigma2_;
    return (std::exp(ap * x) - std::exp(am * x)) / delta_;
  }
  if (x > x_max_ + h_)
    throw NumericError("scale table: x=" + std::to_string(x) +
                       " beyond range; rebuild with larger x_max");
  return interp(wn_, x);
}

double ScaleTable::z(double x) const {
  if (x <= 0.0) return 1.0;
  if (alpha_ == 0.0) return 1.0;
  if (closed_form_) {
    const double ap = (mu_ + delta_) / sigma2_;
    const double am = (mu_ - delta_) / sigma2_;
    const double r = mu_ / delta_;
    return 0.5 * ((1.0 - r) * std::exp(ap * x) + (1.0 + r) * std::exp(am * x));
  }
  return 1.0 + alpha_ * wbar(x);
}

double ScaleTable::wbar(double x) const {
  if (x <= 0.0) return 0.0;
  if (closed_form_) {
    if (alpha_ > 0.0) return (z(x) - 1.0) / alpha_;
    if (mu_ == 0.0) return x * x / sigma2_;
    return (sigma2_ / (2.0 * mu_ * mu_)) * std::expm1(2.0 * mu_ * x / sigma2_) -
           x / mu_;
  }
  if (x > x_max_ + h_)
    throw NumericError("scale table: x beyond range; rebuild with larger x_max");
  // Trapezoid-consistent between nodes: integral of the interpolated W.
  const double u = x / h_;
  std::size_t i = static_cast<std::size_t>(u);
  if (i + 1 >= wn_.size()) i = wn_.size() - 2;
  const double xi = h_ * static_cast<double>(i);
  return wbarn_[i] + 0.5 * (x - xi) * (wn_[i] + w(x));
}

double ScaleTable::wprime(double x) const {
  if (!(x >= 0.0)) throw ConfigError("wprime: x must be >= 0");
  if (closed_form_) {
    if (delta_ == 0.0) return 2.0 / sigma2_;
    const double b = delta_ / sigma2_;
    return (mu_ / sigma2_) * w(x) +
           (2.0 / sigma2_) * std::exp(mu_ * x / sigma2_) * std::cosh(b * x);
  }
  if (x > x_max_ + h_)
    throw NumericError("scale table: x beyond range; rebuild with larger x_max");
  return interp(wprimen_, x);
}

namespace {

// cur := distribution-function convolution of cur with dF, on the grid.
// Cell masses of F are exact; cur is treated as piecewise linear.
void convolve_with_ladder(std::vector<double>& cur, const std::vector<double>& F,
                          std::vector<double>& scratch) {
  const std::size_t n = cur.size();
  scratch.assign(n, 0.0);
  for (std::size_t k = 1; k < n; ++k) {
    double s = 0.0;
    for (std::size_t j = 0; j < k; ++j)
      s += 0.5 * (cur[k - j - 1] + cur[k - j]) * (F[j + 1] - F[j]);
    scratch[k] = s;
  }
  cur.swap(scratch);
}

// out := alpha * h * (cur (*) W) as a function convolution (trapezoid).
void convolve_with_w(const std::vector<double>& cur, const std::vector<double>& W,
                     double alpha, double h, std::vector<double>& out) {
  const std::size_t n = cur.size();
  out.assign(n, 0.0);
  for (std::size_t i = 1; i < n; ++i) {
    double s = 0.5 * (cur[i] * W[0] + cur[0] * W[i]);
    for (std::size_t j = 1; j < i; ++j) s += cur[i - j] * W[j];
    out[i] = alpha * h * s;
  }
}

} // namespace

ScaleTable build_scale_table(const LevyModel& model, double alpha, double x_max,
                             double h) {
  if (!(alpha >= 0.0)) throw ConfigError("build_scale_table: alpha must be >= 0");
  if (!(h > 0.0) || !(x_max > 0.0))
    throw ConfigError("build_scale_table: h and x_max must be > 0");
  const std::size_t n = static_cast<std::size_t>(std::llround(x_max / h));
  if (n < 64)
    throw ConfigError("build_scale_table: grid too coarse (need >= 64 nodes)");

  ScaleTable t;
  t.alpha_ = alpha;
  t.h_ = h;
  t.x_max_ = h * static_cast<double>(n);
  t.eta_ = eta_root(model, alpha);

  if (model.is_brownian()) {
    t.closed_form_ = true;
    t.mu_ = model.mu();
    t.sigma2_ = model.sigma2();
    t.delta_ = std::sqrt(2.0 * alpha * model.sigma2() + model.mu() * model.mu());
    t.w_at_zero_ = 0.0;
    const double arg_max =
        (std::abs(t.mu_) + t.delta_) / t.sigma2_ * (t.x_max_ + h);
    if (arg_max > 690.0)
      throw ConfigError("build_scale_table: x_max too large, W overflows");
    t.wn_.resize(n + 1);
    t.wbarn_.resize(n + 1);
    t.wprimen_.resize(n + 1);
    for (std::size_t k = 0; k <= n; ++k) {
      const double x = h * static_cast<double>(k);
      t.wn_[k] = t.w(x);
      t.wbarn_[k] = t.wbar(x);
      t.wprimen_[k] = t.wprime(x);
    }
    return t;
  }

  // Bounded variation: ladder series W = (1/drift) sum rho^m F^{(m)},
  // then the alpha power series of repeated W convolutions.
  const double drift = model.drift();
  const double rho = model.ladder_ratio();
  if (!(rho < 1.0))
    throw InfeasibleError("scale series requires jump_mean < drift (ladder ratio " +
                          std::to_string(rho) + ")");

  std::vector<double> F(n + 1);
  for (std::size_t k = 0; k <= n; ++k)
    F[k] = model.ladder_pair(h * static_cast<double>(k)).F;

  std::vector<double> acc(n + 1, 1.0); // F^{(0)} term
  std::vector<double> cur(n + 1, 1.0);
  std::vector<double> scratch;
  double rho_pow = 1.0;
  int terms = 0;
  double bound = rho / ((1.0 - rho) * drift);
  while (bound >= kSeriesTol) {
    if (++terms > kMaxLadderTerms)
      throw NumericError("scale series: ladder series did not converge");
    convolve_with_ladder(cur, F, scratch);
    rho_pow *= rho;
    for (std::size_t k = 0; k <= n; ++k) acc[k] += rho_pow * cur[k];
    bound = rho_pow * rho / ((1.0 - rho) * drift);
  }
  t.series_.ladder_terms = terms;
  t.series_.ladder_tail_bound = bound;

  std::vector<double> W0(n + 1);
  for (std::size_t k = 0; k <= n; ++k) W0[k] = acc[k] / drift;

  if (alpha == 0.0) {
    t.wn_ = std::move(W0);
  } else {
    std::vector<double> sum = W0;
    std::vector<double> term = W0;
    std::vector<double> next;
    double sup_sum = 0.0;
    for (double v : sum) sup_sum = std::max(sup_sum, v);
    int aterms = 1;
    for (;;) {
      convolve_with_w(term, W0, alpha, h, next);
      term.swap(next);
      double sup_term = 0.0;
      for (std::size_t k = 0; k <= n; ++k) {
        sum[k] += term[k];
        sup_term = std::max(sup_term, term[k]);
        sup_sum = std::max(sup_sum, sum[k]);
      }
      ++aterms;
      if (sup_term < kSeriesTol * sup_sum) {
        t.series_.alpha_tail_bound = sup_term;
        break;
      }
      if (aterms > kMaxAlphaTerms)
        throw NumericError("scale series: alpha series did not converge");
    }
    t.series_.alpha_terms = aterms;
    t.wn_ = std::move(sum);
  }

  t.w_at_zero_ = t.wn_[0];

  t.wbarn_.assign(n + 1, 0.0);
  for (std::size_t k = 1; k <= n; ++k)
    t.wbarn_[k] = t.wbarn_[k - 1] + 0.5 * h * (t.wn_[k - 1] + t.wn_[k]);

  t.wprimen_.assign(n + 1, 0.0);
  for (std::size_t k = 0; k <= n; ++k) {
    if (k + 2 <= n)
      t.wprimen_[k] =
          (-3.0 * t.wn_[k] + 4.0 * t.wn_[k + 1] - t.wn_[k + 2]) / (2.0 * h);
    else if (k + 1 <= n)
      t.wprimen_[k] = (t.wn_[k + 1] - t.wn_[k - 1]) / (2.0 * h);
    else
      t.wprimen_[k] =
          (3.0 * t.wn_[k] - 4.0 * t.wn_[k - 1] + t.wn_[k - 2]) / (2.0 * h);
  }
  return t;
}

LevyModel shifted_model(const LevyModel& model, double M) {
  if (!(M >= 0.0)) throw ConfigError("shifted_model: M must be >= 0");
  if (model.is_brownian())
    return LevyModel::brownian(model.mu() - M, model.sigma2(), model.reflected());
  return LevyModel::bounded_variation(model.drift() + M, model.jumps(),
                                      model.reflected());
}

double laplace_identity_residual(const ScaleTable& table, const LevyModel& model,
                                 double beta) {
  const double eta = table.eta();
  if (!(beta > eta + 0.05))
    throw NumericError("laplace_identity_residual: beta must exceed eta + 0.05");

  const double h = table.h();
  const double xm = table.x_max();
  const std::size_t n = table.nodes();

  double body;
  double tail;
  if (table.closed_form()) {
    std::vector<double> f(n);
    for (std::size_t k = 0; k < n; ++k) {
      const double x = table.node_x(k);
      f[k] = std::exp(-beta * x) * table.w_nodes()[k];
    }
    body = simpson(f, h);
    const double mu = model.mu();
    const double s2 = model.sigma2();
    const double delta = std::sqrt(2.0 * table.alpha() * s2 + mu * mu);
    if (delta == 0.0) {
      tail = (2.0 / s2) * std::exp(-beta * xm) * (xm / beta + 1.0 / (beta * beta));
    } else {
      const double tp = (mu + delta) / s2;
      const double tm = (mu - delta) / s2;
      tail = (std::exp(-(beta - tp) * xm) / (beta - tp) -
              std::exp(-(beta - tm) * xm) / (beta - tm)) /
             delta;
    }
  } else {
    // W(x) = e^{eta x}/phi'(eta) + R(x) with R decaying; integrating the
    // dominant mode analytically leaves only R to truncate, and the decay
    // rate of R is read off the last nodes for a final correction.
    const double dphi = model.laplace_exponent_derivative(eta);
    const double c = dphi > 1e-8 ? 1.0 / dphi : 0.0;
    std::vector<double> f(n);
    for (std::size_t k = 0; k < n; ++k) {
      const double x = table.node_x(k);
      f[k] = std::exp(-beta * x) *
             (table.w_nodes()[k] - c * std::exp(eta * x));
    }
    body = simpson(f, h) + c / (beta - eta);
    const double dx = std::min(0.25 * xm, std::max(64.0 * h, 0.05 * xm));
    const double r1 = table.w(xm) - c * std::exp(eta * xm);
    const double r0 = table.w(xm - dx) - c * std::exp(eta * (xm - dx));
    tail = 0.0;
    if (std::abs(r1) > 1e-9 * std::max(1.0, table.w(xm))) {
      double decay = 0.0;
      if (r0 / r1 > 1.0) decay = std::log(r0 / r1) / dx;
      tail = r1 * std::exp(-beta * xm) / std::max(beta + decay, beta);
    }
  }

  const double target = 1.0 / (model.laplace_exponent(beta) - table.alpha());
  return std::abs(body + tail - target);
}

} // namespace dam
