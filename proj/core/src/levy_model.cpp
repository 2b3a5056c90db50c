#include "dam/levy_model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "dam/special_functions.hpp"

namespace dam {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_finite_positive(double v, const char* name) {
  if (!(std::isfinite(v) && v > 0.0))
    throw ConfigError(std::string(name) + " must be finite and > 0");
}

} // namespace

// ---------------------------------------------------------------------------
// TabulatedJumpDensity

TabulatedJumpDensity::TabulatedJumpDensity(double dx, std::vector<double> pdf)
    : dx_(dx), pdf_(std::move(pdf)) {
  require_finite_positive(dx_, "tabulated jump density dx");
  if (pdf_.size() < 2)
    throw ConfigError("tabulated jump density needs at least 2 nodes");
  for (double v : pdf_) {
    if (!std::isfinite(v) || v < 0.0)
      throw ConfigError("tabulated jump density values must be finite and >= 0");
  }

  const std::size_t n = pdf_.size();
  cdf_.assign(n, 0.0);
  for (std::size_t i = 1; i < n; ++i)
    cdf_[i] = cdf_[i - 1] + 0.5 * dx_ * (pdf_[i - 1] + pdf_[i]);
  const double mass = cdf_.back();
  if (std::abs(mass - 1.0) > 1e-8)
    throw ConfigError("tabulated jump density integrates to " +
                      std::to_string(mass) + ", expected 1 within 1e-8");

  mean_ = 0.0;
  for (std::size_t i = 1; i < n; ++i) {
    const double x0 = dx_ * static_cast<double>(i - 1);
    const double x1 = dx_ * static_cast<double>(i);
    mean_ += 0.5 * dx_ * (x0 * pdf_[i - 1] + x1 * pdf_[i]);
  }

  tailint_.assign(n, 0.0);
  for (std::size_t i = 1; i < n; ++i) {
    const double t0 = std::max(0.0, 1.0 - cdf_[i - 1]);
    const double t1 = std::max(0.0, 1.0 - cdf_[i]);
    tailint_[i] = tailint_[i - 1] + 0.5 * dx_ * (t0 + t1);
  }
}

double TabulatedJumpDensity::density(double x) const {
  if (x < 0.0 || x > support_end()) return 0.0;
  const double u = x / dx_;
  const std::size_t i = std::min(static_cast<std::size_t>(u), pdf_.size() - 2);
  const double t = u - static_cast<double>(i);
  return pdf_[i] + t * (pdf_[i + 1] - pdf_[i]);
}

double TabulatedJumpDensity::cdf(double x) const {
  if (x <= 0.0) return 0.0;
  if (x >= support_end()) return 1.0;
  const double u = x / dx_;
  const std::size_t i = std::min(static_cast<std::size_t>(u), pdf_.size() - 2);
  const double a = dx_ * static_cast<double>(i);
  const double fa = pdf_[i];
  const double fx = density(x);
  return std::min(1.0, cdf_[i] + 0.5 * (x - a) * (fa + fx));
}

double TabulatedJumpDensity::tail(double x) const {
  return std::max(0.0, 1.0 - cdf(x));
}

double TabulatedJumpDensity::tail_integral(double x) const {
  if (x <= 0.0) return 0.0;
  if (x >= support_end()) return tailint_.back();
  const double u = x / dx_;
  const std::size_t i = std::min(static_cast<std::size_t>(u), pdf_.size() - 2);
  const double a = dx_ * static_cast<double>(i);
  const double ta = std::max(0.0, 1.0 - cdf_[i]);
  return tailint_[i] + 0.5 * (x - a) * (ta + tail(x));
}

double TabulatedJumpDensity::laplace(double theta) const {
  double s = 0.0;
  const std::size_t n = pdf_.size();
  for (std::size_t i = 0; i < n; ++i) {
    const double x = dx_ * static_cast<double>(i);
    const double w = (i == 0 || i + 1 == n) ? 0.5 : 1.0;
    s += w * std::exp(-theta * x) * pdf_[i];
  }
  return s * dx_;
}

double TabulatedJumpDensity::laplace_x_moment(double theta) const {
  double s = 0.0;
  const std::size_t n = pdf_.size();
  for (std::size_t i = 0; i < n; ++i) {
    const double x = dx_ * static_cast<double>(i);
    const double w = (i == 0 || i + 1 == n) ? 0.5 : 1.0;
    s += w * x * std::exp(-theta * x) * pdf_[i];
  }
  return s * dx_;
}

double TabulatedJumpDensity::quantile(double u) const {
  if (u <= 0.0) return 0.0;
  if (u >= 1.0) return support_end();
  const auto it = std::lower_bound(cdf_.begin(), cdf_.end(), u);
  std::size_t i = static_cast<std::size_t>(it - cdf_.begin());
  if (i == 0) return 0.0;
  const double c0 = cdf_[i - 1];
  const double c1 = cdf_[i];
  const double a = dx_ * static_cast<double>(i - 1);
  if (c1 <= c0) return a;
  return a + dx_ * (u - c0) / (c1 - c0);
}

// ---------------------------------------------------------------------------
// LevyModel

LevyModel LevyModel::brownian(double mu, double sigma2, bool reflected) {
  if (!std::isfinite(mu)) throw ConfigError("brownian mu must be finite");
  require_finite_positive(sigma2, "brownian sigma2");
  LevyModel m;
  m.kind_ = Kind::brownian;
  m.reflected_ = reflected;
  m.mu_ = mu;
  m.sigma2_ = sigma2;
  return m;
}

LevyModel LevyModel::bounded_variation(double drift, JumpSpec jumps, bool reflected) {
  require_finite_positive(drift, "bounded-variation drift");
  if (const auto* cp = std::get_if<CompoundPoissonJumps>(&jumps)) {
    require_finite_positive(cp->rate, "compound Poisson rate");
    if (const auto* e = std::get_if<ExponentialJumps>(&cp->dist))
      require_finite_positive(e->b, "exponential jump parameter b");
  } else if (const auto* g = std::get_if<GammaJumps>(&jumps)) {
    require_finite_positive(g->a, "gamma jump parameter a");
    require_finite_positive(g->b, "gamma jump parameter b");
  } else if (const auto* ig = std::get_if<InverseGaussianJumps>(&jumps)) {
    require_finite_positive(ig->sigma, "inverse-gaussian sigma");
    require_finite_positive(ig->c, "inverse-gaussian c");
  }
  LevyModel m;
  m.kind_ = Kind::bounded_variation;
  m.reflected_ = reflected;
  m.drift_ = drift;
  m.jumps_ = std::move(jumps);
  return m;
}

double LevyModel::mu() const {
  if (kind_ != Kind::brownian) throw ConfigError("mu: model is not Brownian");
  return mu_;
}

double LevyModel::sigma2() const {
  if (kind_ != Kind::brownian) throw ConfigError("sigma2: model is not Brownian");
  return sigma2_;
}

double LevyModel::drift() const {
  if (kind_ != Kind::bounded_variation)
    throw ConfigError("drift: model is not bounded variation");
  return drift_;
}

const JumpSpec& LevyModel::jumps() const {
  if (kind_ != Kind::bounded_variation)
    throw ConfigError("jumps: model is not bounded variation");
  return jumps_;
}

double LevyModel::laplace_exponent(double theta) const {
  if (!(theta >= 0.0)) throw ConfigError("laplace_exponent: theta must be >= 0");
  if (kind_ == Kind::brownian)
    return -mu_ * theta + 0.5 * sigma2_ * theta * theta;

  double jump_part = 0.0; // int (1 - e^{-theta x}) nu(dx)
  if (const auto* cp = std::get_if<CompoundPoissonJumps>(&jumps_)) {
    if (const auto* e = std::get_if<ExponentialJumps>(&cp->dist))
      jump_part = cp->rate * theta / (e->b + theta);
    else
      jump_part = cp->rate *
                  (1.0 - std::get<TabulatedJumpDensity>(cp->dist).laplace(theta));
  } else if (const auto* g = std::get_if<GammaJumps>(&jumps_)) {
    jump_part = g->a * std::log1p(theta / g->b);
  } else {
    const auto& ig = std::get<InverseGaussianJumps>(jumps_);
    const double c2 = ig.c * ig.c;
    jump_part = (std::sqrt(c2 + 2.0 * ig.sigma * ig.sigma * theta) - ig.c) /
                (ig.sigma * ig.sigma);
  }
  return drift_ * theta - jump_part;
}

double LevyModel::laplace_exponent_derivative(double theta) const {
  if (!(theta >= 0.0))
    throw ConfigError("laplace_exponent_derivative: theta must be >= 0");
  if (kind_ == Kind::brownian) return -mu_ + sigma2_ * theta;

  double jump_part = 0.0; // d/dtheta of the jump integral
  if (const auto* cp = std::get_if<CompoundPoissonJumps>(&jumps_)) {
    if (const auto* e = std::get_if<ExponentialJumps>(&cp->dist)) {
      const double s = e->b + theta;
      jump_part = cp->rate * e->b / (s * s);
    } else {
      jump_part =
          cp->rate * std::get<TabulatedJumpDensity>(cp->dist).laplace_x_moment(theta);
    }
  } else if (const auto* g = std::get_if<GammaJumps>(&jumps_)) {
    jump_part = g->a / (g->b + theta);
  } else {
    const auto& ig = std::get<InverseGaussianJumps>(jumps_);
    jump_part = 1.0 / std::sqrt(ig.c * ig.c + 2.0 * ig.sigma * ig.sigma * theta);
  }
  return drift_ - jump_part;
}

double LevyModel::jump_mean() const {
  if (kind_ != Kind::bounded_variation)
    throw ConfigError("jump_mean: model is not bounded variation");
  if (const auto* cp = std::get_if<CompoundPoissonJumps>(&jumps_)) {
    if (const auto* e = std::get_if<ExponentialJumps>(&cp->dist))
      return cp->rate / e->b;
    return cp->rate * std::get<TabulatedJumpDensity>(cp->dist).mean();
  }
  if (const auto* g = std::get_if<GammaJumps>(&jumps_)) return g->a / g->b;
  return 1.0 / std::get<InverseGaussianJumps>(jumps_).c;
}

double LevyModel::mean_rate() const {
  if (kind_ == Kind::brownian) return mu_;
  return jump_mean() - drift_;
}

double LevyModel::ladder_ratio() const { return jump_mean() / drift(); }

double LevyModel::levy_tail(double x) const {
  if (!(x >= 0.0)) throw ConfigError("levy_tail: x must be >= 0");
  if (kind_ == Kind::brownian) return 0.0;
  if (const auto* cp = std::get_if<CompoundPoissonJumps>(&jumps_)) {
    if (const auto* e = std::get_if<ExponentialJumps>(&cp->dist))
      return cp->rate * std::exp(-e->b * x);
    return cp->rate * std::get<TabulatedJumpDensity>(cp->dist).tail(x);
  }
  if (const auto* g = std::get_if<GammaJumps>(&jumps_)) {
    if (x == 0.0) return kInf;
    return g->a * expint_e1(g->b * x);
  }
  const auto& ig = std::get<InverseGaussianJumps>(jumps_);
  if (x == 0.0) return kInf;
  const double s2 = ig.sigma * ig.sigma;
  const double z = ig.c * std::sqrt(x / (2.0 * s2));
  return std::sqrt(2.0 / std::numbers::pi) * std::exp(-z * z) /
             (ig.sigma * std::sqrt(x)) -
         (ig.c / s2) * std::erfc(z);
}

double LevyModel::levy_density(double x) const {
  if (kind_ == Kind::brownian) return 0.0;
  if (!(x >= 0.0)) throw ConfigError("levy_density: x must be >= 0");
  if (const auto* cp = std::get_if<CompoundPoissonJumps>(&jumps_)) {
    if (const auto* e = std::get_if<ExponentialJumps>(&cp->dist))
      return cp->rate * e->b * std::exp(-e->b * x);
    return cp->rate * std::get<TabulatedJumpDensity>(cp->dist).density(x);
  }
  if (x == 0.0) return kInf;
  if (const auto* g = std::get_if<GammaJumps>(&jumps_))
    return g->a * std::exp(-g->b * x) / x;
  const auto& ig = std::get<InverseGaussianJumps>(jumps_);
  const double s2 = ig.sigma * ig.sigma;
  return std::exp(-x * ig.c * ig.c / (2.0 * s2)) /
         (ig.sigma * std::sqrt(2.0 * std::numbers::pi * x * x * x));
}

LevyModel::Ladder LevyModel::ladder_pair(double x) const {
  if (kind_ != Kind::bounded_variation)
    throw ConfigError("ladder_pair: model is not bounded variation");
  if (!(x >= 0.0)) throw ConfigError("ladder_pair: x must be >= 0");
  const double m = jump_mean();
  Ladder out;
  out.f = levy_tail(x) / m;

  if (const auto* cp = std::get_if<CompoundPoissonJumps>(&jumps_)) {
    if (const auto* e = std::get_if<ExponentialJumps>(&cp->dist)) {
      out.F = -std::expm1(-e->b * x);
    } else {
      const auto& tab = std::get<TabulatedJumpDensity>(cp->dist);
      out.F = tab.tail_integral(x) / tab.mean();
    }
  } else if (const auto* g = std::get_if<GammaJumps>(&jumps_)) {
    out.F = (x == 0.0) ? 0.0 : -std::expm1(-g->b * x) + x * out.f;
  } else {
    const auto& ig = std::get<InverseGaussianJumps>(jumps_);
    out.F = (x == 0.0)
                ? 0.0
                : std::erf(ig.c * std::sqrt(x / (2.0 * ig.sigma * ig.sigma))) +
                      x * out.f;
  }
  out.F = std::min(out.F, 1.0);
  return out;
}

double LevyModel::tail_quantile(double eps) const {
  if (!(eps > 0.0)) throw ConfigError("tail_quantile: eps must be > 0");
  if (kind_ == Kind::brownian) return 0.0;
  double hi = 1.0;
  while (levy_tail(hi) > eps) {
    hi *= 2.0;
    if (hi > 1e12) throw NumericError("tail_quantile: tail does not drop below eps");
  }
  double lo = 0.0;
  for (int it = 0; it < 100 && hi - lo > 1e-12 * (1.0 + hi); ++it) {
    const double mid = 0.5 * (lo + hi);
    if (levy_tail(mid) > eps)
      lo = mid;
    else
      hi = mid;
  }
  return hi;
}

// ---------------------------------------------------------------------------

double eta_root(const LevyModel& model, double alpha) {
  if (!(alpha >= 0.0)) throw ConfigError("eta_root: alpha must be >= 0");
  if (alpha == 0.0 && model.mean_rate() <= 0.0) return 0.0;

  double hi = 1.0;
  while (model.laplace_exponent(hi) <= alpha) {
    hi *= 2.0;
    if (hi > 1e14) throw NumericError("eta_root: failed to bracket the root");
  }
  double lo = 0.0;
  // phi(lo) <= alpha < phi(hi); the bisection walks past the flat/negative
  // stretch and converges to the largest crossing.
  for (int it = 0; it < 200 && (hi - lo) > 1e-16 * (1.0 + hi); ++it) {
    const double mid = 0.5 * (lo + hi);
    if (model.laplace_exponent(mid) > alpha)
      hi = mid;
    else
      lo = mid;
  }
  double r = 0.5 * (lo + hi);
  for (int it = 0; it < 3; ++it) { // Newton polish
    const double fp = model.laplace_exponent_derivative(r);
    if (!(fp > 0.0)) break;
    const double rn = r - (model.laplace_exponent(r) - alpha) / fp;
    if (rn > lo && rn < hi) r = rn;
  }
  const double resid = std::abs(model.laplace_exponent(r) - alpha);
  if (resid > 1e-10 * std::max(1.0, alpha))
    throw NumericError("eta_root: residual " + std::to_string(resid));
  return r;
}

} // namespace dam
