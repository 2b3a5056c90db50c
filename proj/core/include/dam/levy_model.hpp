#pragma once

#include <variant>
#include <vector>

#include "dam/errors.hpp"

namespace dam {

// Jump size distribution with density b e^{-bx}.
struct ExponentialJumps {
  double b = 1.0;
};

// Jump size density sampled on a uniform grid 0, dx, 2dx, ...
// Must integrate to 1 within 1e-8 (trapezoid); zero beyond the grid.
class TabulatedJumpDensity {
public:
  TabulatedJumpDensity(double dx, std::vector<double> pdf);

  double dx() const { return dx_; }
  const std::vector<double>& pdf() const { return pdf_; }
  double support_end() const { return dx_ * static_cast<double>(pdf_.size() - 1); }
  double mean() const { return mean_; }

  double density(double x) const;       // linear interpolation, 0 outside
  double cdf(double x) const;           // clamped to [0,1]
  double tail(double x) const;          // 1 - cdf, clamped at 0
  double tail_integral(double x) const; // int_0^x tail(u) du
  double laplace(double theta) const;   // int e^{-theta x} pdf dx
  double laplace_x_moment(double theta) const; // int x e^{-theta x} pdf dx
  double quantile(double u) const;      // inverse cdf, u in (0,1)

private:
  double dx_ = 0.0;
  double mean_ = 0.0;
  std::vector<double> pdf_;
  std::vector<double> cdf_;      // per node, trapezoid cumulative
  std::vector<double> tailint_;  // per node, cumulative of tail()
};

struct CompoundPoissonJumps {
  double rate = 1.0;
  std::variant<ExponentialJumps, TabulatedJumpDensity> dist{ExponentialJumps{}};
};

// Levy density a e^{-bx} / x.
struct GammaJumps {
  double a = 1.0;
  double b = 1.0;
};

// Levy density e^{-x c^2/(2 sigma^2)} / (sigma sqrt(2 pi x^3)).
struct InverseGaussianJumps {
  double sigma = 1.0;
  double c = 1.0;
};

using JumpSpec = std::variant<CompoundPoissonJumps, GammaJumps, InverseGaussianJumps>;

// Spectrally positive input process I, with E[e^{-theta I_t}] = e^{t phi(theta)}.
// Either Brownian motion with drift, or a pure-jump subordinator minus a
// positive drift (bounded variation). `reflected` selects the variant of the
// content process that is pushed back up at its running infimum.
class LevyModel {
public:
  enum class Kind { brownian, bounded_variation };

  static LevyModel brownian(double mu, double sigma2, bool reflected);
  static LevyModel bounded_variation(double drift, JumpSpec jumps, bool reflected);

  Kind kind() const { return kind_; }
  bool is_brownian() const { return kind_ == Kind::brownian; }
  bool reflected() const { return reflected_; }

  double mu() const;        // Brownian drift
  double sigma2() const;    // Brownian variance rate
  double drift() const;     // bounded variation: downward drift (> 0)
  const JumpSpec& jumps() const;

  // phi(theta) = -mu theta + sigma^2 theta^2 / 2, or
  // phi(theta) = drift * theta - int (1 - e^{-theta x}) nu(dx); theta >= 0.
  double laplace_exponent(double theta) const;
  double laplace_exponent_derivative(double theta) const;

  double mean_rate() const;   // E[I_1] = -phi'(0)
  double jump_mean() const;   // int x nu(dx) (bounded variation only)
  double ladder_ratio() const; // jump_mean / drift (bounded variation only)

  double levy_tail(double x) const;    // nu([x, inf)), x >= 0
  double levy_density(double x) const; // nu(dx)/dx, x > 0

  struct Ladder {
    double f; // ladder height density levy_tail(x) / jump_mean
    double F; // its distribution function
  };
  Ladder ladder_pair(double x) const; // bounded variation only

  // Smallest w >= 0 with levy_tail(w) <= eps.
  double tail_quantile(double eps) const;

private:
  LevyModel() = default;

  Kind kind_ = Kind::brownian;
  bool reflected_ = false;
  double mu_ = 0.0;
  double sigma2_ = 1.0;
  double drift_ = 1.0;
  JumpSpec jumps_{};
};

// Largest nonnegative root of phi(theta) = alpha. Zero when alpha = 0 and
// the input has nonpositive mean rate; strictly positive otherwise.
double eta_root(const LevyModel& model, double alpha);

} // namespace dam
