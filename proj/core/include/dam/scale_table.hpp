#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "dam/levy_model.hpp"

namespace dam {

// Scale function pair (W, Z) of one model at one discount rate alpha,
// together with the cumulative integral Wbar and the right derivative.
// Brownian models evaluate closed forms exactly (the node arrays are kept
// for quadrature and CSV output); bounded-variation models interpolate a
// grid built from the ladder-height convolution series.
class ScaleTable {
public:
  double alpha() const { return alpha_; }
  double h() const { return h_; }
  double x_max() const { return x_max_; }
  double eta() const { return eta_; }
  bool closed_form() const { return closed_form_; }
  double w_at_zero() const { return w_at_zero_; }

  double w(double x) const;      // W(x); 0 for x < 0
  double z(double x) const;      // Z(x) = 1 + alpha int_0^x W; 1 for x <= 0
  double wbar(double x) const;   // int_0^x W
  double wprime(double x) const; // right derivative of W, x >= 0

  std::size_t nodes() const { return wn_.size(); }
  double node_x(std::size_t k) const { return h_ * static_cast<double>(k); }
  std::span<const double> w_nodes() const { return wn_; }

  struct SeriesInfo {
    int ladder_terms = 0;
    double ladder_tail_bound = 0.0;
    int alpha_terms = 0;
    double alpha_tail_bound = 0.0;
  };
  const SeriesInfo& series_info() const { return series_; }

private:
  friend ScaleTable build_scale_table(const LevyModel&, double, double, double);

  double interp(const std::vector<double>& a, double x) const;

  double alpha_ = 0.0;
  double h_ = 0.0;
  double x_max_ = 0.0;
  double eta_ = 0.0;
  double w_at_zero_ = 0.0;
  bool closed_form_ = false;

  // Brownian closed-form parameters.
  double mu_ = 0.0;
  double sigma2_ = 1.0;
  double delta_ = 0.0; // sqrt(2 alpha sigma2 + mu^2)

  std::vector<double> wn_;      // W at nodes
  std::vector<double> wbarn_;   // cumulative trapezoid of W
  std::vector<double> wprimen_; // finite-difference derivative
  SeriesInfo series_;
};

// Builds the table; x_max is snapped to a grid multiple. Requires at least
// 64 grid nodes. Bounded-variation models require ladder ratio < 1.
ScaleTable build_scale_table(const LevyModel& model, double alpha, double x_max,
                             double h);

// Model seen during the release phase: the extra outflow M adds drift.
LevyModel shifted_model(const LevyModel& model, double M);

// | quadrature(e^{-beta x} W) + tail - 1/(phi(beta) - alpha) |.
// Self-test of the transform identity; beta must exceed eta(alpha) + 0.05.
double laplace_identity_residual(const ScaleTable& table, const LevyModel& model,
                                 double beta);

} // namespace dam
