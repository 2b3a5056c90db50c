#pragma once

#include <functional>
#include <vector>

#include "dam/policy.hpp"
#include "dam/scale_cache.hpp"

namespace dam {

// Discounted occupation measure of a killed process on a finite interval:
// an optional boundary atom plus a density sampled on a uniform grid.
// mass is computed with the same quadrature the density grid implies, so
// identities of the form alpha * mass + exit_lt = 1 hold to rounding.
struct PotentialMeasure {
  double lo = 0.0;
  double hi = 0.0;
  double atom_location = 0.0;
  double atom_mass = 0.0; // 0 when there is no atom
  std::vector<double> y;
  std::vector<double> density;
  double mass = 0.0;
};

// Law of the content at the end of a fill phase started at x <= lambda,
// discounted at rate alpha: an atom at lambda (continuous crossing) plus a
// density on (lambda, z_max], with the mass beyond any z recovered exactly
// from the jump tail. Total mass equals the fill-time transform by
// construction, up to quadrature error.
class OvershootKernel {
public:
  double lambda() const { return lambda_; }
  double alpha() const { return alpha_; }
  double atom() const { return atom_; }
  const std::vector<double>& z() const { return z_; }
  const std::vector<double>& density() const { return density_; }

  // Mass of (z_from, +inf); exact in the jump tail given the stored weights.
  double tail_beyond(double z_from) const;

  double total_mass() const;

  // atom * f(lambda) + int f(z) k(dz) with the landing point capped at cap:
  // everything beyond cap contributes tail_beyond(cap) * f(cap). cap = +inf
  // integrates the full grid and books the residual tail at the last node.
  double integrate_capped(double cap,
                          const std::function<double(double)>& f) const;

private:
  friend OvershootKernel overshoot_free(ScaleCache&, double, double, double,
                                        double);
  friend OvershootKernel overshoot_reflected(ScaleCache&, double, double,
                                             double, double);
  friend OvershootKernel make_atom_kernel(const LevyModel&, double, double,
                                          double);

  explicit OvershootKernel(LevyModel model) : model_(std::move(model)) {}

  LevyModel model_;
  double lambda_ = 0.0;
  double alpha_ = 0.0;
  double h_ = 0.0;
  double atom_ = 0.0;
  std::vector<double> z_;
  std::vector<double> density_;
  // tail_beyond(z) = sum_i tail_c_[i] * levy_tail(model, z - tail_y_[i])
  std::vector<double> tail_y_;
  std::vector<double> tail_c_;
};

// Exponential time scale eta(alpha): decay rate of the upward passage tail.
double eta_root_cached(ScaleCache& cache, double alpha, double M = 0.0);

// Pointwise potential densities of the content killed at the relevant exit.
double potential_two_sided(ScaleCache& cache, double alpha, double a,
                           double lambda, double x, double y);
double potential_free(ScaleCache& cache, double alpha, double lambda, double x,
                      double y);
double potential_reflected_density(ScaleCache& cache, double alpha,
                                   double lambda, double x, double y);
double potential_release(ScaleCache& cache, double alpha, const Policy& policy,
                         double x, double y);

// Same potentials assembled as measures on their natural intervals.
PotentialMeasure potential_two_sided_measure(ScaleCache& cache, double alpha,
                                             double a, double lambda,
                                             double x);
PotentialMeasure potential_reflected_measure(ScaleCache& cache, double alpha,
                                             double lambda, double x);
PotentialMeasure potential_release_measure(ScaleCache& cache, double alpha,
                                           const Policy& policy, double x);

// Two-sided exit transforms from x in [a, lambda]:
// first = E[e^{-alpha T} ; up-cross lambda first],
// second = E[e^{-alpha T}; reach a first].
std::pair<double, double> lt_two_sided(ScaleCache& cache, double alpha,
                                       double a, double lambda, double x);

// Fill phase: first passage above lambda from x <= lambda.
double lt_fill_free(ScaleCache& cache, double alpha, double lambda, double x);
double lt_fill_reflected(ScaleCache& cache, double alpha, double lambda,
                         double x);
double lt_fill(ScaleCache& cache, double alpha, double lambda, double x);
double mean_fill_free(ScaleCache& cache, double lambda, double x);
double mean_fill_reflected(ScaleCache& cache, double lambda, double x);
double mean_fill(ScaleCache& cache, double lambda, double x);

// Release phase: first passage down to tau from x in [tau, V], output open.
double lt_release(ScaleCache& cache, double alpha, const Policy& policy,
                  double x);
double mean_release(ScaleCache& cache, const Policy& policy, double x);

// Content law at the end of the fill phase. z_max sets the density grid span;
// mass beyond it stays available through tail_beyond().
OvershootKernel overshoot_free(ScaleCache& cache, double alpha, double lambda,
                               double x, double z_max);
OvershootKernel overshoot_reflected(ScaleCache& cache, double alpha,
                                    double lambda, double x, double z_max);
OvershootKernel overshoot(ScaleCache& cache, double alpha, double lambda,
                          double x, double z_max);

// Full cycle from x in [tau, lambda]: fill, then release back to tau.
double lt_cycle(ScaleCache& cache, double alpha, const Policy& policy,
                double x);
// Same transform when the caller already holds the fill-end kernel; the
// kernel's own alpha is the discount rate.
double lt_cycle_with_kernel(ScaleCache& cache, const OvershootKernel& kernel,
                            const Policy& policy);
double mean_cycle(ScaleCache& cache, const Policy& policy);

// Span the overshoot grid needs so that integrate_capped(V, .) is exact.
double default_z_max(const LevyModel& model, const Policy& policy);

} // namespace dam
