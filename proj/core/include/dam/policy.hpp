#pragma once

#include <cmath>
#include <limits>

#include "dam/levy_model.hpp"
#include "dam/piecewise_linear.hpp"

namespace dam {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// Two-threshold control: output rate M switches on when the content first
// reaches lambda and off when it falls back to tau; V caps the content during
// release (V = +inf means no cap).
struct Policy {
  double lambda = 1.0;
  double tau = 0.0;
  double M = 1.0;
  double V = kInf;

  bool finite_v() const { return std::isfinite(V); }
  void validate() const;
};

// Cost data for one policy evaluation. g is the holding cost during fill,
// g_star during release; either may be empty (identically zero).
struct CostSpec {
  double K1 = 0.0;    // switch-on charge, scaled by M
  double K2 = 0.0;    // switch-off charge, scaled by M
  double R = 0.0;     // reward per unit released
  double alpha = 0.0; // discount rate
  PiecewiseLinear g;
  PiecewiseLinear g_star;

  void validate() const;
};

} // namespace dam
