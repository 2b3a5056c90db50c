#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "dam/errors.hpp"

namespace dam {

// Piecewise-linear function given by knots; evaluation clamps to the
// nearest endpoint outside the knot range. An empty table is the zero
// function.
class PiecewiseLinear {
public:
  PiecewiseLinear() = default;

  PiecewiseLinear(std::vector<double> xs, std::vector<double> vs)
      : xs_(std::move(xs)), vs_(std::move(vs)) {
    if (xs_.size() != vs_.size())
      throw ConfigError("piecewise table: x and value counts differ");
    for (std::size_t i = 0; i < xs_.size(); ++i) {
      if (!std::isfinite(xs_[i]) || !std::isfinite(vs_[i]))
        throw ConfigError("piecewise table: non-finite entry");
      if (i > 0 && xs_[i] <= xs_[i - 1])
        throw ConfigError("piecewise table: x values must increase strictly");
    }
  }

  static PiecewiseLinear constant(double v) { return PiecewiseLinear({0.0}, {v}); }

  bool empty() const { return xs_.empty(); }
  std::size_t size() const { return xs_.size(); }
  const std::vector<double>& knots() const { return xs_; }
  const std::vector<double>& values() const { return vs_; }

  bool nonnegative() const {
    for (double v : vs_)
      if (v < 0.0) return false;
    return true;
  }

  double operator()(double x) const {
    if (xs_.empty()) return 0.0;
    if (x <= xs_.front()) return vs_.front();
    if (x >= xs_.back()) return vs_.back();
    const auto it = std::upper_bound(xs_.begin(), xs_.end(), x);
    const std::size_t i = static_cast<std::size_t>(it - xs_.begin());
    const double t = (x - xs_[i - 1]) / (xs_[i] - xs_[i - 1]);
    return vs_[i - 1] + t * (vs_[i] - vs_[i - 1]);
  }

  // Knot positions restricted to (a, b), used to split integrals so that
  // each piece sees a single linear segment.
  std::vector<double> breakpoints_in(double a, double b) const {
    std::vector<double> out;
    for (double x : xs_)
      if (x > a && x < b) out.push_back(x);
    return out;
  }

private:
  std::vector<double> xs_;
  std::vector<double> vs_;
};

} // namespace dam
