#include "dam/special_functions.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace dam {

namespace {
constexpr double kEulerGamma = 0.57721566490153286060651209008240243;
} // namespace

double expint_e1(double x) {
  if (std::isnan(x)) return std::numeric_limits<double>::quiet_NaN();
  if (x < 0.0) throw std::domain_error("expint_e1: negative argument");
  if (x == 0.0) return std::numeric_limits<double>::infinity();

  if (x <= 1.0) {
    // E1(x) = -gamma - log x + sum_{k>=1} (-1)^{k+1} x^k / (k k!)
    double sum = 0.0;
    double term = 1.0; // x^k / k!
    for (int k = 1; k <= 40; ++k) {
      term *= x / k;
      const double add = ((k & 1) ? term : -term) / k;
      sum += add;
      if (std::abs(add) < 1e-17 * (std::abs(sum) + 1.0)) break;
    }
    return -kEulerGamma - std::log(x) + sum;
  }

  // Continued fraction e^{-x} / (x + 1 - 1/(x + 3 - 4/(x + 5 - ...)))
  // evaluated by the modified Lentz scheme.
  const double tiny = 1e-300;
  double b = x + 1.0;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double f = d;
  for (int k = 1; k <= 200; ++k) {
    const double a = -static_cast<double>(k) * k;
    b += 2.0;
    d = a * d + b;
    if (std::abs(d) < tiny) d = tiny;
    c = b + a / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double delta = c * d;
    f *= delta;
    if (std::abs(delta - 1.0) < 1e-15) break;
  }
  return f * std::exp(-x);
}

} // namespace dam
