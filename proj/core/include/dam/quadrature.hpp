#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace dam {

// Composite trapezoid over equally spaced samples.
inline double trapezoid(std::span<const double> f, double h) {
  if (f.size() < 2) return 0.0;
  double s = 0.5 * (f.front() + f.back());
  for (std::size_t i = 1; i + 1 < f.size(); ++i) s += f[i];
  return s * h;
}

// Composite Simpson over equally spaced samples; odd final interval
// falls back to a single trapezoid panel.
inline double simpson(std::span<const double> f, double h) {
  const std::size_t n = f.size();
  if (n < 2) return 0.0;
  if (n == 2) return 0.5 * h * (f[0] + f[1]);
  std::size_t m = n - 1; // number of intervals
  double s = 0.0;
  std::size_t last = m;
  if (m % 2 != 0) last = m - 1; // leave one interval for the trapezoid tail
  for (std::size_t i = 0; i + 2 <= last; i += 2)
    s += f[i] + 4.0 * f[i + 1] + f[i + 2];
  s *= h / 3.0;
  if (last != m) s += 0.5 * h * (f[m - 1] + f[m]);
  return s;
}

// Order-independent sum: result depends only on element values and order
// of the array, never on how work was scheduled across threads.
inline double pairwise_sum(std::span<const double> v) {
  const std::size_t n = v.size();
  if (n == 0) return 0.0;
  if (n <= 8) {
    double s = 0.0;
    for (double x : v) s += x;
    return s;
  }
  const std::size_t half = n / 2;
  return pairwise_sum(v.first(half)) + pairwise_sum(v.subspan(half));
}

} // namespace dam
