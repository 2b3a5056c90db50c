#include "dam/rng.hpp"

#include <cmath>
#include <numbers>

#include "dam/errors.hpp"

namespace dam {

namespace {

inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ull);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

inline std::uint64_t rotl(std::uint64_t x, int k) {
  return (x << k) | (x >> (64 - k));
}

} // namespace

RngStream RngStream::for_path(std::uint64_t seed, std::uint64_t path,
                              bool antithetic) {
  RngStream r;
  std::uint64_t sm = seed ^ (0xA0761D6478BD642Full * (path + 1));
  bool all_zero = true;
  for (auto& s : r.s_) {
    s = splitmix64(sm);
    all_zero = all_zero && s == 0;
  }
  if (all_zero) r.s_[0] = 0x9E3779B97F4A7C15ull;
  r.anti_ = antithetic;
  return r;
}

std::uint64_t RngStream::next_u64() {
  const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
  const std::uint64_t t = s_[1] << 17;
  s_[2] ^= s_[0];
  s_[3] ^= s_[1];
  s_[1] ^= s_[2];
  s_[0] ^= s_[3];
  s_[2] ^= t;
  s_[3] = rotl(s_[3], 45);
  return result;
}

double RngStream::uniform_raw() {
  return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
}

double RngStream::uniform() {
  const double u = uniform_raw();
  return anti_ ? 1.0 - u : u;
}

double RngStream::normal_raw() {
  if (have_spare_) {
    have_spare_ = false;
    return spare_;
  }
  const double u1 = uniform_raw();
  const double u2 = uniform_raw();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double a = 2.0 * std::numbers::pi * u2;
  spare_ = r * std::sin(a);
  have_spare_ = true;
  return r * std::cos(a);
}

double RngStream::normal() {
  const double n = normal_raw();
  return anti_ ? -n : n;
}

double RngStream::exponential(double rate) {
  return -std::log(uniform()) / rate;
}

double RngStream::gamma(double shape, double rate) {
  if (!(shape > 0.0) || !(rate > 0.0))
    throw ConfigError("gamma sampler: shape and rate must be > 0");
  if (shape < 1.0) {
    // boost trick: G(k) = G(k + 1) U^{1/k}
    const double u = uniform_raw();
    return gamma(shape + 1.0, rate) * std::pow(u, 1.0 / shape);
  }
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double n, v;
    do {
      n = normal_raw();
      v = 1.0 + c * n;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = uniform_raw();
    const double n2 = n * n;
    if (u < 1.0 - 0.0331 * n2 * n2) return d * v / rate;
    if (std::log(u) < 0.5 * n2 + d * (1.0 - v + std::log(v))) return d * v / rate;
  }
}

double RngStream::inverse_gaussian(double mean, double shape) {
  if (!(mean > 0.0) || !(shape > 0.0))
    throw ConfigError("inverse gaussian sampler: mean and shape must be > 0");
  const double n = normal_raw();
  const double y = n * n;
  // Stable root: x = mean / (1 + t + sqrt(t (t + 2))), t = mean y / (2 shape).
  const double t = mean * y / (2.0 * shape);
  const double x = mean / (1.0 + t + std::sqrt(t * (t + 2.0)));
  const double u = uniform_raw();
  return (u * (mean + x) <= mean) ? x : mean * mean / x;
}

} // namespace dam
