#pragma once

#include <cstdint>

namespace dam {

// xoshiro256++ seeded per path through SplitMix64, so a path's draws depend
// only on (seed, path index), never on thread scheduling. Antithetic streams
// mirror uniforms (1 - u) and flip the sign of normals.
class RngStream {
public:
  static RngStream for_path(std::uint64_t seed, std::uint64_t path,
                            bool antithetic);

  std::uint64_t next_u64();
  double uniform(); // strictly inside (0, 1)
  double normal();
  double exponential(double rate);
  double gamma(double shape, double rate);
  double inverse_gaussian(double mean, double shape);

private:
  std::uint64_t s_[4] = {1, 2, 3, 4};
  bool anti_ = false;
  bool have_spare_ = false;
  double spare_ = 0.0;

  double uniform_raw();
  double normal_raw();
};

} // namespace dam
