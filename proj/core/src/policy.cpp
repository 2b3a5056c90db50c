#include "dam/policy.hpp"

#include <cmath>

#include "dam/errors.hpp"

namespace dam {

void Policy::validate() const {
  if (!std::isfinite(lambda) || !std::isfinite(tau) || !std::isfinite(M))
    throw ConfigError("policy: lambda, tau, M must be finite");
  if (std::isnan(V)) throw ConfigError("policy: V must not be NaN");
  if (!(tau >= 0.0)) throw ConfigError("policy: tau must be >= 0");
  if (!(tau < lambda)) throw ConfigError("policy: tau must be < lambda");
  if (!(lambda < V)) throw ConfigError("policy: lambda must be < V");
  if (!(M > 0.0)) throw ConfigError("policy: M must be > 0");
}

void CostSpec::validate() const {
  auto check = [](double v, const char* name) {
    if (!std::isfinite(v) || v < 0.0)
      throw ConfigError(std::string("cost: ") + name +
                        " must be finite and >= 0");
  };
  check(K1, "K1");
  check(K2, "K2");
  check(R, "R");
  check(alpha, "alpha");
  if (!g.empty() && !g.nonnegative())
    throw ConfigError("cost: g must be nonnegative");
  if (!g_star.empty() && !g_star.nonnegative())
    throw ConfigError("cost: g_star must be nonnegative");
}

} // namespace dam
