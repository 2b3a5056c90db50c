#pragma once

#include <cstdint>
#include <vector>

#include "dam/policy.hpp"

namespace dam {

struct SimConfig {
  long long n_paths = 100000;
  double dt = 1e-3; // diffusion / subordinator step; jump phases are exact
  std::uint64_t seed = 1;
  double horizon_cap = 1e4; // per-phase duration cap
  bool antithetic = false;
  int threads = 0; // 0: hardware concurrency
};

struct Estimate {
  double mean = 0.0;
  double std_error = 0.0;
  long long n = 0;
};

struct FillSimResult {
  std::vector<double> alphas;
  std::vector<Estimate> lt; // E e^{-alpha T}; capped paths contribute 0
  Estimate mean_time;       // capped paths contribute the cap (flagged below)
  Estimate crossed_fraction;
  std::vector<double> overshoots; // one entry per crossed path, in path order
  double truncated_fraction = 0.0;
};

struct CycleSimResult {
  double alpha = 0.0;
  Estimate lt_cycle;
  Estimate mean_cycle;
  Estimate cost_discounted;
  Estimate cost_undiscounted;
  double truncated_fraction = 0.0;
};

struct LongrunSimResult {
  double rate = 0.0; // ratio estimate: cost per unit time
  double std_error = 0.0;
  long long cycles = 0;
  double time_total = 0.0;
  double truncated_fraction = 0.0;
};

// First passage of the content above lambda from x, with the fill-phase
// transform estimated at each requested rate.
FillSimResult simulate_fill(const LevyModel& model, double lambda, double x,
                            const std::vector<double>& alphas,
                            const SimConfig& cfg);

// One full regeneration cycle from tau: switch-off charge, fill with holding
// cost g, switch-on charge, release with holding cost g_star and reward R M.
CycleSimResult simulate_cycle(const LevyModel& model, const Policy& policy,
                              const CostSpec& spec, const SimConfig& cfg);

// Renewal-reward ratio estimate over as many cycles as fit in the horizon.
// Fewer than 30 completed cycles is an error.
LongrunSimResult simulate_longrun(const LevyModel& model, const Policy& policy,
                                  const CostSpec& spec, double horizon,
                                  const SimConfig& cfg);

// Total discounted cost from content x, cycling until the horizon; requires
// alpha > 0 so the truncation error is a e^{-alpha horizon} term.
Estimate simulate_total_discounted(const LevyModel& model, const Policy& policy,
                                   const CostSpec& spec, double x,
                                   double horizon, const SimConfig& cfg);

} // namespace dam
