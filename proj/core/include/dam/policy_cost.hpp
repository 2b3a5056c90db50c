#pragma once

#include "dam/exit_quantities.hpp"

namespace dam {

// Expected discounted holding cost accrued over one fill phase started at x,
// at the discount rate spec.alpha. Infinite when the fill never completes
// and the rate is zero.
double penalty_fill(ScaleCache& cache, const Policy& policy,
                    const CostSpec& spec, double x);

// Same for one release phase started at x in [tau, V]. Requires finite V
// unless g_star is empty.
double penalty_release(ScaleCache& cache, const Policy& policy,
                       const CostSpec& spec, double x);

// Expected discounted cost of one regeneration cycle. The fill branch starts
// at x in [tau, lambda] and books the switch-off charge M K2 at time zero,
// the switch-on charge M K1 at the fill end, the release reward and both
// holding costs. The release branch starts at x in [tau, V]: it books the
// switch-on charge M K1 at time zero and covers the remaining release leg.
// cycle_cost_fill requires alpha > 0.
double cycle_cost_fill(ScaleCache& cache, const Policy& policy,
                       const CostSpec& spec, double x);
double cycle_cost_release(ScaleCache& cache, const Policy& policy,
                          const CostSpec& spec, double x);

// Renewal sum over cycles: total expected discounted cost from content x
// (either phase). Requires alpha > 0 and a convergent renewal series.
double total_discounted_cost(ScaleCache& cache, const Policy& policy,
                             const CostSpec& spec, double x);

// Undiscounted expected cost per unit time of the stationary cycle; +inf
// when the mean cycle length diverges.
double longrun_average_cost(ScaleCache& cache, const Policy& policy,
                            const CostSpec& spec);

} // namespace dam
