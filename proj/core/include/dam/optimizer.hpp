#pragma once

#include <vector>

#include "dam/policy.hpp"
#include "dam/policy_cost.hpp"
#include "dam/scale_cache.hpp"

namespace dam {

// Grid scan over (lambda, tau) followed by coordinate-wise golden-section
// refinement inside the best cell. Evaluation order never affects the
// result: ties go to the lexicographically smallest (lambda, tau).

enum class Objective { kLongRunAverage, kTotalDiscounted };

struct SearchSpec {
  Objective objective = Objective::kLongRunAverage;
  double x = 0.0; // initial level, discounted objective only; grid points
                  // with tau > x are skipped as unpriced
  double lambda_min = 0.0;
  double lambda_max = 0.0;
  double tau_min = 0.0;
  double tau_max = 0.0;
  int lambda_points = 25;
  int tau_points = 25;
  double refine_tol = 1e-4;
  int threads = 0;
  double M = 1.0;
  double V = kInf;

  void validate() const;
};

struct SearchPoint {
  double lambda = 0.0;
  double tau = 0.0;
  double cost = 0.0;
};

struct SearchResult {
  Policy best;
  double cost = 0.0;
  long long evaluations = 0;
  std::vector<SearchPoint> trace; // the scan grid, row-major in (lambda, tau)
};

SearchResult optimize_policy(ScaleCache& cache, const CostSpec& spec,
                             const SearchSpec& search);

} // namespace dam
