#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <utility>

#include "dam/scale_table.hpp"

namespace dam {

struct GridSpec {
  double h = 1e-3;
  double x_max = 10.0;
};

// Owns a model plus lazily built scale tables keyed by (alpha, extra drift).
// Lookups are mutex-guarded; call prewarm() before parallel read-only scans.
class ScaleCache {
public:
  ScaleCache(LevyModel model, GridSpec grid);

  const LevyModel& model() const { return base_; }
  const GridSpec& grid() const { return grid_; }

  // M = 0 returns the base model; M > 0 the release-phase shifted model.
  const LevyModel& model_with_drift(double M);

  const ScaleTable& table(double alpha, double M = 0.0);

  void prewarm(std::initializer_list<double> alphas, double M);

private:
  LevyModel base_;
  GridSpec grid_;
  std::mutex mutex_;
  std::map<double, LevyModel> shifted_;
  std::map<std::pair<double, double>, std::unique_ptr<const ScaleTable>> tables_;
};

} // namespace dam
