#include "dam/scale_cache.hpp"

#include "dam/errors.hpp"

namespace dam {

ScaleCache::ScaleCache(LevyModel model, GridSpec grid)
    : base_(std::move(model)), grid_(grid) {
  if (!(grid_.h > 0.0) || !(grid_.x_max > 0.0))
    throw ConfigError("grid spec requires h > 0 and x_max > 0");
}

const LevyModel& ScaleCache::model_with_drift(double M) {
  if (M == 0.0) return base_;
  std::lock_guard<std::mutex> lock(mutex_);
  auto it = shifted_.find(M);
  if (it == shifted_.end())
    it = shifted_.emplace(M, shifted_model(base_, M)).first;
  return it->second;
}

const ScaleTable& ScaleCache::table(double alpha, double M) {
  std::lock_guard<std::mutex> lock(mutex_);
  auto key = std::make_pair(alpha, M);
  auto it = tables_.find(key);
  if (it == tables_.end()) {
    const LevyModel* m = &base_;
    if (M != 0.0) {
      auto sit = shifted_.find(M);
      if (sit == shifted_.end())
        sit = shifted_.emplace(M, shifted_model(base_, M)).first;
      m = &sit->second;
    }
    auto built = std::make_unique<const ScaleTable>(
        build_scale_table(*m, alpha, grid_.x_max, grid_.h));
    it = tables_.emplace(key, std::move(built)).first;
  }
  return *it->second;
}

void ScaleCache::prewarm(std::initializer_list<double> alphas, double M) {
  for (double a : alphas) {
    table(a, 0.0);
    if (M != 0.0) table(a, M);
  }
}

} // namespace dam
