#pragma once

#include <optional>
#include <string>

#include "dam/levy_model.hpp"
#include "dam/mc_oracle.hpp"
#include "dam/optimizer.hpp"
#include "dam/policy.hpp"

namespace dam {

struct NumericsConfig {
  std::optional<double> grid_step;
  std::optional<double> x_max;
};

// One JSON document drives every tool entry point; sections are optional so
// a config can carry only what a given subcommand needs. Unknown keys are
// rejected to catch typos.
struct RunConfig {
  std::optional<LevyModel> model;
  std::optional<Policy> policy;
  std::optional<CostSpec> cost;
  NumericsConfig numerics;
  SimConfig sim;
  std::optional<SearchSpec> search;
};

RunConfig load_run_config(const std::string& path);
RunConfig parse_run_config(const std::string& json_text);

// Grid defaults: x_max covers the levels the policy can reach, with h from
// the numerics section or 1e-3.
GridSpec resolve_grid(const RunConfig& cfg);

} // namespace dam
