#include <benchmark/benchmark.h>

#include "dam/mc_oracle.hpp"
#include "dam/policy_cost.hpp"
#include "dam/scale_cache.hpp"

namespace {

dam::LevyModel cp_model() {
  return dam::LevyModel::bounded_variation(
      2.0, dam::CompoundPoissonJumps{1.0, dam::ExponentialJumps{1.0}}, true);
}

dam::Policy ref_policy(double M) {
  dam::Policy p;
  p.lambda = 1.0;
  p.tau = 0.3;
  p.M = M;
  p.V = 2.0;
  return p;
}

dam::CostSpec ref_costs() {
  dam::CostSpec spec;
  spec.K1 = spec.K2 = 1.0;
  spec.R = 0.5;
  spec.alpha = 0.1;
  spec.g = dam::PiecewiseLinear::constant(0.1);
  spec.g_star = dam::PiecewiseLinear::constant(0.1);
  return spec;
}

// Ladder-convolution table construction, the dominant setup cost for jump
// models. The grid pitch is the benchmark argument in units of 1e-4.
void bm_build_table(benchmark::State& state) {
  const dam::LevyModel m = cp_model();
  const double h = 1e-4 * static_cast<double>(state.range(0));
  for (auto _ : state) {
    dam::ScaleTable t = dam::build_scale_table(m, 0.5, 4.0, h);
    benchmark::DoNotOptimize(t.w(3.0));
  }
}
BENCHMARK(bm_build_table)->Arg(40)->Arg(20)->Arg(10);

// One full-cycle transform evaluation on a warm cache, the unit of work the
// optimizer repeats per grid point.
void bm_lt_cycle(benchmark::State& state) {
  dam::ScaleCache cache(cp_model(), dam::GridSpec{1e-3, 3.5});
  const dam::Policy p = ref_policy(1.0);
  dam::lt_cycle(cache, 0.1, p, p.tau); // build tables outside the loop
  for (auto _ : state)
    benchmark::DoNotOptimize(dam::lt_cycle(cache, 0.1, p, p.tau));
}
BENCHMARK(bm_lt_cycle);

void bm_longrun_cost(benchmark::State& state) {
  dam::ScaleCache cache(dam::LevyModel::brownian(0.0, 1.0, true),
                        dam::GridSpec{1e-3, 3.5});
  const dam::Policy p = ref_policy(2.0);
  const dam::CostSpec spec = ref_costs();
  dam::longrun_average_cost(cache, p, spec);
  for (auto _ : state)
    benchmark::DoNotOptimize(dam::longrun_average_cost(cache, p, spec));
}
BENCHMARK(bm_longrun_cost);

// Event-driven cycle simulation throughput; paths per iteration is the
// benchmark argument.
void bm_simulate_cycle(benchmark::State& state) {
  const dam::LevyModel m = cp_model();
  const dam::Policy p = ref_policy(1.0);
  const dam::CostSpec spec = ref_costs();
  dam::SimConfig cfg;
  cfg.n_paths = state.range(0);
  cfg.seed = 1;
  cfg.threads = 1;
  for (auto _ : state) {
    dam::CycleSimResult r = dam::simulate_cycle(m, p, spec, cfg);
    benchmark::DoNotOptimize(r.mean_cycle.mean);
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(bm_simulate_cycle)->Arg(1000)->Arg(4000);

} // namespace

BENCHMARK_MAIN();
