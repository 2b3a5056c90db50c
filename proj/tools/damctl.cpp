// damctl: command line front end for the dam policy library.
//
// Exit codes: 0 success, 1 bad configuration, 2 numeric self-check failure,
// 3 analytic-vs-simulation validation failure.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "dam/config_io.hpp"
#include "dam/errors.hpp"
#include "dam/exit_quantities.hpp"
#include "dam/mc_oracle.hpp"
#include "dam/optimizer.hpp"
#include "dam/policy_cost.hpp"
#include "dam/scale_cache.hpp"

namespace {

using namespace dam;

// Shortest round-trip formatting so repeated runs are byte-identical.
std::string fmt(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (std::isnan(v)) return "nan";
  char buf[32];
  const auto r = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, r.ptr);
}

struct CommonOpts {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<long long> paths;
  std::optional<double> grid_step;
  std::optional<int> threads;
  bool corrupt = false; // hidden: perturb the check-side model
};

void add_common(CLI::App* cmd, CommonOpts& o) {
  cmd->add_option("-c,--config", o.config_path, "JSON run configuration")
      ->required();
  cmd->add_option("--seed", o.seed, "override sim.seed");
  cmd->add_option("--paths", o.paths, "override sim.paths");
  cmd->add_option("--grid-step", o.grid_step, "override numerics.grid_step");
  cmd->add_option("--threads", o.threads, "override sim.threads");
  cmd->add_flag("--self-test-corrupt", o.corrupt)->group(""); // hidden
}

RunConfig load(const CommonOpts& o) {
  RunConfig cfg = load_run_config(o.config_path);
  if (o.seed) cfg.sim.seed = *o.seed;
  if (o.paths) cfg.sim.n_paths = *o.paths;
  if (o.grid_step) cfg.numerics.grid_step = *o.grid_step;
  if (o.threads) {
    cfg.sim.threads = *o.threads;
    if (cfg.search) cfg.search->threads = *o.threads;
  }
  return cfg;
}

const LevyModel& need_model(const RunConfig& cfg) {
  if (!cfg.model) throw ConfigError("config: \"model\" section is required");
  return *cfg.model;
}

const Policy& need_policy(const RunConfig& cfg) {
  if (!cfg.policy) throw ConfigError("config: \"policy\" section is required");
  return *cfg.policy;
}

const CostSpec& need_cost(const RunConfig& cfg) {
  if (!cfg.cost) throw ConfigError("config: \"cost\" section is required");
  return *cfg.cost;
}

// Small deliberate parameter error, used to prove the self checks can fail.
LevyModel corrupted(const LevyModel& m) {
  if (m.is_brownian())
    return LevyModel::brownian(m.mu() + 0.05, m.sigma2(), m.reflected());
  return LevyModel::bounded_variation(m.drift() * 1.02, m.jumps(),
                                      m.reflected());
}

std::ostream& open_output(std::ofstream& file, const std::string& path) {
  if (path.empty()) return std::cout;
  file.open(path);
  if (!file) throw ConfigError("cannot open output file \"" + path + "\"");
  return file;
}

// --- scale-table ---------------------------------------------------------

int cmd_scale_table(const CommonOpts& opts, double alpha, double shift_m,
                    double out_step, const std::string& out_path) {
  RunConfig cfg = load(opts);
  const LevyModel& model = need_model(cfg);
  ScaleCache cache(model, resolve_grid(cfg));
  const ScaleTable& table = cache.table(alpha, shift_m);
  const LevyModel check = opts.corrupt
                              ? corrupted(cache.model_with_drift(shift_m))
                              : cache.model_with_drift(shift_m);

  std::ofstream file;
  std::ostream& out = open_output(file, out_path);

  const double h = table.h();
  const std::size_t stride =
      out_step > 0.0
          ? std::max<std::size_t>(1, static_cast<std::size_t>(out_step / h + 0.5))
          : 1;

  out << "# alpha=" << fmt(alpha) << " eta=" << fmt(table.eta())
      << " grid_step=" << fmt(h) << " closed_form="
      << (table.closed_form() ? 1 : 0) << "\n";
  out << "x,W,Wbar,Wprime,Z\n";
  for (std::size_t k = 0; k < table.nodes(); k += stride) {
    const double x = table.node_x(k);
    out << fmt(x) << ',' << fmt(table.w(x)) << ',' << fmt(table.wbar(x)) << ','
        << fmt(table.wprime(x)) << ',' << fmt(table.z(x)) << '\n';
  }

  // Transform self-check: the table must reproduce 1/(phi(beta) - alpha).
  const double tol = table.closed_form() ? 1e-6 : 1e-3;
  double worst = 0.0;
  for (double off : {0.5, 1.5, 3.0}) {
    const double beta = table.eta() + off;
    worst = std::max(worst, laplace_identity_residual(table, check, beta));
  }
  std::cerr << "scale-table: transform residual " << fmt(worst) << " (tol "
            << fmt(tol) << ")\n";
  if (!(worst < tol))
    throw NumericError("scale table failed its transform self-check: residual " +
                       fmt(worst) + " >= " + fmt(tol));
  return 0;
}

// --- exit ----------------------------------------------------------------

int cmd_exit(const CommonOpts& opts, double alpha, std::optional<double> x_opt,
             bool csv) {
  RunConfig cfg = load(opts);
  const LevyModel& model = need_model(cfg);
  const Policy& p = need_policy(cfg);
  ScaleCache cache(model, resolve_grid(cfg));
  const double x = x_opt.value_or(p.tau);
  if (x > p.lambda) throw ConfigError("exit: x must be <= lambda");
  if (model.reflected() && x < 0.0) throw ConfigError("exit: x must be >= 0");

  const double xr = std::max(x, p.tau); // release leg starts no lower than tau
  OvershootKernel k = overshoot(cache, alpha, p.lambda, x,
                                default_z_max(model, p));
  std::vector<std::pair<const char*, double>> rows = {
      {"eta", eta_root_cached(cache, alpha)},
      {"eta_release", eta_root_cached(cache, alpha, p.M)},
      {"lt_fill", lt_fill(cache, alpha, p.lambda, x)},
      {"mean_fill", mean_fill(cache, p.lambda, x)},
      {"lt_release", lt_release(cache, alpha, p, std::max(xr, p.lambda))},
      {"mean_release", mean_release(cache, p, std::max(xr, p.lambda))},
      {"lt_cycle", lt_cycle(cache, alpha, p, x)},
      {"mean_cycle", mean_cycle(cache, p)},
      {"overshoot_atom", k.atom()},
      {"overshoot_mass", k.total_mass()},
  };
  if (csv) {
    std::cout << "quantity,value\n";
    for (const auto& [name, v] : rows) std::cout << name << ',' << fmt(v) << '\n';
  } else {
    for (const auto& [name, v] : rows) std::cout << name << '=' << fmt(v) << '\n';
  }
  return 0;
}

// --- evaluate ------------------------------------------------------------

int cmd_evaluate(const CommonOpts& opts, std::optional<double> x_opt) {
  RunConfig cfg = load(opts);
  const LevyModel& model = need_model(cfg);
  const Policy& p = need_policy(cfg);
  const CostSpec& spec = need_cost(cfg);
  ScaleCache cache(model, resolve_grid(cfg));
  const double x = x_opt.value_or(p.tau);

  std::cout << "longrun_average=" << fmt(longrun_average_cost(cache, p, spec))
            << '\n';
  std::cout << "mean_cycle=" << fmt(mean_cycle(cache, p)) << '\n';
  if (spec.alpha > 0.0) {
    std::cout << "lt_cycle=" << fmt(lt_cycle(cache, spec.alpha, p, p.tau))
              << '\n';
    std::cout << "cycle_cost=" << fmt(cycle_cost_fill(cache, p, spec, p.tau))
              << '\n';
    std::cout << "total_discounted=" << fmt(total_discounted_cost(cache, p, spec, x))
              << '\n';
  }
  return 0;
}

// --- optimize --------------------------------------------------------------

int cmd_optimize(const CommonOpts& opts, const std::string& surface_path) {
  RunConfig cfg = load(opts);
  const LevyModel& model = need_model(cfg);
  const CostSpec& spec = need_cost(cfg);
  if (!cfg.search) throw ConfigError("config: \"search\" section is required");
  ScaleCache cache(model, resolve_grid(cfg));

  const SearchResult res = optimize_policy(cache, spec, *cfg.search);
  if (!surface_path.empty()) {
    std::ofstream file;
    std::ostream& out = open_output(file, surface_path);
    out << "lambda,tau,cost\n";
    for (const SearchPoint& pt : res.trace)
      out << fmt(pt.lambda) << ',' << fmt(pt.tau) << ',' << fmt(pt.cost) << '\n';
  }
  std::cout << "lambda_star=" << fmt(res.best.lambda) << '\n';
  std::cout << "tau_star=" << fmt(res.best.tau) << '\n';
  std::cout << "cost=" << fmt(res.cost) << '\n';
  std::cout << "evaluations=" << res.evaluations << '\n';
  return 0;
}

// --- simulate --------------------------------------------------------------

void print_estimate(const char* name, const Estimate& e) {
  std::cout << name << "_mean=" << fmt(e.mean) << '\n'
            << name << "_stderr=" << fmt(e.std_error) << '\n'
            << name << "_n=" << e.n << '\n';
}

// A discounted total truncates with an e^{-alpha t} tail, so it needs a much
// shorter horizon than the longrun ratio estimator; 14/alpha cuts the tail
// below 1e-6 relative.
double default_total_horizon(double alpha) {
  return std::min(2000.0, std::max(50.0, 14.0 / alpha));
}

int cmd_simulate(const CommonOpts& opts, const std::string& what,
                 std::optional<double> x_opt, std::optional<double> horizon) {
  RunConfig cfg = load(opts);
  const LevyModel& model = need_model(cfg);
  const Policy& p = need_policy(cfg);
  const double x = x_opt.value_or(p.tau);

  if (what == "fill") {
    const double alpha = cfg.cost ? cfg.cost->alpha : 0.0;
    std::vector<double> alphas = {alpha};
    if (alpha > 0.0) alphas.push_back(0.0);
    FillSimResult r = simulate_fill(model, p.lambda, x, alphas, cfg.sim);
    for (std::size_t i = 0; i < alphas.size(); ++i) {
      std::cout << "alpha=" << fmt(alphas[i]) << '\n';
      print_estimate("lt_fill", r.lt[i]);
    }
    print_estimate("mean_fill", r.mean_time);
    print_estimate("crossed", r.crossed_fraction);
    std::cout << "truncated_fraction=" << fmt(r.truncated_fraction) << '\n';
    return 0;
  }
  if (what == "cycle") {
    CycleSimResult r = simulate_cycle(model, p, need_cost(cfg), cfg.sim);
    print_estimate("lt_cycle", r.lt_cycle);
    print_estimate("mean_cycle", r.mean_cycle);
    print_estimate("cost_discounted", r.cost_discounted);
    print_estimate("cost_undiscounted", r.cost_undiscounted);
    std::cout << "truncated_fraction=" << fmt(r.truncated_fraction) << '\n';
    return 0;
  }
  if (what == "longrun") {
    LongrunSimResult r =
        simulate_longrun(model, p, need_cost(cfg), horizon.value_or(2000.0),
                         cfg.sim);
    std::cout << "rate=" << fmt(r.rate) << '\n'
              << "rate_stderr=" << fmt(r.std_error) << '\n'
              << "cycles=" << r.cycles << '\n'
              << "time_total=" << fmt(r.time_total) << '\n'
              << "truncated_fraction=" << fmt(r.truncated_fraction) << '\n';
    return 0;
  }
  if (what == "total") {
    const CostSpec& spec = need_cost(cfg);
    const double h = horizon.value_or(default_total_horizon(spec.alpha));
    Estimate e = simulate_total_discounted(model, p, spec, x, h, cfg.sim);
    print_estimate("total_discounted", e);
    return 0;
  }
  throw ConfigError("simulate: --what must be fill, cycle, longrun or total");
}

// --- validate ---------------------------------------------------------------

struct ValRow {
  const char* name;
  double analytic;
  double mc;
  double se;
};

int cmd_validate(const CommonOpts& opts, double zmax,
                 std::optional<double> horizon) {
  RunConfig cfg = load(opts);
  const LevyModel& model = need_model(cfg);
  const Policy& p = need_policy(cfg);
  const CostSpec& spec = need_cost(cfg);

  // The corrupt flag perturbs only the analytic side; simulation still runs
  // the configured model, so the mismatch must be caught below.
  const LevyModel analytic_model = opts.corrupt ? corrupted(model) : model;
  ScaleCache cache(analytic_model, resolve_grid(cfg));

  std::vector<ValRow> rows;
  {
    FillSimResult r = simulate_fill(model, p.lambda, p.tau, {spec.alpha}, cfg.sim);
    rows.push_back({"lt_fill", lt_fill(cache, spec.alpha, p.lambda, p.tau),
                    r.lt[0].mean, r.lt[0].std_error});
    const double mf = mean_fill(cache, p.lambda, p.tau);
    if (std::isfinite(mf) && r.truncated_fraction == 0.0)
      rows.push_back({"mean_fill", mf, r.mean_time.mean, r.mean_time.std_error});
  }
  {
    CycleSimResult r = simulate_cycle(model, p, spec, cfg.sim);
    rows.push_back({"lt_cycle", lt_cycle(cache, spec.alpha, p, p.tau),
                    r.lt_cycle.mean, r.lt_cycle.std_error});
    const double mcyc = mean_cycle(cache, p);
    if (std::isfinite(mcyc) && r.truncated_fraction == 0.0)
      rows.push_back(
          {"mean_cycle", mcyc, r.mean_cycle.mean, r.mean_cycle.std_error});
    if (spec.alpha > 0.0)
      rows.push_back({"cycle_cost", cycle_cost_fill(cache, p, spec, p.tau),
                      r.cost_discounted.mean, r.cost_discounted.std_error});
  }
  if (spec.alpha > 0.0) {
    const double h = horizon.value_or(default_total_horizon(spec.alpha));
    Estimate e = simulate_total_discounted(model, p, spec, p.tau, h, cfg.sim);
    rows.push_back({"total_discounted",
                    total_discounted_cost(cache, p, spec, p.tau), e.mean,
                    e.std_error});
  } else {
    LongrunSimResult r =
        simulate_longrun(model, p, spec, horizon.value_or(2000.0), cfg.sim);
    rows.push_back({"longrun_average", longrun_average_cost(cache, p, spec),
                    r.rate, r.std_error});
  }

  bool ok = true;
  std::printf("%-18s %14s %14s %12s %8s  %s\n", "quantity", "analytic", "mc",
              "stderr", "z", "verdict");
  for (const ValRow& r : rows) {
    const double diff = r.mc - r.analytic;
    bool pass;
    double z = 0.0;
    if (r.se < 1e-12) {
      pass = std::fabs(diff) < 1e-9;
    } else {
      z = diff / r.se;
      pass = std::fabs(z) <= zmax;
    }
    if (!pass) ok = false;
    std::printf("%-18s %14.8f %14.8f %12.2e %8.2f  %s\n", r.name, r.analytic,
                r.mc, r.se, z, pass ? "pass" : "FAIL");
  }
  if (!ok)
    throw ValidationError("simulation disagrees with the analytic values");
  std::cout << "validate: all " << rows.size() << " quantities within " << zmax
            << " standard errors\n";
  return 0;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"dam content process: scale tables, exit laws, policy costs"};
  app.require_subcommand(1);

  CommonOpts opts;

  auto* c_table = app.add_subcommand("scale-table", "tabulate W, Wbar, W', Z");
  double st_alpha = 0.0, st_shift = 0.0, st_step = 0.0;
  std::string st_out;
  add_common(c_table, opts);
  c_table->add_option("--alpha", st_alpha, "discount rate");
  c_table->add_option("--shift-m", st_shift, "extra outflow drift M");
  c_table->add_option("--step", st_step, "output stride in x (default: grid)");
  c_table->add_option("-o,--output", st_out, "CSV file (default: stdout)");

  auto* c_exit = app.add_subcommand("exit", "exit-time transforms and moments");
  double ex_alpha = 0.0;
  std::optional<double> ex_x;
  bool ex_csv = false;
  add_common(c_exit, opts);
  c_exit->add_option("--alpha", ex_alpha, "discount rate");
  c_exit->add_option("--x", ex_x, "start level (default: tau)");
  c_exit->add_flag("--csv", ex_csv, "CSV output");

  auto* c_eval = app.add_subcommand("evaluate", "cost of one (lambda, tau) policy");
  std::optional<double> ev_x;
  add_common(c_eval, opts);
  c_eval->add_option("--x", ev_x, "start level (default: tau)");

  auto* c_opt = app.add_subcommand("optimize", "search for the best (lambda, tau)");
  std::string op_surface;
  add_common(c_opt, opts);
  c_opt->add_option("--surface", op_surface, "write the scan grid as CSV");

  auto* c_sim = app.add_subcommand("simulate", "Monte Carlo estimates");
  std::string sm_what = "cycle";
  std::optional<double> sm_x, sm_horizon;
  add_common(c_sim, opts);
  c_sim->add_option("--what", sm_what, "fill | cycle | longrun | total");
  c_sim->add_option("--x", sm_x, "start level (default: tau)");
  c_sim->add_option("--horizon", sm_horizon,
                    "time horizon (longrun: 2000, total: 14/alpha)");

  auto* c_val = app.add_subcommand("validate", "analytic vs Monte Carlo cross-check");
  double va_z = 4.0;
  std::optional<double> va_horizon;
  add_common(c_val, opts);
  c_val->add_option("--z-max", va_z, "largest acceptable |z| score");
  c_val->add_option("--horizon", va_horizon,
                    "simulation horizon (default as in simulate)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (c_table->parsed())
      return cmd_scale_table(opts, st_alpha, st_shift, st_step, st_out);
    if (c_exit->parsed()) return cmd_exit(opts, ex_alpha, ex_x, ex_csv);
    if (c_eval->parsed()) return cmd_evaluate(opts, ev_x);
    if (c_opt->parsed()) return cmd_optimize(opts, op_surface);
    if (c_sim->parsed()) return cmd_simulate(opts, sm_what, sm_x, sm_horizon);
    if (c_val->parsed()) return cmd_validate(opts, va_z, va_horizon);
  } catch (const dam::ValidationError& e) {
    std::cerr << "validation error: " << e.what() << '\n';
    return 3;
  } catch (const dam::NumericError& e) {
    std::cerr << "numeric error: " << e.what() << '\n';
    return 2;
  } catch (const dam::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
