#include "dam/config_io.hpp"

#include <cmath>
#include <fstream>
#include <initializer_list>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "dam/errors.hpp"

namespace dam {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& where, const std::string& what) {
  throw ConfigError("config: " + where + ": " + what);
}

void check_keys(const json& j, const std::string& where,
                std::initializer_list<const char*> allowed) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool ok = false;
    for (const char* k : allowed)
      if (it.key() == k) {
        ok = true;
        break;
      }
    if (!ok) fail(where, "unknown key \"" + it.key() + "\"");
  }
}

const json& field(const json& j, const std::string& where, const char* key) {
  const auto it = j.find(key);
  if (it == j.end()) fail(where, std::string("missing key \"") + key + "\"");
  return *it;
}

double read_double(const json& j, const std::string& where, const char* key) {
  const json& v = field(j, where, key);
  if (!v.is_number()) fail(where, std::string("\"") + key + "\" must be a number");
  return v.get<double>();
}

double read_double_or(const json& j, const std::string& where, const char* key,
                      double dflt) {
  if (!j.contains(key)) return dflt;
  return read_double(j, where, key);
}

// A level bound: a number, or the string "inf" for no bound.
double read_level_or(const json& j, const std::string& where, const char* key,
                     double dflt) {
  if (!j.contains(key)) return dflt;
  const json& v = j.at(key);
  if (v.is_string()) {
    if (v.get<std::string>() == "inf") return kInf;
    fail(where, std::string("\"") + key + "\" must be a number or \"inf\"");
  }
  if (!v.is_number()) fail(where, std::string("\"") + key + "\" must be a number or \"inf\"");
  return v.get<double>();
}

long long read_int_or(const json& j, const std::string& where, const char* key,
                      long long dflt) {
  if (!j.contains(key)) return dflt;
  const json& v = j.at(key);
  if (!v.is_number_integer()) fail(where, std::string("\"") + key + "\" must be an integer");
  return v.get<long long>();
}

bool read_bool_or(const json& j, const std::string& where, const char* key,
                  bool dflt) {
  if (!j.contains(key)) return dflt;
  const json& v = j.at(key);
  if (!v.is_boolean()) fail(where, std::string("\"") + key + "\" must be a boolean");
  return v.get<bool>();
}

std::string read_string(const json& j, const std::string& where,
                        const char* key) {
  const json& v = field(j, where, key);
  if (!v.is_string()) fail(where, std::string("\"") + key + "\" must be a string");
  return v.get<std::string>();
}

// Either a single number (a constant) or [[x0, v0], [x1, v1], ...] with
// strictly increasing x.
PiecewiseLinear read_piecewise(const json& v, const std::string& where) {
  if (v.is_number()) return PiecewiseLinear::constant(v.get<double>());
  if (!v.is_array()) fail(where, "must be a number or an array of [x, value] pairs");
  std::vector<double> xs, vs;
  xs.reserve(v.size());
  vs.reserve(v.size());
  for (const json& p : v) {
    if (!p.is_array() || p.size() != 2 || !p[0].is_number() || !p[1].is_number())
      fail(where, "entries must be [x, value] number pairs");
    xs.push_back(p[0].get<double>());
    vs.push_back(p[1].get<double>());
  }
  if (xs.empty()) fail(where, "needs at least one [x, value] pair");
  for (std::size_t i = 1; i < xs.size(); ++i)
    if (!(xs[i] > xs[i - 1])) fail(where, "x values must be strictly increasing");
  return PiecewiseLinear(std::move(xs), std::move(vs));
}

std::variant<ExponentialJumps, TabulatedJumpDensity> read_jump(
    const json& j, const std::string& where) {
  if (!j.is_object()) fail(where, "must be an object");
  const std::string type = read_string(j, where, "type");
  if (type == "exponential") {
    check_keys(j, where, {"type", "b"});
    return ExponentialJumps{read_double(j, where, "b")};
  }
  if (type == "tabulated") {
    check_keys(j, where, {"type", "dx", "pdf"});
    const json& pv = field(j, where, "pdf");
    if (!pv.is_array() || pv.empty()) fail(where, "\"pdf\" must be a non-empty array");
    std::vector<double> pdf;
    pdf.reserve(pv.size());
    for (const json& e : pv) {
      if (!e.is_number()) fail(where, "\"pdf\" entries must be numbers");
      pdf.push_back(e.get<double>());
    }
    return TabulatedJumpDensity(read_double(j, where, "dx"), std::move(pdf));
  }
  fail(where, "\"type\" must be \"exponential\" or \"tabulated\"");
}

LevyModel read_model(const json& j) {
  const std::string where = "model";
  if (!j.is_object()) fail(where, "must be an object");
  const std::string type = read_string(j, where, "type");
  const bool reflected = read_bool_or(j, where, "reflected", false);
  if (type == "brownian") {
    check_keys(j, where, {"type", "reflected", "mu", "sigma2"});
    return LevyModel::brownian(read_double(j, where, "mu"),
                               read_double(j, where, "sigma2"), reflected);
  }
  if (type == "compound_poisson") {
    check_keys(j, where, {"type", "reflected", "drift", "rate", "jump"});
    CompoundPoissonJumps cp{read_double(j, where, "rate"),
                            read_jump(field(j, where, "jump"), "model.jump")};
    return LevyModel::bounded_variation(read_double(j, where, "drift"),
                                        std::move(cp), reflected);
  }
  if (type == "gamma") {
    check_keys(j, where, {"type", "reflected", "drift", "a", "b"});
    return LevyModel::bounded_variation(
        read_double(j, where, "drift"),
        GammaJumps{read_double(j, where, "a"), read_double(j, where, "b")},
        reflected);
  }
  if (type == "inverse_gaussian") {
    check_keys(j, where, {"type", "reflected", "drift", "sigma", "c"});
    return LevyModel::bounded_variation(
        read_double(j, where, "drift"),
        InverseGaussianJumps{read_double(j, where, "sigma"),
                             read_double(j, where, "c")},
        reflected);
  }
  fail(where, "\"type\" must be one of brownian, compound_poisson, gamma, "
              "inverse_gaussian");
}

Policy read_policy(const json& j) {
  const std::string where = "policy";
  if (!j.is_object()) fail(where, "must be an object");
  check_keys(j, where, {"lambda", "tau", "M", "V"});
  Policy p;
  p.lambda = read_double(j, where, "lambda");
  p.tau = read_double_or(j, where, "tau", 0.0);
  p.M = read_double_or(j, where, "M", 1.0);
  p.V = read_level_or(j, where, "V", kInf);
  p.validate();
  return p;
}

CostSpec read_cost(const json& j) {
  const std::string where = "cost";
  if (!j.is_object()) fail(where, "must be an object");
  check_keys(j, where, {"K1", "K2", "R", "alpha", "g", "g_star"});
  CostSpec c;
  c.K1 = read_double_or(j, where, "K1", 0.0);
  c.K2 = read_double_or(j, where, "K2", 0.0);
  c.R = read_double_or(j, where, "R", 0.0);
  c.alpha = read_double_or(j, where, "alpha", 0.0);
  if (j.contains("g")) c.g = read_piecewise(j.at("g"), "cost.g");
  if (j.contains("g_star")) c.g_star = read_piecewise(j.at("g_star"), "cost.g_star");
  c.validate();
  return c;
}

NumericsConfig read_numerics(const json& j) {
  const std::string where = "numerics";
  if (!j.is_object()) fail(where, "must be an object");
  check_keys(j, where, {"grid_step", "x_max"});
  NumericsConfig n;
  if (j.contains("grid_step")) n.grid_step = read_double(j, where, "grid_step");
  if (j.contains("x_max")) n.x_max = read_double(j, where, "x_max");
  if (n.grid_step && !(*n.grid_step > 0.0)) fail(where, "\"grid_step\" must be > 0");
  if (n.x_max && !(*n.x_max > 0.0)) fail(where, "\"x_max\" must be > 0");
  return n;
}

SimConfig read_sim(const json& j) {
  const std::string where = "sim";
  if (!j.is_object()) fail(where, "must be an object");
  check_keys(j, where,
             {"paths", "dt", "seed", "horizon_cap", "antithetic", "threads"});
  SimConfig s;
  s.n_paths = read_int_or(j, where, "paths", s.n_paths);
  s.dt = read_double_or(j, where, "dt", s.dt);
  s.seed = static_cast<std::uint64_t>(read_int_or(
      j, where, "seed", static_cast<long long>(s.seed)));
  s.horizon_cap = read_double_or(j, where, "horizon_cap", s.horizon_cap);
  s.antithetic = read_bool_or(j, where, "antithetic", s.antithetic);
  s.threads = static_cast<int>(read_int_or(j, where, "threads", s.threads));
  if (s.n_paths < 2) fail(where, "\"paths\" must be >= 2");
  if (!(s.dt > 0.0)) fail(where, "\"dt\" must be > 0");
  if (!(s.horizon_cap > 0.0)) fail(where, "\"horizon_cap\" must be > 0");
  return s;
}

std::pair<double, double> read_range(const json& j, const std::string& where,
                                     const char* key) {
  const json& v = field(j, where, key);
  if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number())
    fail(where, std::string("\"") + key + "\" must be [min, max]");
  return {v[0].get<double>(), v[1].get<double>()};
}

SearchSpec read_search(const json& j) {
  const std::string where = "search";
  if (!j.is_object()) fail(where, "must be an object");
  check_keys(j, where,
             {"objective", "x", "lambda", "tau", "lambda_points", "tau_points",
              "refine_tol", "threads", "M", "V"});
  SearchSpec s;
  const std::string obj = read_string(j, where, "objective");
  if (obj == "longrun")
    s.objective = Objective::kLongRunAverage;
  else if (obj == "discounted")
    s.objective = Objective::kTotalDiscounted;
  else
    fail(where, "\"objective\" must be \"longrun\" or \"discounted\"");
  s.x = read_double_or(j, where, "x", 0.0);
  std::tie(s.lambda_min, s.lambda_max) = read_range(j, where, "lambda");
  std::tie(s.tau_min, s.tau_max) = read_range(j, where, "tau");
  s.lambda_points = static_cast<int>(
      read_int_or(j, where, "lambda_points", s.lambda_points));
  s.tau_points =
      static_cast<int>(read_int_or(j, where, "tau_points", s.tau_points));
  s.refine_tol = read_double_or(j, where, "refine_tol", s.refine_tol);
  s.threads = static_cast<int>(read_int_or(j, where, "threads", s.threads));
  s.M = read_double_or(j, where, "M", 1.0);
  s.V = read_level_or(j, where, "V", kInf);
  s.validate();
  return s;
}

} // namespace

RunConfig parse_run_config(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: invalid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("config: top level must be an object");
  check_keys(j, "top level",
             {"model", "policy", "cost", "numerics", "sim", "search"});
  RunConfig cfg;
  if (j.contains("model")) cfg.model = read_model(j.at("model"));
  if (j.contains("policy")) cfg.policy = read_policy(j.at("policy"));
  if (j.contains("cost")) cfg.cost = read_cost(j.at("cost"));
  if (j.contains("numerics")) cfg.numerics = read_numerics(j.at("numerics"));
  if (j.contains("sim")) cfg.sim = read_sim(j.at("sim"));
  if (j.contains("search")) cfg.search = read_search(j.at("search"));
  return cfg;
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open \"" + path + "\"");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_run_config(buf.str());
}

GridSpec resolve_grid(const RunConfig& cfg) {
  GridSpec g;
  if (cfg.numerics.grid_step) g.h = *cfg.numerics.grid_step;
  if (cfg.numerics.x_max) {
    g.x_max = *cfg.numerics.x_max;
    return g;
  }
  double reach = 0.0;
  if (cfg.policy) {
    reach = std::max(reach, cfg.policy->lambda);
    if (cfg.policy->finite_v()) reach = std::max(reach, cfg.policy->V);
  }
  if (cfg.search) {
    reach = std::max(reach, cfg.search->lambda_max);
    if (std::isfinite(cfg.search->V)) reach = std::max(reach, cfg.search->V);
  }
  if (reach > 0.0) g.x_max = reach + 1.0;
  return g;
}

} // namespace dam
