#include <array>
#include <cstdio>
#include <string>

#include <doctest.h>

#include "dam/config_io.hpp"

using namespace dam;

namespace {

std::string data_path(const char* name) {
  return std::string(DAMFLOW_TEST_DATA_DIR) + "/" + name;
}

#ifdef DAMCTL_PATH
struct RunOutput {
  int exit_code = -1;
  std::string text;
};

// Runs damctl with stderr folded into stdout; fine for exit-code and
// byte-identity checks.
RunOutput run_cli(const std::string& args) {
  const std::string cmd = std::string(DAMCTL_PATH) + " " + args + " 2>&1";
  RunOutput out;
  FILE* p = popen(cmd.c_str(), "r");
  REQUIRE(p != nullptr);
  std::array<char, 4096> buf;
  std::size_t got;
  while ((got = fread(buf.data(), 1, buf.size(), p)) > 0)
    out.text.append(buf.data(), got);
  const int status = pclose(p);
  out.exit_code = (status >= 0 && WIFEXITED(status)) ? WEXITSTATUS(status) : -1;
  return out;
}
#endif

} // namespace

TEST_CASE("full document round-trips into typed sections") {
  RunConfig cfg = load_run_config(data_path("brownian_reflected.json"));
  REQUIRE(cfg.model.has_value());
  CHECK(cfg.model->reflected());
  REQUIRE(cfg.policy.has_value());
  CHECK(cfg.policy->lambda == 1.0);
  CHECK(cfg.policy->tau == 0.3);
  CHECK(cfg.policy->V == 2.0);
  REQUIRE(cfg.cost.has_value());
  CHECK(cfg.cost->alpha == 0.1);
  CHECK(cfg.cost->g(5.0) == 0.1);
  CHECK(cfg.sim.n_paths == 20000);
  CHECK(cfg.sim.seed == 20260819u);
}

TEST_CASE("capacity accepts the string inf") {
  RunConfig cfg = parse_run_config(R"({
    "model": {"type": "brownian", "mu": 0.5, "sigma2": 1.0},
    "policy": {"lambda": 1.0, "M": 2.0, "V": "inf"}
  })");
  CHECK(!cfg.policy->finite_v());
}

TEST_CASE("holding cost accepts a constant or a knot table") {
  RunConfig cfg = parse_run_config(R"({
    "cost": {"alpha": 0.5, "g": 2.0, "g_star": [[0.0, 0.0], [2.0, 4.0]]}
  })");
  CHECK(cfg.cost->g(17.0) == 2.0);
  CHECK(cfg.cost->g_star(1.0) == doctest::Approx(2.0));
  CHECK(cfg.cost->g_star(5.0) == 4.0); // clamped past the last knot
}

TEST_CASE("typos and wrong shapes are reported with their location") {
  CHECK_THROWS_WITH_AS(parse_run_config(R"({"model": {"type": "brownian",
      "mu": 0.0, "sigma2": 1.0, "reflcted": true}})"),
                       doctest::Contains("model"), ConfigError);
  CHECK_THROWS_WITH_AS(parse_run_config(R"({"policy": {"lambda": "wide"}})"),
                       doctest::Contains("policy"), ConfigError);
  CHECK_THROWS_WITH_AS(parse_run_config(R"({"policy": {"tau": 0.1}})"),
                       doctest::Contains("lambda"), ConfigError);
  CHECK_THROWS_WITH_AS(parse_run_config(R"({"model": {"type": "levy"}})"),
                       doctest::Contains("type"), ConfigError);
  CHECK_THROWS_AS(parse_run_config("{"), ConfigError);
  CHECK_THROWS_WITH_AS(
      parse_run_config(R"({"cost": {"g": [[1.0, 0.0], [0.5, 1.0]]}})"),
      doctest::Contains("cost.g"), ConfigError);
}

TEST_CASE("grid resolution covers the reachable levels") {
  RunConfig cfg = parse_run_config(R"({
    "model": {"type": "brownian", "mu": 0.0, "sigma2": 1.0},
    "policy": {"lambda": 1.5, "M": 1.0, "V": 3.0}
  })");
  GridSpec g = resolve_grid(cfg);
  CHECK(g.h == 1e-3);
  CHECK(g.x_max == doctest::Approx(4.0)); // V + 1

  cfg.numerics.grid_step = 5e-3;
  cfg.numerics.x_max = 7.0;
  g = resolve_grid(cfg);
  CHECK(g.h == 5e-3);
  CHECK(g.x_max == 7.0);

  RunConfig bare = parse_run_config("{}");
  CHECK(resolve_grid(bare).x_max == 10.0);
}

#ifdef DAMCTL_PATH

TEST_CASE("cli maps failures onto distinct exit codes") {
  // Missing config file.
  CHECK(run_cli("exit -c /nonexistent.json --alpha 0.5").exit_code == 1);
  // Corrupted check model trips the transform residual (numeric failure).
  CHECK(run_cli("scale-table -c " + data_path("cp_reflected.json") +
                " --alpha 0.5 --self-test-corrupt -o /dev/null")
            .exit_code == 2);
  // Corrupted check model fails simulation-vs-analytic validation. The short
  // horizon only biases the total row; the corruption is orders louder.
  RunOutput v = run_cli("validate -c " + data_path("brownian_reflected.json") +
                        " --paths 1500 --horizon 60 --self-test-corrupt");
  CHECK(v.exit_code == 3);
  CHECK(v.text.find("FAIL") != std::string::npos);
}

TEST_CASE("cli analytic output is exact and stable") {
  const std::string cmd =
      "exit -c " + data_path("brownian_reflected.json") + " --alpha 0.1 --x 0.3";
  RunOutput a = run_cli(cmd);
  REQUIRE(a.exit_code == 0);
  CHECK(a.text.find("lt_cycle") != std::string::npos);
  CHECK(a.text.find("0.88493294") != std::string::npos);
  RunOutput b = run_cli(cmd);
  CHECK(a.text == b.text);
}

TEST_CASE("cli simulation replays byte for byte") {
  const std::string cmd = "simulate -c " + data_path("cp_reflected.json") +
                          " --what fill --x 0.3 --paths 3000";
  RunOutput a = run_cli(cmd);
  REQUIRE(a.exit_code == 0);
  RunOutput b = run_cli(cmd);
  CHECK(a.text == b.text);
  RunOutput c = run_cli(cmd + " --threads 3");
  CHECK(a.text == c.text);
}

TEST_CASE("cli writes a scale table with the transform header") {
  const std::string out = "/tmp/damctl_table_test.csv";
  RunOutput r = run_cli("scale-table -c " + data_path("cp_reflected.json") +
                        " --alpha 0.5 --step 0.002 -o " + out);
  REQUIRE(r.exit_code == 0);
  FILE* f = std::fopen(out.c_str(), "r");
  REQUIRE(f != nullptr);
  std::array<char, 512> line;
  REQUIRE(std::fgets(line.data(), line.size(), f) != nullptr);
  CHECK(std::string(line.data()).find("#") == 0);
  REQUIRE(std::fgets(line.data(), line.size(), f) != nullptr);
  CHECK(std::string(line.data()).find("x,") == 0);
  std::fclose(f);
  std::remove(out.c_str());
}

#endif
