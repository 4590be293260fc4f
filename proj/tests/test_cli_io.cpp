#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "json.hpp"
#include "phdg/config.hpp"
#include "phdg/output.hpp"
#include "phdg/study.hpp"

using namespace phdg;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream f(p);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("phdg_test_" + name);
  fs::remove_all(p);
  return p;
}

RunConfig tiny_sweep(const fs::path& out, int threads) {
  RunConfig c = parse_config(
      "experiment = \"example1\"\nstudy = \"sweep-h\"\nmesh_levels = [1, 2]\nsteps = 4\nfinal_time = 0.02\n");
  c.output_dir = out.string();
  c.threads = threads;
  return c;
}

}  // namespace

TEST_CASE("experiment defaults") {
  RunConfig c = parse_config("experiment = \"example1\"\n");
  CHECK(c.params.epsilon == 1.0);
  CHECK(c.params.nu == 1.0);
  CHECK(c.params.alpha == 8.0);
  CHECK(c.params.beta == 10.0);
  CHECK(c.final_time == doctest::Approx(0.2));
  CHECK(c.diagonal == Diagonal::falling);
  CHECK(c.degree == 1);

  c = parse_config("[example1]\nepsilon = 1e-3\n");
  CHECK(c.params.beta == 300.0);
  c = parse_config("[example1]\nepsilon = 0\n");
  CHECK(c.params.beta == 10.0);
  c = parse_config("epsilon = 1e-3\nbeta = 50\n");
  CHECK(c.params.beta == 50.0);

  c = parse_config("experiment = \"example2\"\n");
  CHECK(c.data == CaseId::example2);
  CHECK(c.params.nu == 1e-2);
  CHECK(c.params.epsilon == 1e-4);
  CHECK(c.params.alpha == 600.0);
  CHECK(c.params.beta == 600.0);
  CHECK(c.final_time == 1.0);
  CHECK(c.steps == 100);
  CHECK(c.mesh_level == 6);
}

TEST_CASE("sections, overrides and fractions") {
  const std::string doc =
      "experiment = \"example1\"\n# comment\nepsilon = 1\nsteps = 10\n[example1]\nepsilon = 0\n"
      "[example2]\nsteps = 7\n";
  RunConfig c = parse_config(doc);
  CHECK(c.params.epsilon == 0.0);
  CHECK(c.steps == 10);
  c = parse_config(doc, "tau = 0.2/40\n");
  CHECK(c.steps == 40);
  c = parse_config(doc, "experiment = \"example2\"\n");
  CHECK(c.steps == 7);
  c = parse_config("experiment = \"custom\"\ndata = \"example2\"\nnu = 0.5\n");
  CHECK(c.experiment == Experiment::custom);
  CHECK(c.data == CaseId::example2);
  CHECK(c.params.nu == 0.5);
  CHECK(steps_for(0.2, 0.2 / 820) == 820);
  CHECK_THROWS_AS(steps_for(0.2, 0.03), ConfigError);
}

TEST_CASE("invalid configurations name the field") {
  CHECK_THROWS_WITH_AS(parse_config("epsilonn = 1\n"), doctest::Contains("epsilonn"), ConfigError);
  CHECK_THROWS_WITH_AS(parse_config("[nope]\nepsilon = 1\n"), doctest::Contains("nope"), ConfigError);
  CHECK_THROWS_WITH_AS(parse_config("degree = 3\n"), doctest::Contains("degree"), ConfigError);
  CHECK_THROWS_WITH_AS(parse_config("epsilon = -1\n"), doctest::Contains("epsilon"), ConfigError);
  CHECK_THROWS_WITH_AS(parse_config("nu = abc\n"), doctest::Contains("nu"), ConfigError);
  CHECK_THROWS_WITH_AS(parse_config("data = \"example2\"\n"), doctest::Contains("data"), ConfigError);
  CHECK_THROWS_WITH_AS(parse_config("final_time = 1\ntau = 0.3\n"), doctest::Contains("tau"), ConfigError);
  CHECK_THROWS_WITH_AS(parse_config("diagonal = \"up\"\n"), doctest::Contains("diagonal"), ConfigError);
  CHECK_THROWS_AS(parse_config("threads = 0\n"), ConfigError);
  CHECK_THROWS_AS(load_config("/nonexistent/phdg.toml"), ConfigError);
}

TEST_CASE("number formatting") {
  CHECK(format_number(0.0273) == "0.0273");
  CHECK(format_number(1.0 / 3.0) == "0.333333");
  CHECK(format_number(std::nan("")) == "-");
}

TEST_CASE("study outputs are deterministic and complete") {
  const fs::path a = scratch("a"), b = scratch("b");
  std::ostringstream log;
  REQUIRE(run_study(tiny_sweep(a, 1), log) == kExitOk);
  REQUIRE(run_study(tiny_sweep(b, 2), log) == kExitOk);
  CHECK(slurp(a / "convergence.csv") == slurp(b / "convergence.csv"));
  CHECK(slurp(a / "diagnostics.csv") == slurp(b / "diagnostics.csv"));

  std::istringstream csv(slurp(a / "convergence.csv"));
  std::string header, line;
  std::getline(csv, header);
  CHECK(header.rfind("h,level,N,u_l2,u_l2_rate", 0) == 0);
  int rows = 0;
  while (std::getline(csv, line))
    if (!line.empty()) ++rows;
  CHECK(rows == 2);

  std::istringstream diag(slurp(a / "diagnostics.csv"));
  rows = -1;
  while (std::getline(diag, line))
    if (!line.empty()) ++rows;
  CHECK(rows == 8);  // two points of four steps

  const auto m = nlohmann::json::parse(slurp(a / "manifest.json"));
  CHECK(m["status"] == "OK");
  CHECK(m["code_version"] == code_version());
  std::vector<std::string> keys;
  for (auto it = m["config"].begin(); it != m["config"].end(); ++it) keys.push_back(it.key());
  std::vector<std::string> expected = config_keys();
  std::sort(keys.begin(), keys.end());
  std::sort(expected.begin(), expected.end());
  CHECK(keys == expected);
  REQUIRE(m["points"].size() == 2);
  CHECK(m["points"][0]["tau"].get<double>() == doctest::Approx(0.005));
  CHECK(m["points"][1]["label"] == "h2_N4");
  CHECK(m["points"][0]["regularization_activations"] == 0);
  fs::remove_all(a);
  fs::remove_all(b);
}

TEST_CASE("sweep order does not depend on scheduling") {
  RunConfig c = parse_config("study = \"sweep-tau\"\nmesh_level = 1\nsteps_list = [4, 2, 8]\nfinal_time = 0.04\n");
  c.threads = 3;
  const StudyOutcome o = execute_study(c);
  REQUIRE(o.points.size() == 3);
  CHECK(o.points[0].time_steps == 4);
  CHECK(o.points[1].time_steps == 2);
  CHECK(o.points[2].time_steps == 8);
  CHECK(o.report.sweep == "tau");
}

TEST_CASE("a numerical failure gives the numerical exit code and a FAILED manifest") {
  const fs::path a = scratch("fail");
  RunConfig c = tiny_sweep(a, 1);
  c.blowup_bound = 1e-6;
  std::ostringstream log;
  CHECK(run_study(c, log) == kExitNumerical);
  const auto m = nlohmann::json::parse(slurp(a / "manifest.json"));
  CHECK(m["status"] == "FAILED");
  CHECK(m["points"][0]["status"] == "FAILED");
  CHECK(slurp(a / "convergence.csv").find(",-") != std::string::npos);
  fs::remove_all(a);
}

TEST_CASE("field dumps") {
  const fs::path a = scratch("vtk");
  RunConfig c = parse_config("mesh_level = 1\nsteps = 2\nfinal_time = 0.02\nstore_fields = true\n");
  c.output_dir = a.string();
  std::ostringstream log;
  REQUIRE(run_study(c, log) == kExitOk);
  const std::string v = slurp(a / "fields_h1_N2_step2.vtk");
  CHECK(v.rfind("# vtk DataFile Version", 0) == 0);
  CHECK(v.find("POINTS 24") != std::string::npos);
  CHECK(v.find("SCALARS detC") != std::string::npos);
  fs::remove_all(a);
}

TEST_CASE("shipped configs load") {
  for (const char* name : {"spatial.toml", "temporal.toml", "benchmark.toml", "all.toml"}) {
    INFO(name);
    const RunConfig c = load_config(std::string(PHDG_CONFIG_DIR) + "/" + name);
    CHECK_NOTHROW(c.validate());
  }
  const RunConfig t = load_config(std::string(PHDG_CONFIG_DIR) + "/temporal.toml");
  CHECK(t.steps_list == std::vector<int>{2, 4, 8, 16});
  const RunConfig a = parse_config(slurp(fs::path(PHDG_CONFIG_DIR) / "all.toml"), "experiment = \"custom\"\n");
  CHECK(a.diagonal == Diagonal::rising);
  CHECK(a.params.beta == 40.0);
}
