#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <sys/wait.h>

#include <gtest/gtest.h>

#include "nhfields/errors.hpp"
#include "nhfields/report_json.hpp"
#include "nhfields/scenario.hpp"

using namespace nhfields;
namespace fs = std::filesystem;

namespace {

const char* kTransport = R"({
  "task": "verify", "seed": 1, "points": 50, "tuples": 50,
  "model": {"name": "wave", "params": {"c": 1}},
  "constraint": {"name": "linear-transport", "mode": "chetaev", "params": {"c": 2}}
})";

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::path(::testing::TempDir()) / ("nhfields_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(NHFIELDS_CLI) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST(JsonWriter, FixedPrecisionAndLayout) {
  JsonWriter w;
  w.begin_object();
  w.field("a", 0.1);
  w.key("b").begin_array().value(1).value(true).null().end_array();
  w.field("s", "q\"x");
  w.key("e").begin_object().end_object();
  w.end_object();
  EXPECT_EQ(w.str(), "{\n  \"a\": 0.10000000000000001,\n  \"b\": [\n    1,\n    true,\n    null\n  ],\n"
                     "  \"s\": \"q\\\"x\",\n  \"e\": {}\n}\n");
  EXPECT_EQ(format_double(std::nan("")), "null");
}

TEST(ScenarioConfig, ParsesAndRejects) {
  const ScenarioConfig c = parse_scenario(kTransport);
  EXPECT_EQ(c.task, "verify");
  EXPECT_EQ(c.model, "wave");
  ASSERT_TRUE(c.constraint.has_value());
  EXPECT_DOUBLE_EQ(c.constraint_params.at("c"), 2.0);
  EXPECT_THROW(parse_scenario("{"), ConfigError);
  EXPECT_THROW(parse_scenario(R"({"model": {"name": "wave"}, "colour": 1})"), ConfigError);
  EXPECT_THROW(parse_scenario(R"({"model": {"name": "wave"}, "task": "fly"})"), ConfigError);
  EXPECT_THROW(parse_scenario(R"({"model": {"name": "wave"}, "integrator": "leapfrog"})"), ConfigError);
  EXPECT_THROW(parse_scenario(R"({"model": {"name": "wave", "params": {"c": "x"}}})"), ConfigError);
  EXPECT_THROW(parse_scenario(R"({"task": "verify"})"), ConfigError);
}

TEST(Scenario, VerifyTransportPasses) {
  const ScenarioResult r = run_scenario(parse_scenario(kTransport), false);
  EXPECT_EQ(r.exit_code, 0) << r.first_failure;
  EXPECT_NE(r.report_json.find("\"tolerances\""), std::string::npos);
}

TEST(Scenario, CharacteristicConstraintFailsCompatibility) {
  ScenarioConfig c = parse_scenario(kTransport);
  c.constraint_params["c"] = 1.0;
  const ScenarioResult r = run_scenario(c, false);
  EXPECT_EQ(r.exit_code, 1);
  EXPECT_EQ(r.first_failure, "compatibility");
}

TEST(Scenario, UnknownModelIsConfigError) {
  ScenarioConfig c = parse_scenario(kTransport);
  c.model = "nope";
  EXPECT_EQ(run_scenario(c, false).exit_code, 2);
}

TEST(Scenario, VerifyIsDeterministic) {
  ScenarioConfig c = parse_scenario(kTransport);
  c.seed = 17;
  c.points = 10;
  EXPECT_EQ(run_scenario(c, false).report_json, run_scenario(c, false).report_json);
}

TEST(Scenario, EvolveWritesCsv) {
  const fs::path dir = scratch("evolve");
  ScenarioConfig c = parse_scenario(R"({"task": "evolve", "model": {"name": "wave"},
      "grid": {"nu": 16}, "dt": 0.01, "steps": 10, "record_every": 5,
      "tolerances": {"energy_drift": 1e-4}})");
  c.output_dir = dir.string();
  const ScenarioResult r = run_scenario(c);
  EXPECT_EQ(r.exit_code, 0) << r.first_failure;
  EXPECT_TRUE(fs::exists(dir / "report.json"));
  const std::string diag = slurp(dir / "diag_steps.csv");
  EXPECT_EQ(diag.substr(0, diag.find('\n')), "t,max_phi,holonomy,eta,energy");
  EXPECT_TRUE(fs::exists(dir / "traj_fields.csv"));
}

TEST(Scenario, FluidIdentitiesPass) {
  ScenarioConfig c = parse_scenario(R"({"task": "fluid-identities"})");
  c.fluid.grids = {12, 24};
  const ScenarioResult r = run_scenario(c, false);
  EXPECT_EQ(r.exit_code, 0) << r.first_failure;
}

TEST(Cli, ExitCodesAndDeterminism) {
  const fs::path dir = scratch("cli");
  {
    std::ofstream(dir / "ok.json") << kTransport;
    std::string bad = kTransport;
    bad.replace(bad.find("\"c\": 2"), 6, "\"c\": 1");
    std::ofstream(dir / "incompatible.json") << bad;
    std::ofstream(dir / "unknown.json") << R"({"model": {"name": "nope"}})";
  }
  EXPECT_EQ(run_cli("--config " + (dir / "ok.json").string() + " --out " + (dir / "a").string()), 0);
  EXPECT_EQ(run_cli("--config " + (dir / "ok.json").string() + " --out " + (dir / "b").string()), 0);
  EXPECT_EQ(slurp(dir / "a" / "report.json"), slurp(dir / "b" / "report.json"));
  EXPECT_EQ(run_cli("--config " + (dir / "ok.json").string() + " --seed 2 --out " + (dir / "c").string()), 0);
  EXPECT_NE(slurp(dir / "a" / "report.json"), slurp(dir / "c" / "report.json"));
  EXPECT_EQ(run_cli("--config " + (dir / "incompatible.json").string() + " --out " + (dir / "d").string()), 1);
  EXPECT_EQ(run_cli("--config " + (dir / "unknown.json").string() + " --out " + (dir / "e").string()), 2);
  EXPECT_EQ(run_cli("--config " + (dir / "missing.json").string()), 2);
  EXPECT_EQ(run_cli("--config " + (dir / "ok.json").string() + " --task fly"), 2);
}
