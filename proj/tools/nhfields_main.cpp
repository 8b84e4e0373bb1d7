#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "nhfields/errors.hpp"
#include "nhfields/scenario.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Nonholonomic field theory scenarios"};
  std::string config_path;
  std::optional<std::string> task;
  std::optional<long> seed;
  std::optional<std::string> out;
  app.add_option("--config", config_path, "Scenario JSON file")->required();
  app.add_option("--task", task, "verify | evolve | fluid-identities")
      ->check(CLI::IsMember({"verify", "evolve", "fluid-identities"}));
  app.add_option("--seed", seed, "Random seed");
  app.add_option("--out", out, "Output directory");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  nhfields::ScenarioConfig config;
  try {
    config = nhfields::load_scenario(config_path);
  } catch (const nhfields::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  }
  if (task) config.task = *task;
  if (seed) config.seed = *seed;
  if (out) config.output_dir = *out;

  nhfields::ScenarioResult r;
  try {
    r = nhfields::run_scenario(config);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  if (r.exit_code == 2) {
    std::cerr << r.report_json << '\n';
  } else if (r.exit_code == 1) {
    std::cerr << "check failed: " << r.first_failure << '\n';
  } else {
    std::cout << "all checks passed; report written to " << config.output_dir << "/report.json\n";
  }
  return r.exit_code;
}
