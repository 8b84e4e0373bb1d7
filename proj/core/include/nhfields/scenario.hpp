#pragma once

#include <optional>
#include <string>
#include <vector>

#include "nhfields/cauchy.hpp"
#include "nhfields/registry.hpp"

namespace nhfields {

struct Tolerances {
  double on_constraint = 1e-8;
  double regularity_det = 1e-10;
  double regularity_cond = 1e12;
  double compatibility = 1e-10;
  double zeta_form = 1e-9;
  double projector = 1e-9;
  double free_ddw_form = 1e-9;
  double nh_ddw_form = 1e-8;
  double tangency = 1e-10;
  double multiplier_match = 1e-8;
  double eta = 1e-12;
  double drift = 1e-3;
  double energy_drift = 1e-8;
  double null_lagrangian = 1e-4;
  double convergence_order = 3.5;
  double psi = 1e-6;
};

struct InitialProfile {
  std::string profile = "sine";  // sine | constant | fluid-shear
  double amplitude = 1.0;
  int wavenumber = 1;
};

struct FluidIdentityConfig {
  std::vector<int> grids{16, 32};
  double extent = 0.25;
  double epsilon = 0.1;
  int psi_grid = 16;
};

struct ScenarioConfig {
  std::string task = "verify";  // verify | evolve | fluid-identities
  long seed = 1;
  std::string model = "wave";
  ParamMap model_params;
  std::optional<std::string> constraint;
  std::string constraint_mode = "chetaev";  // chetaev | custom
  ParamMap constraint_params;
  std::string custom_csv;
  int points = 50;
  int tuples = 50;
  Tolerances tolerances;
  // evolve
  int nu = 64;
  double dt = 1e-3;
  int steps = 100;
  Integrator integrator = Integrator::RK4;
  StateMode mode = StateMode::PDE;
  bool stabilize = false;
  DerivativeScheme derivatives = DerivativeScheme::Central4;
  int record_every = 10;
  InitialProfile initial;
  FluidIdentityConfig fluid;
  std::string output_dir = "nhfields_out";
};

/// Parses the JSON text; unknown keys and bad values raise ConfigError.
ScenarioConfig parse_scenario(const std::string& json_text);
ScenarioConfig load_scenario(const std::string& path);

/// Initial Cauchy data for `evolve`; v-variables are moved onto C when a
/// constraint is given.
CauchyState make_initial_state(const ScenarioConfig& config, const LagrangianModel& model,
                               const ConstraintSpec* spec);

struct ScenarioResult {
  int exit_code = 0;         // 0 pass, 1 a check failed, 2 config error
  std::string first_failure;  // name of the first failing check
  std::string report_json;
};

/// Runs the task; writes report.json (and CSVs for evolve) when write_files.
ScenarioResult run_scenario(const ScenarioConfig& config, bool write_files = true);

}  // namespace nhfields
