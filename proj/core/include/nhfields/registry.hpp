#pragma once

#include <map>
#include <random>
#include <string>
#include <vector>

#include "nhfields/constraint.hpp"
#include "nhfields/lagrangian.hpp"

namespace nhfields {

using ParamMap = std::map<std::string, double>;

/// Built-in models: `wave` (c, n, m), `quadratic` (g, n, m), `fluid` (rho, kappa, beta, mu).
LagrangianModel make_model(const std::string& name, const ParamMap& params = {});

/// Built-in constraints: `linear-transport` (c), `incompressibility`,
/// `velocity-law` (q): phi = v^1_0 - q sin(y^1).
ConstraintSpec make_constraint(const std::string& name, const JetLayout& layout,
                               const ParamMap& params = {});

/// Constant custom coefficient matrix read from CSV: k rows, m(n+1) columns in
/// v-block order (a-major, mu-minor).
ConstraintSpec with_custom_csv(const ConstraintSpec& spec, const std::string& path);

std::vector<std::string> model_names();
std::vector<std::string> constraint_names();

/// Random jet point typical for the model (fluid: unimodular spatial block).
JetPoint sample_jet_point(const LagrangianModel& model, std::mt19937_64& rng);

}  // namespace nhfields
