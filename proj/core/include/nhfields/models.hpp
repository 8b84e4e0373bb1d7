#pragma once

#include "nhfields/lagrangian.hpp"

namespace nhfields {

/// L = 1/2 (sum_a (v^a_0)^2 - c^2 sum_{a,i} (v^a_i)^2).
LagrangianModel wave_model(const JetLayout& layout, double c = 1.0);

/// L = 1/2 sum (v^a_mu)^2 + g sum_a y^a v^a_0.
LagrangianModel quadratic_model(const JetLayout& layout, double g = 1.0);

}  // namespace nhfields
