#pragma once

#include <array>
#include <functional>

#include <Eigen/Dense>

#include "nhfields/constraint.hpp"
#include "nhfields/lagrangian.hpp"
#include "nhfields/projector.hpp"

namespace nhfields {

/// L = 1/2 rho |v0|^2 - rho (W(J) + mu/2 sum (v^a_i)^2),
/// W(J) = kappa/2 (J-1)^2 + beta (J-1).
struct FluidParams {
  double rho = 1.0;
  double kappa = 1.0;
  double beta = 1.0;
  double mu = 0.0;

  void validate() const;
};

inline constexpr JetLayout kFluidLayout{3, 3};

LagrangianModel fluid_model(const FluidParams& params = {});

/// phi = det(v_spatial) - 1.
ConstraintSpec incompressibility_constraint();

struct FluidQuantities {
  double J = 0.0;
  Eigen::Matrix3d vinv;
  Eigen::Matrix3d C;  // C(i, a) = J (v^-1)^i_a
  ZetaBasis zeta;     // generic solve on the fluid Hessian
  double f = 0.0;
  Eigen::MatrixXd P;
  // Closed form: diag(1, d2W) zeta = (0, J v^-1), rescaled by -1/rho.
  Eigen::VectorXd zeta_closed;
  double f_closed = 0.0;
  Eigen::MatrixXd P_closed;
  double closed_form_scale = 0.0;
  double zeta_mismatch = 0.0;
  double f_mismatch = 0.0;
  double P_mismatch = 0.0;
};

FluidQuantities fluid_quantities(const FluidParams& params, const JetPoint& p,
                                 double f_tol = 1e-12);

/// Samples of y(t, x1, x2, x3) on a uniform non-periodic 4D patch, t slowest.
struct SectionPatch {
  int points = 0;
  double spacing = 0.0;
  std::array<double, 4> origin{};
  Eigen::MatrixXd y;  // points^4 x 3

  int index(int t, int i, int j, int k) const { return ((t * points + i) * points + j) * points + k; }
};

using SectionFn = std::function<Eigen::Vector3d(const std::array<double, 4>&)>;

SectionPatch sample_patch(int points, double extent, const std::array<double, 4>& origin,
                          const SectionFn& section);

/// max over interior points of |d/dx^mu (dphi/dv^a_mu)| (Piola identity).
double null_lagrangian_residual(const SectionPatch& patch);

/// max over interior points of |phi - d psi^mu / dx^mu|.
double psi_divergence_residual(const SectionPatch& patch);

}  // namespace nhfields
