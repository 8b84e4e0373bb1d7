#pragma once

#include <optional>
#include <random>
#include <string>

#include <Eigen/Dense>

#include "nhfields/constraint.hpp"
#include "nhfields/jet.hpp"
#include "nhfields/lagrangian.hpp"
#include "nhfields/projector.hpp"

namespace nhfields {

/// lam(alpha, mu) = lambda^alpha_mu.
using MultiplierField = Eigen::MatrixXd;

/// Gamma2(a, mu, nu) is the d/dv^a_nu component of the horizontal lift H_mu.
/// pin(a, i-1, nu) = Gamma^a_{i nu} for spatial i = 1..n.
using SpatialPin = Tensor3;

struct DdwResiduals {
  double ddw_rows = 0.0;  // coordinate DDW equations, incl. multiplier terms
  double tangency = 0.0;
  double semiholonomic = 0.0;
};

struct DdwSolution {
  ConnectionCoeffs coeffs;
  MultiplierField multipliers;
  DdwResiduals residuals;
  std::string selection;  // "min-norm" or "pinned"
};

/// Right side R_a of the DDW rows: sum H[b,tau,a,nu] Gamma^b_{tau nu} = R_a.
Eigen::VectorXd ddw_rhs(const DerivativeBundle& bundle, const JetPoint& p);

/// m x m(n+1)^2 coefficient matrix of the DDW rows, columns in Tensor3 order:
/// entry (a, (b, mu, nu)) = d2L/dv^a_mu dv^b_nu.
Eigen::MatrixXd ddw_matrix(const DerivativeBundle& bundle);

DdwSolution solve_free_ddw(const LagrangianModel& model, const JetPoint& p,
                           const std::optional<SpatialPin>& fixed_spatial = std::nullopt);
DdwSolution solve_free_ddw(const DerivativeBundle& bundle, const JetPoint& p,
                           const std::optional<SpatialPin>& fixed_spatial = std::nullopt);

/// Multipliers lambda^alpha_mu from Q(H_mu) = lambda^alpha_mu zeta_alpha.
MultiplierField connection_multipliers(const ConnectionCoeffs& c, const ProjectorPair& pp,
                                       const ConstraintLinearization& lin);

/// Gamma'^a_{mu nu} = Gamma^a_{mu nu} - lambda^alpha_mu (zeta_alpha)^a_nu. Row residuals are
/// filled when `bundle` is given.
DdwSolution project_connection(const DdwSolution& free, const ProjectorPair& pp,
                               const ZetaBasis& zb, const ConstraintLinearization& lin,
                               const JetPoint& p, const DerivativeBundle* bundle = nullptr,
                               double on_tol = 1e-8);

DdwSolution solve_constrained_ddw(const LagrangianModel& model, const ConstraintSpec& spec,
                                  const JetPoint& p,
                                  const std::optional<SpatialPin>& fixed_spatial = std::nullopt,
                                  double on_tol = 1e-8);

/// max over random tuples of |(i_h Omega_L - n Omega_L)(tuple)|.
double free_ddw_form_residual(const JetPoint& p, const DerivativeBundle& bundle,
                              const ConnectionCoeffs& c, std::mt19937_64& rng, int tuples = 50);

struct NhDdwResidual {
  double form_residual = 0.0;
  double tangency_residual = 0.0;
  MultiplierField lam_fit;  // least-squares lambda' in i_h Omega - n Omega = lambda' dx ^ Phi
  // Orthogonal projector onto the multiplier directions the ansatz can see;
  // identity unless some dx^mu ^ Phi_alpha vanish or coincide.
  Eigen::MatrixXd identifiable;

  /// max |identifiable (lam_fit - lam)|, flattened alpha*(n+1)+mu.
  double multiplier_mismatch(const MultiplierField& lam) const;
};

NhDdwResidual nh_ddw_residual(const LagrangianModel& model, const ConstraintSpec& spec,
                              const DdwSolution& sol, const JetPoint& p, std::mt19937_64& rng,
                              int tuples = 50);

/// E_a = d/dx^mu (dL/dv^a_mu) - dL/dy^a (total derivative through x, y, v, w).
Eigen::VectorXd el_residual(const LagrangianModel& model, const Jet2Point& q);

struct NhFieldResidual {
  MultiplierField lam_fit;
  Eigen::VectorXd residual;
  Eigen::VectorXd constraint_vals;
};

NhFieldResidual nh_field_residual(const LagrangianModel& model, const ConstraintSpec& spec,
                                  const Jet2Point& q);

}  // namespace nhfields
