#pragma once

#include <random>
#include <vector>

#include <Eigen/Dense>

#include "nhfields/constraint.hpp"
#include "nhfields/ddw.hpp"
#include "nhfields/grid.hpp"
#include "nhfields/jet.hpp"
#include "nhfields/lagrangian.hpp"

namespace nhfields {

enum class StateMode { PDE, FullJet };
enum class Integrator { RK4, Euler };

/// Cauchy data on the unit n-torus at one time.
///
/// PDE mode evolves (y, v0) and rebuilds spatial jets from y; FullJet mode
/// evolves (y, v0, vi) independently.
struct CauchyState {
  JetLayout layout;
  PeriodicGrid grid{1, 8};
  StateMode mode = StateMode::PDE;
  double t = 0.0;
  Eigen::MatrixXd y;     // P x m
  Eigen::MatrixXd v0;    // P x m (time derivative in PDE mode)
  Eigen::MatrixXd vi;    // P x (m n), column a*n + (i-1); FullJet only
  Eigen::MatrixXd jump;  // m x n, per-period increment of y

  static CauchyState zeros(const JetLayout& layout, int nu, StateMode mode);
  int points() const { return grid.size(); }
};

struct StateVariation {
  std::vector<TangentVector> w;
};

/// Jets, slice tangents and section-adapted pins at every grid point.
struct StateGeometry {
  std::vector<JetPoint> jets;
  std::vector<std::vector<TangentVector>> slice;  // K_1..K_n per point
  std::vector<SpatialPin> pins;
  double holonomy_defect = 0.0;
};

StateGeometry state_geometry(const CauchyState& state, DerivativeScheme scheme);

double tilde_eta_contract(const CauchyState& state, const StateVariation& W);

/// Quadrature of kappa^*(i_W i_W' Omega_L) for a fixed state; caches the
/// pointwise Omega_L forms.
class CauchyForms {
 public:
  CauchyForms(const LagrangianModel& model, const CauchyState& state,
              DerivativeScheme scheme = DerivativeScheme::Central4);

  const StateGeometry& geometry() const { return geom_; }
  double eta(const StateVariation& W) const;
  double omega(const StateVariation& W, const StateVariation& Wp) const;
  // Pointwise integrand Omega_L(W', W, K_1..K_n) at grid point j.
  double omega_density(int j, const TangentVector& W, const TangentVector& Wp) const;

 private:
  const CauchyState* state_;
  StateGeometry geom_;
  std::vector<Form> omega_;
};

double tilde_omega_contract(const LagrangianModel& model, const CauchyState& state,
                            const StateVariation& W, const StateVariation& Wp,
                            DerivativeScheme scheme = DerivativeScheme::Central4);

struct SodeOptions {
  DerivativeScheme scheme = DerivativeScheme::Central4;
  double on_tol = 1e-8;
};

struct SodeDetails {
  StateVariation free;       // H_0 of the section-adapted free DDW connection
  StateVariation projected;  // P(H_0); equals free when unconstrained
  Eigen::MatrixXd lambda0;   // P x k, lambda^alpha_0 per point
  double max_phi = 0.0;
};

SodeDetails sode_details(const LagrangianModel& model, const ConstraintSpec* spec,
                         const CauchyState& state, const SodeOptions& opt = {});

StateVariation sode_vector_field(const LagrangianModel& model, const ConstraintSpec* spec,
                                 const CauchyState& state, const SodeOptions& opt = {});

struct EvolveOptions {
  double dt = 1e-3;
  int steps = 0;
  Integrator integrator = Integrator::RK4;
  DerivativeScheme scheme = DerivativeScheme::Central4;
  bool stabilize = false;
  double drift_ceiling = 1e-3;
  int record_every = 1;
};

struct StepDiagnostics {
  double t = 0.0;
  double max_phi = 0.0;
  double holonomy = 0.0;
  double eta = 0.0;
  double energy = 0.0;
};

struct EvolveResult {
  std::vector<CauchyState> trajectory;
  std::vector<StepDiagnostics> diagnostics;
};

EvolveResult evolve(const LagrangianModel& model, const ConstraintSpec* spec,
                    const CauchyState& state0, const EvolveOptions& opt);

/// Integral of (v0 . dL/dv0 - L) over the torus.
double state_energy(const LagrangianModel& model, const CauchyState& state,
                    DerivativeScheme scheme = DerivativeScheme::Central4);

StateVariation random_variation(const CauchyState& state, std::mt19937_64& rng);

struct CauchyIdentityReport {
  double eta_error = 0.0;        // |i_Gamma eta - 1|
  double sode_error = 0.0;       // max |dy - v0|
  double free_kernel = 0.0;      // max |i_Gamma Omega(W)| over random W
  double tangency = 0.0;         // max |dphi(P H_0)|
  double annihilator = 0.0;      // max |i_{P Gamma} Omega(W)| for W in TC ^ ann(F)
  double force_fit = 0.0;        // residual of pointwise constraint-form fit
  double force_coeff = 0.0;      // max |c + lambda_0|
};

CauchyIdentityReport cauchy_identity_check(const LagrangianModel& model,
                                           const ConstraintSpec* spec, const CauchyState& state,
                                           std::mt19937_64& rng, int variations = 20,
                                           const SodeOptions& opt = {});

}  // namespace nhfields
