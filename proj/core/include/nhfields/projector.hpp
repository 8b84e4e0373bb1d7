#pragma once

#include <random>

#include <Eigen/Dense>

#include "nhfields/constraint.hpp"
#include "nhfields/exterior.hpp"
#include "nhfields/lagrangian.hpp"

namespace nhfields {

struct ZetaBasis {
  JetLayout layout;
  Eigen::MatrixXd zeta;  // M x k, column alpha holds (zeta_alpha)^a_mu in v-block order

  int count() const { return static_cast<int>(zeta.cols()); }
  double component(int alpha, int a, int mu) const { return zeta(layout.v_flat(a, mu), alpha); }
  TangentVector tangent(int alpha) const;
  // N x k, zeta_alpha embedded as jet-vertical vectors.
  Eigen::MatrixXd embedded() const;
};

/// Solves H zeta_alpha = C_alpha. `C` is k x M.
ZetaBasis solve_zeta(const DerivativeBundle& bundle, const Eigen::MatrixXd& C);

/// max |(i_zeta Omega_L + Phi_alpha)(tuple)| over random (n+1)-tuples.
double zeta_form_residual(const JetPoint& p, const DerivativeBundle& bundle, const ZetaBasis& zb,
                          const Eigen::MatrixXd& C, std::mt19937_64& rng, int tuples = 20);

struct Compatibility {
  Eigen::MatrixXd mmat;  // mmat(alpha, beta) = zeta_alpha(phi_beta)
  double det = 0.0;
  bool compatible = false;
};

Compatibility compatibility_matrix(const ZetaBasis& zb, const Eigen::MatrixXd& dphidv,
                                   double rel_tol = 1e-10);

struct ProjectorPair {
  Eigen::MatrixXd P;
  Eigen::MatrixXd Q;
  Eigen::MatrixXd Lam;  // Q = zeta_alpha Lam(alpha, beta) dphi_beta
};

struct ProjectorInvariants {
  double p_idempotent = 0.0;
  double q_idempotent = 0.0;
  double complement = 0.0;
  double pq_zero = 0.0;
  double tangency = 0.0;   // |dphi . P|
  double image = 0.0;      // distance of Im Q from span zeta
  int q_rank = 0;

  double max() const;
};

ProjectorPair build_projectors(const ZetaBasis& zb, const ConstraintLinearization& lin,
                               double on_tol = 1e-8, double check_tol = 1e-9);

ProjectorInvariants projector_invariants(const ProjectorPair& pp, const ZetaBasis& zb,
                                         const ConstraintLinearization& lin);

}  // namespace nhfields
