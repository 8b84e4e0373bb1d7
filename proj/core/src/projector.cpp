#include "nhfields/projector.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "nhfields/errors.hpp"

namespace nhfields {

TangentVector ZetaBasis::tangent(int alpha) const {
  TangentVector t(layout);
  t.components().tail(layout.jet_dim()) = zeta.col(alpha);
  return t;
}

Eigen::MatrixXd ZetaBasis::embedded() const {
  Eigen::MatrixXd Z = Eigen::MatrixXd::Zero(layout.dim(), zeta.cols());
  Z.bottomRows(layout.jet_dim()) = zeta;
  return Z;
}

ZetaBasis solve_zeta(const DerivativeBundle& bundle, const Eigen::MatrixXd& C) {
  const JetLayout& l = bundle.layout;
  if (C.cols() != l.jet_dim()) throw InvalidArgument("solve_zeta: C must have m(n+1) columns");
  const Eigen::PartialPivLU<Eigen::MatrixXd> lu(bundle.H);
  const Eigen::VectorXd piv = lu.matrixLU().diagonal().cwiseAbs();
  const double rcond = piv.size() && piv.maxCoeff() > 0.0 ? std::min(lu.rcond(), piv.minCoeff() / piv.maxCoeff()) : 0.0;
  if (!(rcond > 1e-14)) {
    throw RegularityError("solve_zeta: Hessian is singular (reciprocal condition " +
                          std::to_string(rcond) + ")");
  }
  ZetaBasis zb{l, lu.solve(C.transpose())};
  const double res = (bundle.H * zb.zeta - C.transpose()).cwiseAbs().maxCoeff();
  const double scale = std::max(1.0, C.cwiseAbs().maxCoeff());
  if (!(res <= 1e-9 * scale)) {
    throw RegularityError("solve_zeta: linear residual " + std::to_string(res) + " exceeds 1e-9");
  }
  return zb;
}

namespace {

std::vector<TangentVector> random_tuple(const JetLayout& l, int count, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<TangentVector> out;
  for (int i = 0; i < count; ++i) {
    TangentVector t(l);
    for (int c = 0; c < l.dim(); ++c) t.components()[c] = u(rng);
    out.push_back(std::move(t));
  }
  return out;
}

}  // namespace

double zeta_form_residual(const JetPoint& p, const DerivativeBundle& bundle, const ZetaBasis& zb,
                          const Eigen::MatrixXd& C, std::mt19937_64& rng, int tuples) {
  const JetLayout& l = p.layout();
  const Form omega = omega_form(p, bundle);
  const auto phis = constraint_forms(p, C);
  std::vector<Form> contracted;
  for (int a = 0; a < zb.count(); ++a) contracted.push_back(contract_form(omega, zb.tangent(a)));
  double worst = 0.0;
  for (int t = 0; t < tuples; ++t) {
    const auto vecs = random_tuple(l, l.n + 1, rng);
    for (int a = 0; a < zb.count(); ++a) {
      worst = std::max(worst, std::abs(contracted[a].eval(vecs) + phis[a].eval(vecs)));
    }
  }
  return worst;
}

Compatibility compatibility_matrix(const ZetaBasis& zb, const Eigen::MatrixXd& dphidv, double rel_tol) {
  Compatibility c;
  c.mmat = zb.zeta.transpose() * dphidv.transpose();
  const int k = static_cast<int>(c.mmat.rows());
  c.det = k ? c.mmat.determinant() : 1.0;
  const double scale = std::pow(std::max(zb.zeta.norm() * dphidv.norm(), 1e-300), k);
  c.compatible = std::abs(c.det) > rel_tol * scale;
  return c;
}

double ProjectorInvariants::max() const {
  return std::max({p_idempotent, q_idempotent, complement, pq_zero, tangency, image});
}

ProjectorInvariants projector_invariants(const ProjectorPair& pp, const ZetaBasis& zb,
                                         const ConstraintLinearization& lin) {
  const int N = static_cast<int>(pp.P.rows());
  const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(N, N);
  ProjectorInvariants inv;
  inv.p_idempotent = (pp.P * pp.P - pp.P).cwiseAbs().maxCoeff();
  inv.q_idempotent = (pp.Q * pp.Q - pp.Q).cwiseAbs().maxCoeff();
  inv.complement = (pp.P + pp.Q - I).cwiseAbs().maxCoeff();
  inv.pq_zero = (pp.P * pp.Q).cwiseAbs().maxCoeff();
  inv.tangency = lin.jacobian.rows() ? (lin.jacobian * pp.P).cwiseAbs().maxCoeff() : 0.0;
  const Eigen::MatrixXd Z = zb.embedded();
  if (Z.cols() > 0) {
    const Eigen::MatrixXd proj = Z * Z.completeOrthogonalDecomposition().pseudoInverse();
    inv.image = ((I - proj) * pp.Q).cwiseAbs().maxCoeff();
  }
  const Eigen::JacobiSVD<Eigen::MatrixXd> svd(pp.Q);
  const auto& s = svd.singularValues();
  inv.q_rank = 0;
  for (int i = 0; i < s.size(); ++i)
    if (s[0] > 0.0 && s[i] > 1e-8 * s[0]) ++inv.q_rank;
  return inv;
}

ProjectorPair build_projectors(const ZetaBasis& zb, const ConstraintLinearization& lin,
                               double on_tol, double check_tol) {
  const int k = zb.count();
  const int N = lin.layout.dim();
  if (lin.values.size() != k) throw InvalidArgument("build_projectors: constraint count mismatch");
  if (k > 0 && lin.values.cwiseAbs().maxCoeff() >= on_tol) {
    throw PreconditionError("build_projectors: point is off the constraint set (|phi| = " +
                            std::to_string(lin.values.cwiseAbs().maxCoeff()) + ")");
  }
  ProjectorPair pp;
  if (k == 0) {
    pp.P = Eigen::MatrixXd::Identity(N, N);
    pp.Q = Eigen::MatrixXd::Zero(N, N);
    pp.Lam = Eigen::MatrixXd::Zero(0, 0);
    return pp;
  }
  const Compatibility comp = compatibility_matrix(zb, lin.dphidv());
  if (!comp.compatible) {
    throw CompatibilityError("build_projectors: compatibility matrix is singular (det = " +
                             std::to_string(comp.det) + ")");
  }
  pp.Lam = comp.mmat.transpose().inverse();
  pp.Q = zb.embedded() * pp.Lam * lin.jacobian;
  pp.P = Eigen::MatrixXd::Identity(N, N) - pp.Q;

  const double scale = std::max(1.0, pp.Q.cwiseAbs().maxCoeff());
  const Eigen::MatrixXd PQ = pp.P * pp.Q;
  const double worst = std::max({(pp.Q * pp.Q - pp.Q).cwiseAbs().maxCoeff(), PQ.cwiseAbs().maxCoeff(),
                                 (lin.jacobian * pp.P).cwiseAbs().maxCoeff() /
                                     std::max(1.0, lin.jacobian.cwiseAbs().maxCoeff())});
  if (worst > check_tol * scale * scale) {
    throw ConsistencyError("build_projectors: projector invariants violated (max residual " +
                           std::to_string(worst) + ")");
  }
  return pp;
}

}  // namespace nhfields
