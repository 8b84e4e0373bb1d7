#include "nhfields/ddw.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "nhfields/errors.hpp"

namespace nhfields {

namespace {

int g2_index(const JetLayout& l, int a, int mu, int nu) { return (a * (l.n + 1) + mu) * (l.n + 1) + nu; }

ConnectionCoeffs semiholonomic_base(const JetPoint& p) {
  const JetLayout& l = p.layout();
  ConnectionCoeffs c = ConnectionCoeffs::zero(l);
  for (int a = 0; a < l.m; ++a)
    for (int mu = 0; mu <= l.n; ++mu) c.gamma(a, mu) = p.v(a, mu);
  return c;
}

void check_pin(const JetLayout& l, const SpatialPin& pin) {
  if (pin.dim0() != l.m || pin.dim1() != l.n || pin.dim2() != l.n + 1) {
    throw InvalidArgument("spatial pin must have shape (m, n, n+1)");
  }
}

// Pinned spatial block with the mixed block mirrored; temporal entries zero.
Eigen::VectorXd pinned_reference(const JetLayout& l, const SpatialPin& pin) {
  Tensor3 g(l.m, l.n + 1, l.n + 1);
  for (int a = 0; a < l.m; ++a) {
    for (int i = 1; i <= l.n; ++i) {
      for (int nu = 0; nu <= l.n; ++nu) g(a, i, nu) = pin(a, i - 1, nu);
      g(a, 0, i) = pin(a, i - 1, 0);
    }
  }
  return g.flat();
}

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

// (i_h Omega - n Omega)(vecs) with h(v) = dx^mu(v) H_mu.
double ddw_form_value(const Form& omega, const std::vector<TangentVector>& lifts,
                      const std::vector<TangentVector>& vecs) {
  const JetLayout& l = vecs.front().layout();
  double total = -l.n * omega.eval(vecs);
  std::vector<TangentVector> tmp = vecs;
  for (std::size_t i = 0; i < vecs.size(); ++i) {
    TangentVector hv(l);
    for (int mu = 0; mu <= l.n; ++mu) hv.components() += vecs[i].dx(mu) * lifts[mu].components();
    tmp[i] = hv;
    total += omega.eval(tmp);
    tmp[i] = vecs[i];
  }
  return total;
}

std::vector<TangentVector> lifts_of(const ConnectionCoeffs& c, const JetLayout& l) {
  std::vector<TangentVector> h;
  for (int mu = 0; mu <= l.n; ++mu) h.push_back(c.horizontal_lift(l, mu));
  return h;
}

double tangency_of(const ConnectionCoeffs& c, const ConstraintLinearization& lin) {
  double t = 0.0;
  for (int mu = 0; mu <= lin.layout.n; ++mu) {
    if (lin.jacobian.rows() == 0) break;
    const Eigen::VectorXd d = lin.jacobian * c.horizontal_lift(lin.layout, mu).components();
    t = std::max(t, d.cwiseAbs().maxCoeff());
  }
  return t;
}

}  // namespace

Eigen::VectorXd ddw_rhs(const DerivativeBundle& b, const JetPoint& p) {
  const JetLayout& l = b.layout;
  Eigen::VectorXd R(l.m);
  for (int a = 0; a < l.m; ++a) {
    double r = b.dLdy[a];
    for (int tau = 0; tau <= l.n; ++tau) {
      const int I = l.v_flat(a, tau);
      r -= b.d2Ldxdv(tau, I);
      for (int c = 0; c < l.m; ++c) r -= p.v(c, tau) * b.d2Ldydv(c, I);
    }
    R[a] = r;
  }
  return R;
}

Eigen::MatrixXd ddw_matrix(const DerivativeBundle& b) {
  const JetLayout& l = b.layout;
  const int G = l.m * (l.n + 1) * (l.n + 1);
  Eigen::MatrixXd A(l.m, G);
  for (int a = 0; a < l.m; ++a)
    for (int c = 0; c < l.m; ++c)
      for (int mu = 0; mu <= l.n; ++mu)
        for (int nu = 0; nu <= l.n; ++nu) A(a, g2_index(l, c, mu, nu)) = b.hess(a, mu, c, nu);
  return A;
}

DdwSolution solve_free_ddw(const DerivativeBundle& b, const JetPoint& p,
                           const std::optional<SpatialPin>& pin) {
  const JetLayout& l = b.layout;
  const Eigen::MatrixXd A = ddw_matrix(b);
  const Eigen::VectorXd R = ddw_rhs(b, p);
  DdwSolution sol;
  sol.coeffs = semiholonomic_base(p);
  sol.multipliers = Eigen::MatrixXd::Zero(0, l.n + 1);
  Eigen::VectorXd g;
  if (!pin) {
    Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(A);
    cod.setThreshold(1e-12);
    if (cod.rank() < l.m) {
      throw RegularityError("solve_free_ddw: reduced DDW system has rank " + std::to_string(cod.rank()) +
                            " < m = " + std::to_string(l.m) + " (Hessian block degenerate)");
    }
    g = cod.solve(R);
    sol.selection = "min-norm";
  } else {
    check_pin(l, *pin);
    g = pinned_reference(l, *pin);
    const Eigen::VectorXd rhs = R - A * g;
    Eigen::MatrixXd T(l.m, l.m);
    for (int a = 0; a < l.m; ++a)
      for (int c = 0; c < l.m; ++c) T(a, c) = A(a, g2_index(l, c, 0, 0));
    const Eigen::PartialPivLU<Eigen::MatrixXd> lu(T);
    if (!(lu.rcond() > 1e-14)) {
      throw RegularityError("solve_free_ddw: temporal block d2L/dv_0 dv_0 of the pinned system is singular");
    }
    const Eigen::VectorXd g00 = lu.solve(rhs);
    for (int c = 0; c < l.m; ++c) g[g2_index(l, c, 0, 0)] = g00[c];
    sol.selection = "pinned";
  }
  sol.coeffs.gamma2.flat() = g;
  sol.residuals.ddw_rows = (A * g - R).cwiseAbs().maxCoeff();
  sol.residuals.semiholonomic = semiholonomic_residual(sol.coeffs, p);
  return sol;
}

DdwSolution solve_free_ddw(const LagrangianModel& model, const JetPoint& p,
                           const std::optional<SpatialPin>& pin) {
  return solve_free_ddw(derivative_bundle(model, p), p, pin);
}

MultiplierField connection_multipliers(const ConnectionCoeffs& c, const ProjectorPair& pp,
                                       const ConstraintLinearization& lin) {
  const JetLayout& l = lin.layout;
  const int k = static_cast<int>(lin.values.size());
  MultiplierField lam(k, l.n + 1);
  for (int mu = 0; mu <= l.n; ++mu) {
    lam.col(mu) = pp.Lam * (lin.jacobian * c.horizontal_lift(l, mu).components());
  }
  return lam;
}

DdwSolution project_connection(const DdwSolution& free, const ProjectorPair& pp, const ZetaBasis& zb,
                               const ConstraintLinearization& lin, const JetPoint& p,
                               const DerivativeBundle* bundle, double on_tol) {
  const JetLayout& l = p.layout();
  const int k = zb.count();
  if (k > 0 && lin.values.cwiseAbs().maxCoeff() >= on_tol) {
    throw PreconditionError("project_connection: point is off the constraint set (|phi| = " +
                            std::to_string(lin.values.cwiseAbs().maxCoeff()) + ")");
  }
  DdwSolution out = free;
  out.multipliers = connection_multipliers(free.coeffs, pp, lin);
  for (int a = 0; a < l.m; ++a)
    for (int mu = 0; mu <= l.n; ++mu)
      for (int nu = 0; nu <= l.n; ++nu) {
        double s = 0.0;
        for (int al = 0; al < k; ++al) s += out.multipliers(al, mu) * zb.component(al, a, nu);
        out.coeffs.gamma2(a, mu, nu) -= s;
      }
  out.residuals.tangency = tangency_of(out.coeffs, lin);
  out.residuals.semiholonomic = semiholonomic_residual(out.coeffs, p);
  if (bundle) {
    // Rows: sum H Gamma' + lambda^alpha_mu (C_alpha)^mu_a = R_a, with C = H zeta.
    const Eigen::MatrixXd C = (bundle->H * zb.zeta).transpose();
    Eigen::VectorXd rows = ddw_matrix(*bundle) * out.coeffs.gamma2.flat() - ddw_rhs(*bundle, p);
    for (int a = 0; a < l.m; ++a)
      for (int al = 0; al < k; ++al)
        for (int mu = 0; mu <= l.n; ++mu) rows[a] += out.multipliers(al, mu) * C(al, l.v_flat(a, mu));
    out.residuals.ddw_rows = rows.cwiseAbs().maxCoeff();
  }
  return out;
}

DdwSolution solve_constrained_ddw(const LagrangianModel& model, const ConstraintSpec& spec,
                                  const JetPoint& p, const std::optional<SpatialPin>& pin,
                                  double on_tol) {
  const JetLayout& l = model.layout();
  const int k = spec.count();
  const DerivativeBundle b = derivative_bundle(model, p);
  const ConstraintLinearization lin = spec.linearize(p);
  const Eigen::MatrixXd C = chetaev_coefficients(spec, p, lin);
  if (k > 0) {
    constraint_rank_check(spec, p, RankTolerances{on_tol, 1e-8});
    const ZetaBasis zb = solve_zeta(b, C);
    const Compatibility comp = compatibility_matrix(zb, lin.dphidv());
    if (!comp.compatible) {
      throw CompatibilityError("solve_constrained_ddw: incompatible point (det = " +
                               std::to_string(comp.det) + ")");
    }
  }
  const int G = l.m * (l.n + 1) * (l.n + 1);
  const int K = k * (l.n + 1);
  const int rows = l.m + K;
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(rows, G + K);
  Eigen::VectorXd rhs(rows);
  A.topLeftCorner(l.m, G) = ddw_matrix(b);
  rhs.head(l.m) = ddw_rhs(b, p);
  for (int a = 0; a < l.m; ++a)
    for (int al = 0; al < k; ++al)
      for (int tau = 0; tau <= l.n; ++tau) A(a, G + al * (l.n + 1) + tau) = C(al, l.v_flat(a, tau));
  for (int al = 0; al < k; ++al) {
    for (int mu = 0; mu <= l.n; ++mu) {
      const int r = l.m + al * (l.n + 1) + mu;
      double s = -lin.jacobian(al, l.x_index(mu));
      for (int c = 0; c < l.m; ++c) s -= p.v(c, mu) * lin.jacobian(al, l.y_index(c));
      rhs[r] = s;
      for (int c = 0; c < l.m; ++c)
        for (int nu = 0; nu <= l.n; ++nu) A(r, g2_index(l, c, mu, nu)) = lin.jacobian(al, l.v_index(c, nu));
    }
  }

  Eigen::VectorXd z0 = Eigen::VectorXd::Zero(G + K);
  std::string selection = "min-norm";
  if (pin) {
    z0.head(G) = solve_free_ddw(b, p, pin).coeffs.gamma2.flat();
    selection = "pinned";
  }
  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(A);
  cod.setThreshold(1e-12);
  const Eigen::VectorXd z = z0 + cod.solve(rhs - A * z0);
  const double res = (A * z - rhs).cwiseAbs().maxCoeff();
  const double scale = std::max(1.0, rhs.cwiseAbs().maxCoeff());
  if (res > 1e-9 * scale) {
    throw ConsistencyError("solve_constrained_ddw: inconsistent system, least-squares residual " +
                           std::to_string(res));
  }

  DdwSolution sol;
  sol.coeffs = semiholonomic_base(p);
  sol.coeffs.gamma2.flat() = z.head(G);
  sol.multipliers = Eigen::MatrixXd(k, l.n + 1);
  for (int al = 0; al < k; ++al)
    for (int tau = 0; tau <= l.n; ++tau) sol.multipliers(al, tau) = z[G + al * (l.n + 1) + tau];
  sol.selection = selection;
  sol.residuals.ddw_rows = (A.topRows(l.m) * z - rhs.head(l.m)).cwiseAbs().maxCoeff();
  sol.residuals.tangency = tangency_of(sol.coeffs, lin);
  sol.residuals.semiholonomic = semiholonomic_residual(sol.coeffs, p);
  return sol;
}

double free_ddw_form_residual(const JetPoint& p, const DerivativeBundle& b, const ConnectionCoeffs& c,
                              std::mt19937_64& rng, int tuples) {
  const JetLayout& l = p.layout();
  const Form omega = omega_form(p, b);
  const auto lifts = lifts_of(c, l);
  double worst = 0.0;
  for (int t = 0; t < tuples; ++t) {
    worst = std::max(worst, std::abs(ddw_form_value(omega, lifts, random_tuple(l, l.n + 2, rng))));
  }
  return worst;
}

NhDdwResidual nh_ddw_residual(const LagrangianModel& model, const ConstraintSpec& spec,
                              const DdwSolution& sol, const JetPoint& p, std::mt19937_64& rng,
                              int tuples) {
  const JetLayout& l = model.layout();
  const int k = spec.count();
  const DerivativeBundle b = derivative_bundle(model, p);
  const ConstraintLinearization lin = spec.linearize(p);
  const Form omega = omega_form(p, b);
  const auto phis = constraint_forms(p, chetaev_coefficients(spec, p, lin));
  std::vector<Form> basis;  // dx^mu ^ Phi_alpha, index alpha*(n+1)+mu
  for (int al = 0; al < k; ++al)
    for (int mu = 0; mu <= l.n; ++mu)
      basis.push_back(Form::monomial(l.dim(), 1.0, {Covector::basis(l.dim(), l.x_index(mu))}).wedge(phis[al]));
  const auto lifts = lifts_of(sol.coeffs, l);

  NhDdwResidual out;
  Eigen::MatrixXd G(tuples, basis.size());
  Eigen::VectorXd F(tuples);
  for (int t = 0; t < tuples; ++t) {
    const auto vecs = random_tuple(l, l.n + 2, rng);
    F[t] = ddw_form_value(omega, lifts, vecs);
    for (std::size_t j = 0; j < basis.size(); ++j) G(t, j) = basis[j].eval(vecs);
  }
  Eigen::VectorXd lam = Eigen::VectorXd::Zero(basis.size());
  out.identifiable = Eigen::MatrixXd::Zero(basis.size(), basis.size());
  if (!basis.empty()) {
    lam = G.completeOrthogonalDecomposition().solve(F);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(G, Eigen::ComputeThinV);
    const Eigen::VectorXd& sv = svd.singularValues();
    for (int i = 0; i < sv.size(); ++i) {
      if (sv[i] > 1e-10 * sv[0]) out.identifiable += svd.matrixV().col(i) * svd.matrixV().col(i).transpose();
    }
  }
  out.form_residual = tuples ? (F - G * lam).cwiseAbs().maxCoeff() : 0.0;
  out.lam_fit = Eigen::MatrixXd(k, l.n + 1);
  for (int al = 0; al < k; ++al)
    for (int mu = 0; mu <= l.n; ++mu) out.lam_fit(al, mu) = lam[al * (l.n + 1) + mu];
  out.tangency_residual = tangency_of(sol.coeffs, lin);
  return out;
}

double NhDdwResidual::multiplier_mismatch(const MultiplierField& lam) const {
  const int k = static_cast<int>(lam_fit.rows());
  const int n1 = static_cast<int>(lam_fit.cols());
  if (lam.rows() != k || lam.cols() != n1) throw InvalidArgument("multiplier_mismatch: shape mismatch");
  Eigen::VectorXd d(k * n1);
  for (int al = 0; al < k; ++al)
    for (int mu = 0; mu < n1; ++mu) d[al * n1 + mu] = lam_fit(al, mu) - lam(al, mu);
  return d.size() ? (identifiable * d).cwiseAbs().maxCoeff() : 0.0;
}

Eigen::VectorXd el_residual(const LagrangianModel& model, const Jet2Point& q) {
  const JetLayout& l = model.layout();
  const DerivativeBundle b = derivative_bundle(model, q.jet);
  Eigen::VectorXd E = -ddw_rhs(b, q.jet);
  for (int a = 0; a < l.m; ++a)
    for (int mu = 0; mu <= l.n; ++mu)
      for (int c = 0; c < l.m; ++c)
        for (int nu = 0; nu <= l.n; ++nu) E[a] += b.hess(a, mu, c, nu) * q.w(c, mu, nu);
  return E;
}

NhFieldResidual nh_field_residual(const LagrangianModel& model, const ConstraintSpec& spec,
                                  const Jet2Point& q) {
  const JetLayout& l = model.layout();
  const int k = spec.count();
  NhFieldResidual out;
  const Eigen::VectorXd E = el_residual(model, q);
  const ConstraintLinearization lin = spec.linearize(q.jet);
  const Eigen::MatrixXd C = chetaev_coefficients(spec, q.jet, lin);
  Eigen::MatrixXd B(l.m, k * (l.n + 1));
  for (int a = 0; a < l.m; ++a)
    for (int al = 0; al < k; ++al)
      for (int mu = 0; mu <= l.n; ++mu) B(a, al * (l.n + 1) + mu) = C(al, l.v_flat(a, mu));
  Eigen::VectorXd lam = Eigen::VectorXd::Zero(B.cols());
  if (B.cols() > 0) {
    Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(B);
    cod.setThreshold(1e-12);
    lam = cod.solve(E);
  }
  out.lam_fit = Eigen::MatrixXd(k, l.n + 1);
  for (int al = 0; al < k; ++al)
    for (int mu = 0; mu <= l.n; ++mu) out.lam_fit(al, mu) = lam[al * (l.n + 1) + mu];
  out.residual = E - B * lam;
  out.constraint_vals = lin.values;
  return out;
}

}  // namespace nhfields
