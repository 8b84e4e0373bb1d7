#include "nhfields/constraint.hpp"

#include <cmath>
#include <sstream>
#include <string>

#include "nhfields/errors.hpp"

namespace nhfields {

ConstraintSpec ConstraintSpec::none(const JetLayout& layout) {
  ConstraintSpec s;
  s.name_ = "none";
  s.dims_ = Dims{layout, 0};
  s.f0_ = [](const JetView<double>&, double*) {};
  s.f1_ = [](const JetView<Dual1>&, Dual1*) {};
  return s;
}

ConstraintSpec ConstraintSpec::with_custom_coefficients(CoefficientFn fn) const {
  ConstraintSpec s = *this;
  s.mode_ = CoefficientMode::Custom;
  s.custom_ = std::move(fn);
  return s;
}

Eigen::VectorXd ConstraintSpec::values(const JetPoint& p) const {
  if (!(p.layout() == layout())) throw InvalidArgument("constraint: layout mismatch");
  Eigen::VectorXd out = Eigen::VectorXd::Zero(count());
  if (count() > 0) f0_(JetView<double>(layout(), p.coords().data()), out.data());
  for (int a = 0; a < count(); ++a) {
    if (!std::isfinite(out[a])) throw EvaluationError("constraint value is not finite", a);
  }
  return out;
}

ConstraintLinearization ConstraintSpec::linearize(const JetPoint& p) const {
  if (!(p.layout() == layout())) throw InvalidArgument("constraint: layout mismatch");
  const JetLayout& l = layout();
  const int N = l.dim();
  const int k = count();
  ConstraintLinearization lin{l, Eigen::VectorXd::Zero(k), Eigen::MatrixXd::Zero(k, N)};
  if (k == 0) return lin;
  std::vector<Dual1> z(N);
  std::vector<Dual1> out(k);
  for (int i = 0; i < N; ++i) z[i] = Dual1(p.coords()[i], 0.0);
  for (int i = 0; i < N; ++i) {
    z[i].d = 1.0;
    f1_(JetView<Dual1>(l, z.data()), out.data());
    z[i].d = 0.0;
    for (int a = 0; a < k; ++a) {
      if (!std::isfinite(out[a].d)) throw EvaluationError("constraint derivative is not finite", i);
      lin.jacobian(a, i) = out[a].d;
      if (i == 0) lin.values[a] = out[a].v;
    }
  }
  return lin;
}

Eigen::MatrixXd chetaev_coefficients(const ConstraintSpec& spec, const JetPoint& p,
                                     const ConstraintLinearization& lin) {
  if (spec.mode() == CoefficientMode::Custom) {
    Eigen::MatrixXd C = spec.custom_coefficients(p);
    if (C.rows() != spec.count() || C.cols() != spec.layout().jet_dim()) {
      throw InvalidArgument("custom constraint coefficients must be k x m(n+1)");
    }
    return C;
  }
  return lin.dphidv();
}

Eigen::MatrixXd chetaev_coefficients(const ConstraintSpec& spec, const JetPoint& p) {
  return chetaev_coefficients(spec, p, spec.linearize(p));
}

std::vector<Form> constraint_forms(const JetPoint& p, const Eigen::MatrixXd& coeffs) {
  const JetLayout& l = p.layout();
  const int N = l.dim();
  std::vector<Form> forms;
  std::vector<Form> minors;
  for (int mu = 0; mu <= l.n; ++mu) minors.push_back(base_volume_minor(l, mu));
  for (int alpha = 0; alpha < coeffs.rows(); ++alpha) {
    Form phi(N, l.n + 1);
    for (int a = 0; a < l.m; ++a) {
      const Covector theta = Covector::dense(contact_covector(p, a));
      for (int mu = 0; mu <= l.n; ++mu) {
        const double c = coeffs(alpha, l.v_flat(a, mu));
        if (c == 0.0) continue;
        phi += Form::monomial(N, c, {theta}).wedge(minors[mu]);
      }
    }
    forms.push_back(std::move(phi));
  }
  return forms;
}

Eigen::VectorXd constraint_form_eval(const ConstraintSpec& spec, const JetPoint& p,
                                     std::span<const TangentVector> vecs) {
  const JetLayout& l = spec.layout();
  if (static_cast<int>(vecs.size()) != l.n + 1) {
    throw InvalidArgument("constraint_form_eval needs n+1 = " + std::to_string(l.n + 1) + " vectors");
  }
  const auto forms = constraint_forms(p, chetaev_coefficients(spec, p));
  Eigen::VectorXd out(forms.size());
  for (std::size_t a = 0; a < forms.size(); ++a) out[a] = forms[a].eval(vecs);
  return out;
}

namespace {

int sv_rank(const Eigen::MatrixXd& A, double rel) {
  if (A.rows() == 0) return 0;
  const Eigen::JacobiSVD<Eigen::MatrixXd> svd(A);
  const auto& s = svd.singularValues();
  if (s.size() == 0 || s[0] == 0.0) return 0;
  int r = 0;
  for (int i = 0; i < s.size(); ++i)
    if (s[i] > rel * s[0]) ++r;
  return r;
}

// Describe the dependent combination via the left null vectors.
std::string dependent_combination(const Eigen::MatrixXd& A, double rel) {
  const Eigen::JacobiSVD<Eigen::MatrixXd> svd(A, Eigen::ComputeFullU);
  const auto& s = svd.singularValues();
  std::ostringstream os;
  const int r = sv_rank(A, rel);
  for (int c = r; c < A.rows(); ++c) {
    os << (c > r ? "; " : "") << "sum_alpha c_alpha dphi_alpha = 0 with c = (";
    for (int a = 0; a < A.rows(); ++a) os << (a ? ", " : "") << svd.matrixU()(a, c);
    os << ")";
  }
  (void)s;
  return os.str();
}

}  // namespace

int constraint_rank_check(const ConstraintSpec& spec, const JetPoint& p, const RankTolerances& tol) {
  const ConstraintLinearization lin = spec.linearize(p);
  const double off = lin.values.size() ? lin.values.cwiseAbs().maxCoeff() : 0.0;
  if (off >= tol.on_constraint) {
    std::ostringstream os;
    os << "point is not on the constraint set: |phi| = (";
    for (int a = 0; a < lin.values.size(); ++a) os << (a ? ", " : "") << std::abs(lin.values[a]);
    os << ")";
    throw PreconditionError(os.str());
  }
  const Eigen::MatrixXd dv = lin.dphidv();
  const int r = sv_rank(dv, tol.relative_sv);
  if (r < spec.count()) {
    throw RankDeficiencyError("dphi/dv has rank " + std::to_string(r) + " < k = " +
                              std::to_string(spec.count()) + ": " +
                              dependent_combination(dv, tol.relative_sv));
  }
  if (spec.mode() == CoefficientMode::Custom) {
    const Eigen::MatrixXd C = chetaev_coefficients(spec, p, lin);
    const int rc = sv_rank(C, tol.relative_sv);
    if (rc < spec.count()) {
      throw RankDeficiencyError("custom coefficient matrix has rank " + std::to_string(rc) +
                                " < k: " + dependent_combination(C, tol.relative_sv));
    }
  }
  return r;
}

JetPoint project_to_constraint(const ConstraintSpec& spec, const JetPoint& p,
                               const std::vector<int>& free_indices, double tol, int max_iter) {
  JetPoint q = p;
  if (spec.count() == 0) return q;
  const int nf = static_cast<int>(free_indices.size());
  for (int it = 0; it < max_iter; ++it) {
    const ConstraintLinearization lin = spec.linearize(q);
    if (lin.values.cwiseAbs().maxCoeff() < tol) return q;
    Eigen::MatrixXd A(spec.count(), nf);
    for (int c = 0; c < nf; ++c) A.col(c) = lin.jacobian.col(free_indices[c]);
    const Eigen::VectorXd step = A.completeOrthogonalDecomposition().solve(lin.values);
    for (int c = 0; c < nf; ++c) q.coords()[free_indices[c]] -= step[c];
  }
  const Eigen::VectorXd phi = spec.values(q);
  if (phi.cwiseAbs().maxCoeff() >= tol * 1e3) {
    throw ConsistencyError("project_to_constraint: Newton did not converge (|phi| = " +
                           std::to_string(phi.cwiseAbs().maxCoeff()) + ")");
  }
  return q;
}

}  // namespace nhfields
