#include "nhfields/lagrangian.hpp"

#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "nhfields/errors.hpp"

namespace nhfields {

namespace {

void require_finite_point(const JetPoint& p) {
  for (int i = 0; i < p.coords().size(); ++i) {
    if (!std::isfinite(p.coords()[i])) {
      throw EvaluationError("jet point coordinate " + std::to_string(i) + " is not finite", i);
    }
  }
}

void require_finite(double v, int index, const char* what) {
  if (!std::isfinite(v)) {
    throw EvaluationError(std::string("non-finite ") + what + " at jet index " + std::to_string(index),
                          static_cast<std::size_t>(index));
  }
}

}  // namespace

double LagrangianModel::operator()(const JetPoint& p) const {
  return f0_(JetView<double>(layout_, p.coords().data()));
}

DerivativeBundle derivative_bundle(const LagrangianModel& model, const JetPoint& p) {
  const JetLayout& l = model.layout();
  if (!(p.layout() == l)) throw InvalidArgument("derivative_bundle: layout mismatch");
  require_finite_point(p);
  const int N = l.dim();
  const int M = l.jet_dim();
  const int off = l.v_offset();
  const Dependence& dep = model.dependence();

  DerivativeBundle b;
  b.layout = l;
  b.dLdx = Eigen::VectorXd::Zero(l.base_dim());
  b.dLdy = Eigen::VectorXd::Zero(l.m);
  b.dLdv = Eigen::VectorXd::Zero(M);
  b.H = Eigen::MatrixXd::Zero(M, M);
  b.d2Ldydv = Eigen::MatrixXd::Zero(l.m, M);
  b.d2Ldxdv = Eigen::MatrixXd::Zero(l.base_dim(), M);

  std::vector<Dual2> z(N);
  for (int k = 0; k < N; ++k) z[k] = Dual2(Dual1(p.coords()[k], 0.0), Dual1(0.0, 0.0));
  // Outer seed on i, inner seed on j.
  auto eval2 = [&](int i, int j) {
    z[i].d.v = 1.0;
    z[j].v.d = 1.0;
    const Dual2 r = model.eval(JetView<Dual2>(l, z.data()));
    z[i].d.v = 0.0;
    z[j].v.d = 0.0;
    return r;
  };

  for (int I = 0; I < M; ++I) {
    const int i = off + I;
    for (int J = I; J < M; ++J) {
      const Dual2 r = eval2(i, off + J);
      require_finite(r.d.d, off + J, "second derivative");
      b.H(I, J) = r.d.d;
      b.H(J, I) = r.d.d;
      if (J == I) {
        require_finite(r.d.v, i, "first derivative");
        b.dLdv[I] = r.d.v;
        if (I == 0) {
          require_finite(r.v.v, i, "Lagrangian value");
          b.L = r.v.v;
        }
      }
    }
    if (dep.y) {
      for (int a = 0; a < l.m; ++a) {
        const Dual2 r = eval2(i, l.y_index(a));
        require_finite(r.d.d, l.y_index(a), "mixed y-v derivative");
        b.d2Ldydv(a, I) = r.d.d;
        if (I == 0) {
          require_finite(r.v.d, l.y_index(a), "first derivative");
          b.dLdy[a] = r.v.d;
        }
      }
    }
    if (dep.x) {
      for (int mu = 0; mu <= l.n; ++mu) {
        const Dual2 r = eval2(i, l.x_index(mu));
        require_finite(r.d.d, l.x_index(mu), "mixed x-v derivative");
        b.d2Ldxdv(mu, I) = r.d.d;
        if (I == 0) {
          require_finite(r.v.d, l.x_index(mu), "first derivative");
          b.dLdx[mu] = r.v.d;
        }
      }
    }
  }
  return b;
}

Eigen::VectorXd lagrangian_gradient(const LagrangianModel& model, const JetPoint& p) {
  const JetLayout& l = model.layout();
  require_finite_point(p);
  const int N = l.dim();
  std::vector<Dual1> z(N);
  for (int k = 0; k < N; ++k) z[k] = Dual1(p.coords()[k], 0.0);
  Eigen::VectorXd g = Eigen::VectorXd::Zero(N);
  for (int i = 0; i < N; ++i) {
    if (i < l.base_dim() && !model.dependence().x) continue;
    if (i >= l.base_dim() && i < l.v_offset() && !model.dependence().y) continue;
    z[i].d = 1.0;
    g[i] = model.eval(JetView<Dual1>(l, z.data())).d;
    z[i].d = 0.0;
    require_finite(g[i], i, "gradient entry");
  }
  return g;
}

Regularity regularity_check(const DerivativeBundle& bundle, const RegularityThresholds& th) {
  Regularity r;
  r.det = bundle.H.partialPivLu().determinant();
  const Eigen::JacobiSVD<Eigen::MatrixXd> svd(bundle.H);
  const auto& s = svd.singularValues();
  const double smin = s[s.size() - 1];
  r.cond = smin > 0.0 ? s[0] / smin : std::numeric_limits<double>::infinity();
  r.regular = std::abs(r.det) > th.det && r.cond < th.cond;
  return r;
}

Regularity regularity_check(const LagrangianModel& model, const JetPoint& p,
                            const RegularityThresholds& th) {
  return regularity_check(derivative_bundle(model, p), th);
}

Eigen::VectorXd momentum_differential(const DerivativeBundle& b, int a, int mu) {
  const JetLayout& l = b.layout;
  const int I = l.v_flat(a, mu);
  Eigen::VectorXd d(l.dim());
  d.head(l.base_dim()) = b.d2Ldxdv.col(I);
  d.segment(l.base_dim(), l.m) = b.d2Ldydv.col(I);
  d.tail(l.jet_dim()) = b.H.row(I).transpose();
  return d;
}

Form omega_form(const JetPoint& p, const DerivativeBundle& b) {
  const JetLayout& l = p.layout();
  const int N = l.dim();
  Form omega(N, l.n + 2);
  const Form vol = base_volume(l);
  for (int a = 0; a < l.m; ++a) {
    if (b.dLdy[a] == 0.0) continue;
    omega += Form::monomial(N, -b.dLdy[a], {Covector::basis(N, l.y_index(a))}).wedge(vol);
  }
  for (int mu = 0; mu <= l.n; ++mu) {
    const Form minor = base_volume_minor(l, mu);
    for (int a = 0; a < l.m; ++a) {
      const Form head = Form::monomial(
          N, -1.0,
          {Covector::dense(momentum_differential(b, a, mu)), Covector::dense(contact_covector(p, a))});
      omega += head.wedge(minor);
    }
  }
  return omega;
}

double omega_L_eval(const LagrangianModel& model, const JetPoint& p,
                    std::span<const TangentVector> vecs) {
  const JetLayout& l = model.layout();
  if (static_cast<int>(vecs.size()) != l.n + 2) {
    throw InvalidArgument("omega_L_eval needs n+2 = " + std::to_string(l.n + 2) + " vectors");
  }
  return omega_form(p, derivative_bundle(model, p)).eval(vecs);
}

}  // namespace nhfields
