#pragma once

#include <functional>
#include <span>
#include <string>
#include <utility>

#include <Eigen/Dense>

#include "nhfields/dual.hpp"
#include "nhfields/exterior.hpp"
#include "nhfields/jet.hpp"
#include "nhfields/layout.hpp"

namespace nhfields {

/// Read-only view of jet coordinates over scalar type S.
template <class S>
class JetView {
 public:
  JetView(const JetLayout& layout, const S* coords) : layout_(&layout), c_(coords) {}

  const JetLayout& layout() const { return *layout_; }
  const S& x(int mu) const { return c_[layout_->x_index(mu)]; }
  const S& y(int a) const { return c_[layout_->y_index(a)]; }
  const S& v(int a, int mu) const { return c_[layout_->v_index(a, mu)]; }
  const S& operator[](int i) const { return c_[i]; }

 private:
  const JetLayout* layout_;
  const S* c_;
};

/// Which coordinate blocks a Lagrangian actually depends on. Declaring a block
/// absent skips its mixed second derivatives.
struct Dependence {
  bool x = true;
  bool y = true;
};

class LagrangianModel {
 public:
  template <class S>
  using Fn = std::function<S(const JetView<S>&)>;

  /// `f` must be callable as f(const JetView<S>&) for S in {double, Dual1, Dual2}.
  template <class F>
  static LagrangianModel make(std::string name, const JetLayout& layout, F f, Dependence dep = {}) {
    LagrangianModel m;
    m.name_ = std::move(name);
    m.layout_ = layout;
    m.dep_ = dep;
    m.f0_ = [f](const JetView<double>& p) { return f(p); };
    m.f1_ = [f](const JetView<Dual1>& p) { return f(p); };
    m.f2_ = [f](const JetView<Dual2>& p) { return f(p); };
    layout.validate();
    return m;
  }

  const std::string& name() const { return name_; }
  const JetLayout& layout() const { return layout_; }
  const Dependence& dependence() const { return dep_; }

  double operator()(const JetPoint& p) const;
  double eval(const JetView<double>& p) const { return f0_(p); }
  Dual1 eval(const JetView<Dual1>& p) const { return f1_(p); }
  Dual2 eval(const JetView<Dual2>& p) const { return f2_(p); }

 private:
  std::string name_;
  JetLayout layout_;
  Dependence dep_;
  Fn<double> f0_;
  Fn<Dual1> f1_;
  Fn<Dual2> f2_;
};

struct DerivativeBundle {
  JetLayout layout;
  double L = 0.0;
  Eigen::VectorXd dLdx;     // n+1
  Eigen::VectorXd dLdy;     // m
  Eigen::VectorXd dLdv;     // M, v-block order
  Eigen::MatrixXd H;        // M x M, d2L/dv dv
  Eigen::MatrixXd d2Ldydv;  // m x M, row b: d2L/dy^b dv^a_mu
  Eigen::MatrixXd d2Ldxdv;  // (n+1) x M

  double dv(int a, int mu) const { return dLdv[layout.v_flat(a, mu)]; }
  double hess(int a, int mu, int b, int nu) const {
    return H(layout.v_flat(a, mu), layout.v_flat(b, nu));
  }
};

DerivativeBundle derivative_bundle(const LagrangianModel& model, const JetPoint& p);

/// Gradient of L over all jet coordinates (first-order AD only).
Eigen::VectorXd lagrangian_gradient(const LagrangianModel& model, const JetPoint& p);

struct RegularityThresholds {
  double det = 1e-10;
  double cond = 1e12;
};

struct Regularity {
  double det = 0.0;
  double cond = 0.0;
  bool regular = false;
};

Regularity regularity_check(const DerivativeBundle& bundle, const RegularityThresholds& th = {});
Regularity regularity_check(const LagrangianModel& model, const JetPoint& p,
                            const RegularityThresholds& th = {});

/// Full differential of dL/dv^a_mu as a covector on J^1.
Eigen::VectorXd momentum_differential(const DerivativeBundle& bundle, int a, int mu);

/// Omega_L = -(dL/dy^a) dy^a ^ d^{n+1}x - d(dL/dv^a_mu) ^ theta^a ^ d^n x_mu.
Form omega_form(const JetPoint& p, const DerivativeBundle& bundle);

double omega_L_eval(const LagrangianModel& model, const JetPoint& p,
                    std::span<const TangentVector> vecs);

}  // namespace nhfields
