#pragma once

#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "nhfields/dual.hpp"
#include "nhfields/exterior.hpp"
#include "nhfields/jet.hpp"
#include "nhfields/lagrangian.hpp"

namespace nhfields {

enum class CoefficientMode { Chetaev, Custom };

/// Returns the k x M matrix (C_alpha)^mu_a, columns in v-block order.
using CoefficientFn = std::function<Eigen::MatrixXd(const JetPoint&)>;

struct ConstraintLinearization {
  JetLayout layout;
  Eigen::VectorXd values;    // k
  Eigen::MatrixXd jacobian;  // k x N

  Eigen::MatrixXd dphidx() const { return jacobian.leftCols(layout.base_dim()); }
  Eigen::MatrixXd dphidy() const { return jacobian.middleCols(layout.base_dim(), layout.m); }
  Eigen::MatrixXd dphidv() const { return jacobian.rightCols(layout.jet_dim()); }
};

class ConstraintSpec {
 public:
  template <class S>
  using Fn = std::function<void(const JetView<S>&, S* out)>;

  /// `f(p, out)` writes the k constraint values; generic over double and Dual1.
  template <class F>
  static ConstraintSpec make(std::string name, const Dims& dims, F f) {
    ConstraintSpec s;
    s.name_ = std::move(name);
    s.dims_ = dims;
    s.f0_ = [f](const JetView<double>& p, double* out) { f(p, out); };
    s.f1_ = [f](const JetView<Dual1>& p, Dual1* out) { f(p, out); };
    dims.validate();
    return s;
  }

  /// k = 0; only used internally to run constrained code paths unconstrained.
  static ConstraintSpec none(const JetLayout& layout);

  ConstraintSpec with_custom_coefficients(CoefficientFn fn) const;

  const std::string& name() const { return name_; }
  const Dims& dims() const { return dims_; }
  const JetLayout& layout() const { return dims_.layout; }
  int count() const { return dims_.k; }
  CoefficientMode mode() const { return mode_; }

  Eigen::VectorXd values(const JetPoint& p) const;
  ConstraintLinearization linearize(const JetPoint& p) const;
  Eigen::MatrixXd custom_coefficients(const JetPoint& p) const { return custom_(p); }

 private:
  std::string name_;
  Dims dims_;
  Fn<double> f0_;
  Fn<Dual1> f1_;
  CoefficientMode mode_ = CoefficientMode::Chetaev;
  CoefficientFn custom_;
};

/// (C_alpha)^mu_a: dphi/dv in Chetaev mode, the user matrix in Custom mode.
Eigen::MatrixXd chetaev_coefficients(const ConstraintSpec& spec, const JetPoint& p);
Eigen::MatrixXd chetaev_coefficients(const ConstraintSpec& spec, const JetPoint& p,
                                     const ConstraintLinearization& lin);

/// Phi_alpha = (C_alpha)^mu_a theta^a ^ d^n x_mu.
std::vector<Form> constraint_forms(const JetPoint& p, const Eigen::MatrixXd& coeffs);

Eigen::VectorXd constraint_form_eval(const ConstraintSpec& spec, const JetPoint& p,
                                     std::span<const TangentVector> vecs);

struct RankTolerances {
  double on_constraint = 1e-8;
  double relative_sv = 1e-8;
};

int constraint_rank_check(const ConstraintSpec& spec, const JetPoint& p,
                          const RankTolerances& tol = {});

/// Newton iteration in the selected v-columns (min-norm steps) onto phi = 0.
JetPoint project_to_constraint(const ConstraintSpec& spec, const JetPoint& p,
                               const std::vector<int>& free_indices, double tol = 1e-13,
                               int max_iter = 50);

}  // namespace nhfields
