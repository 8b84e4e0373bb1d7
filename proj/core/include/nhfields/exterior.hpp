#pragma once

#include <span>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "nhfields/layout.hpp"

namespace nhfields {

class TangentVector {
 public:
  explicit TangentVector(const JetLayout& layout);
  TangentVector(const JetLayout& layout, Eigen::VectorXd components);

  static TangentVector basis(const JetLayout& layout, int index);

  const JetLayout& layout() const { return layout_; }
  int dim() const { return static_cast<int>(c_.size()); }

  double dx(int mu) const { return c_[layout_.x_index(mu)]; }
  double dy(int a) const { return c_[layout_.y_index(a)]; }
  double dv(int a, int mu) const { return c_[layout_.v_index(a, mu)]; }
  double& dx(int mu) { return c_[layout_.x_index(mu)]; }
  double& dy(int a) { return c_[layout_.y_index(a)]; }
  double& dv(int a, int mu) { return c_[layout_.v_index(a, mu)]; }

  const Eigen::VectorXd& components() const { return c_; }
  Eigen::VectorXd& components() { return c_; }

 private:
  JetLayout layout_;
  Eigen::VectorXd c_;
};

/// Either a basis covector (index into the flat layout) or a dense one.
class Covector {
 public:
  static Covector basis(int dim, int index);
  static Covector dense(Eigen::VectorXd components);

  int dim() const { return dim_; }
  bool is_basis() const { return std::holds_alternative<int>(rep_); }
  int basis_index() const { return std::get<int>(rep_); }
  Eigen::VectorXd to_dense() const;

  double apply(const TangentVector& v) const;

 private:
  Covector(int dim, std::variant<int, Eigen::VectorXd> rep) : dim_(dim), rep_(std::move(rep)) {}

  int dim_;
  std::variant<int, Eigen::VectorXd> rep_;
};

struct FormTerm {
  double coeff = 1.0;
  std::vector<Covector> factors;
};

/// A k-form on an N-dimensional space stored as a sum of wedge monomials.
class Form {
 public:
  Form(int dim, int degree) : dim_(dim), degree_(degree) {}

  static Form monomial(int dim, double coeff, std::vector<Covector> factors);

  int dim() const { return dim_; }
  int degree() const { return degree_; }
  const std::vector<FormTerm>& terms() const { return terms_; }

  void add_term(FormTerm term);
  Form& operator+=(const Form& other);
  Form scaled(double s) const;
  Form wedge(const Form& other) const;

  double eval(std::span<const TangentVector> vectors) const;

 private:
  int dim_;
  int degree_;
  std::vector<FormTerm> terms_;
};

/// det(<factors[i], vectors[j]>).
double eval_wedge_monomial(std::span<const Covector> factors,
                           std::span<const TangentVector> vectors);

Form contract_form(const Form& form, const TangentVector& vector);

/// dx^0 ^ ... ^ dx^n.
Form base_volume(const JetLayout& layout);

/// d^n x_mu = i_{d/dx^mu}(dx^0 ^ ... ^ dx^n).
Form base_volume_minor(const JetLayout& layout, int mu);

}  // namespace nhfields
