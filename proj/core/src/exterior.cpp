#include "nhfields/exterior.hpp"

#include <string>

#include "nhfields/errors.hpp"

namespace nhfields {

namespace {

// Stack storage for the small determinants that dominate form evaluation.
using SmallMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, 12, 12>;

void require_dim(int got, int want, const char* what) {
  if (got != want) {
    throw InvalidArgument(std::string(what) + ": dimension " + std::to_string(got) +
                          " does not match " + std::to_string(want));
  }
}

double small_det(SmallMatrix& a) {
  const int k = static_cast<int>(a.rows());
  if (k == 0) return 1.0;
  if (k == 1) return a(0, 0);
  if (k == 2) return a(0, 0) * a(1, 1) - a(0, 1) * a(1, 0);
  if (k > 12) return Eigen::MatrixXd(a).partialPivLu().determinant();
  // In-place Gaussian elimination with partial pivoting.
  double det = 1.0;
  for (int c = 0; c < k; ++c) {
    int piv = c;
    for (int r = c + 1; r < k; ++r) {
      if (std::abs(a(r, c)) > std::abs(a(piv, c))) piv = r;
    }
    if (a(piv, c) == 0.0) return 0.0;
    if (piv != c) {
      a.row(piv).swap(a.row(c));
      det = -det;
    }
    det *= a(c, c);
    for (int r = c + 1; r < k; ++r) {
      const double f = a(r, c) / a(c, c);
      for (int j = c + 1; j < k; ++j) a(r, j) -= f * a(c, j);
    }
  }
  return det;
}

}  // namespace

TangentVector::TangentVector(const JetLayout& layout)
    : layout_(layout), c_(Eigen::VectorXd::Zero(layout.dim())) {}

TangentVector::TangentVector(const JetLayout& layout, Eigen::VectorXd components)
    : layout_(layout), c_(std::move(components)) {
  require_dim(static_cast<int>(c_.size()), layout_.dim(), "TangentVector");
}

TangentVector TangentVector::basis(const JetLayout& layout, int index) {
  TangentVector t(layout);
  if (index < 0 || index >= layout.dim()) throw InvalidArgument("basis index out of range");
  t.c_[index] = 1.0;
  return t;
}

Covector Covector::basis(int dim, int index) {
  if (index < 0 || index >= dim) throw InvalidArgument("covector index out of range");
  return Covector(dim, index);
}

Covector Covector::dense(Eigen::VectorXd components) {
  const int dim = static_cast<int>(components.size());
  return Covector(dim, std::move(components));
}

Eigen::VectorXd Covector::to_dense() const {
  if (is_basis()) return Eigen::VectorXd::Unit(dim_, basis_index());
  return std::get<Eigen::VectorXd>(rep_);
}

double Covector::apply(const TangentVector& v) const {
  require_dim(v.dim(), dim_, "Covector::apply");
  if (is_basis()) return v.components()[basis_index()];
  return std::get<Eigen::VectorXd>(rep_).dot(v.components());
}

Form Form::monomial(int dim, double coeff, std::vector<Covector> factors) {
  Form f(dim, static_cast<int>(factors.size()));
  f.add_term(FormTerm{coeff, std::move(factors)});
  return f;
}

void Form::add_term(FormTerm term) {
  require_dim(static_cast<int>(term.factors.size()), degree_, "Form::add_term degree");
  for (const auto& c : term.factors) require_dim(c.dim(), dim_, "Form::add_term");
  terms_.push_back(std::move(term));
}

Form& Form::operator+=(const Form& other) {
  require_dim(other.dim_, dim_, "Form::operator+=");
  require_dim(other.degree_, degree_, "Form::operator+= degree");
  terms_.insert(terms_.end(), other.terms_.begin(), other.terms_.end());
  return *this;
}

Form Form::scaled(double s) const {
  Form out = *this;
  for (auto& t : out.terms_) t.coeff *= s;
  return out;
}

Form Form::wedge(const Form& other) const {
  require_dim(other.dim_, dim_, "Form::wedge");
  Form out(dim_, degree_ + other.degree_);
  for (const auto& a : terms_) {
    for (const auto& b : other.terms_) {
      FormTerm t{a.coeff * b.coeff, a.factors};
      t.factors.insert(t.factors.end(), b.factors.begin(), b.factors.end());
      out.terms_.push_back(std::move(t));
    }
  }
  return out;
}

double Form::eval(std::span<const TangentVector> vectors) const {
  require_dim(static_cast<int>(vectors.size()), degree_, "Form::eval arity");
  double sum = 0.0;
  for (const auto& t : terms_) {
    if (t.coeff == 0.0) continue;
    sum += t.coeff * eval_wedge_monomial(t.factors, vectors);
  }
  return sum;
}

double eval_wedge_monomial(std::span<const Covector> factors,
                           std::span<const TangentVector> vectors) {
  const int k = static_cast<int>(factors.size());
  require_dim(static_cast<int>(vectors.size()), k, "eval_wedge_monomial arity");
  SmallMatrix a(k, k);
  for (int i = 0; i < k; ++i) {
    for (int j = 0; j < k; ++j) a(i, j) = factors[i].apply(vectors[j]);
  }
  return small_det(a);
}

Form contract_form(const Form& form, const TangentVector& vector) {
  if (form.degree() < 1) throw InvalidArgument("cannot contract a 0-form");
  require_dim(vector.dim(), form.dim(), "contract_form");
  Form out(form.dim(), form.degree() - 1);
  for (const auto& t : form.terms()) {
    for (int i = 0; i < form.degree(); ++i) {
      const double c = t.factors[i].apply(vector);
      if (c == 0.0) continue;
      FormTerm nt;
      nt.coeff = t.coeff * c * ((i % 2 == 0) ? 1.0 : -1.0);
      nt.factors.reserve(t.factors.size() - 1);
      for (int j = 0; j < form.degree(); ++j) {
        if (j != i) nt.factors.push_back(t.factors[j]);
      }
      out.add_term(std::move(nt));
    }
  }
  return out;
}

Form base_volume(const JetLayout& layout) {
  std::vector<Covector> f;
  for (int mu = 0; mu <= layout.n; ++mu) f.push_back(Covector::basis(layout.dim(), layout.x_index(mu)));
  return Form::monomial(layout.dim(), 1.0, std::move(f));
}

Form base_volume_minor(const JetLayout& layout, int mu) {
  return contract_form(base_volume(layout), TangentVector::basis(layout, layout.x_index(mu)));
}

}  // namespace nhfields
