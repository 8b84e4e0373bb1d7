#include "nhfields/grid.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "nhfields/errors.hpp"

namespace nhfields {

PeriodicGrid::PeriodicGrid(int dims, int nu) : dims_(dims), nu_(nu), size_(1), strides_(dims) {
  if (dims < 0) throw InvalidArgument("grid dimension must be >= 0");
  if (nu < 5) throw InvalidArgument("periodic grid needs at least 5 points per direction, got " +
                                    std::to_string(nu));
  for (int a = dims - 1; a >= 0; --a) {
    strides_[a] = size_;
    size_ *= nu;
  }
}

int PeriodicGrid::multi_index(int point, int axis) const { return (point / strides_[axis]) % nu_; }

int PeriodicGrid::shift(int point, int axis, int offset) const {
  const int i = multi_index(point, axis);
  int j = (i + offset) % nu_;
  if (j < 0) j += nu_;
  return point + (j - i) * strides_[axis];
}

Eigen::MatrixXd spectral_derivative_matrix(int nu) {
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(nu, nu);
  const double pi = std::numbers::pi;
  for (int j = 0; j < nu; ++j) {
    for (int k = 0; k < nu; ++k) {
      if (j == k) continue;
      const int diff = j - k;
      const double sign = (diff % 2 == 0) ? 1.0 : -1.0;
      const double arg = pi * diff / nu;
      d(j, k) = (nu % 2 == 0) ? pi * sign / std::tan(arg) : pi * sign / std::sin(arg);
    }
  }
  return d;
}

PeriodicDifferentiator::PeriodicDifferentiator(const PeriodicGrid& grid, DerivativeScheme scheme)
    : grid_(grid), scheme_(scheme) {
  if (scheme == DerivativeScheme::Spectral) spectral_ = spectral_derivative_matrix(grid.nu());
}

Eigen::VectorXd PeriodicDifferentiator::derivative(const Eigen::VectorXd& f, int axis,
                                                   double jump) const {
  const int P = grid_.size();
  if (f.size() != P) throw InvalidArgument("field size does not match grid");
  if (axis < 0 || axis >= grid_.dims()) throw InvalidArgument("axis out of range");
  const double h = grid_.spacing();

  // Differentiate the periodic part g = f - jump * u, then add jump back.
  Eigen::VectorXd g = f;
  if (jump != 0.0) {
    for (int p = 0; p < P; ++p) g[p] -= jump * grid_.coordinate(p, axis);
  }

  Eigen::VectorXd out(P);
  if (scheme_ == DerivativeScheme::Central4) {
    const double s = 1.0 / (12.0 * h);
    for (int p = 0; p < P; ++p) {
      out[p] = s * (-g[grid_.shift(p, axis, 2)] + 8.0 * g[grid_.shift(p, axis, 1)] -
                    8.0 * g[grid_.shift(p, axis, -1)] + g[grid_.shift(p, axis, -2)]);
    }
  } else {
    const int nu = grid_.nu();
    Eigen::VectorXd line(nu);
    std::vector<int> idx(nu);
    for (int p = 0; p < P; ++p) {
      if (grid_.multi_index(p, axis) != 0) continue;
      for (int i = 0; i < nu; ++i) {
        idx[i] = grid_.shift(p, axis, i);
        line[i] = g[idx[i]];
      }
      const Eigen::VectorXd d = spectral_ * line;
      for (int i = 0; i < nu; ++i) out[idx[i]] = d[i];
    }
  }
  if (jump != 0.0) out.array() += jump;
  return out;
}

}  // namespace nhfields
