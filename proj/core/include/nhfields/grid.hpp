#pragma once

#include <Eigen/Dense>

namespace nhfields {

enum class DerivativeScheme { Central4, Spectral };

/// Uniform periodic grid on the unit n-torus, nu points per direction.
/// Points are numbered with axis 0 varying slowest.
class PeriodicGrid {
 public:
  PeriodicGrid(int dims, int nu);

  int dims() const { return dims_; }
  int nu() const { return nu_; }
  int size() const { return size_; }
  double spacing() const { return 1.0 / nu_; }

  int multi_index(int point, int axis) const;
  double coordinate(int point, int axis) const { return multi_index(point, axis) * spacing(); }
  int shift(int point, int axis, int offset) const;

 private:
  int dims_;
  int nu_;
  int size_;
  Eigen::VectorXi strides_;
};

/// d/du^axis of grid samples. `jump` is the per-period increment of a
/// quasi-periodic field (f(u + e_axis) = f(u) + jump).
class PeriodicDifferentiator {
 public:
  PeriodicDifferentiator(const PeriodicGrid& grid, DerivativeScheme scheme);

  const PeriodicGrid& grid() const { return grid_; }
  DerivativeScheme scheme() const { return scheme_; }

  Eigen::VectorXd derivative(const Eigen::VectorXd& f, int axis, double jump = 0.0) const;

 private:
  PeriodicGrid grid_;
  DerivativeScheme scheme_;
  Eigen::MatrixXd spectral_;
};

/// Fourier differentiation matrix for nu equispaced points on a unit period.
Eigen::MatrixXd spectral_derivative_matrix(int nu);

}  // namespace nhfields
