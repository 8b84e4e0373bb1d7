#pragma once

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "nhfields/exterior.hpp"
#include "nhfields/grid.hpp"
#include "nhfields/layout.hpp"

namespace nhfields {

/// Dense rank-3 array, row-major in (i, j, k).
class Tensor3 {
 public:
  Tensor3() = default;
  Tensor3(int d0, int d1, int d2) : d0_(d0), d1_(d1), d2_(d2), data_(Eigen::VectorXd::Zero(d0 * d1 * d2)) {}

  int dim0() const { return d0_; }
  int dim1() const { return d1_; }
  int dim2() const { return d2_; }

  double& operator()(int i, int j, int k) { return data_[(i * d1_ + j) * d2_ + k]; }
  double operator()(int i, int j, int k) const { return data_[(i * d1_ + j) * d2_ + k]; }

  const Eigen::VectorXd& flat() const { return data_; }
  Eigen::VectorXd& flat() { return data_; }

 private:
  int d0_ = 0, d1_ = 0, d2_ = 0;
  Eigen::VectorXd data_;
};

class JetPoint {
 public:
  explicit JetPoint(const JetLayout& layout);
  JetPoint(const JetLayout& layout, Eigen::VectorXd coords);

  const JetLayout& layout() const { return layout_; }

  double x(int mu) const { return c_[layout_.x_index(mu)]; }
  double y(int a) const { return c_[layout_.y_index(a)]; }
  double v(int a, int mu) const { return c_[layout_.v_index(a, mu)]; }
  double& x(int mu) { return c_[layout_.x_index(mu)]; }
  double& y(int a) { return c_[layout_.y_index(a)]; }
  double& v(int a, int mu) { return c_[layout_.v_index(a, mu)]; }

  const Eigen::VectorXd& coords() const { return c_; }
  Eigen::VectorXd& coords() { return c_; }

 private:
  JetLayout layout_;
  Eigen::VectorXd c_;
};

struct Jet2Point {
  JetPoint jet;
  Tensor3 w;  // w(a, mu, nu) = d^2 y^a / dx^mu dx^nu

  explicit Jet2Point(const JetLayout& layout)
      : jet(layout), w(layout.m, layout.n + 1, layout.n + 1) {}
  Jet2Point(JetPoint p, Tensor3 second) : jet(std::move(p)), w(std::move(second)) {}
};

struct ConnectionCoeffs {
  Eigen::MatrixXd gamma;  // m x (n+1)
  Tensor3 gamma2;         // (m, n+1, n+1)

  static ConnectionCoeffs zero(const JetLayout& layout);

  /// H_mu = d/dx^mu + Gamma^a_mu d/dy^a + Gamma^a_{mu nu} d/dv^a_nu.
  TangentVector horizontal_lift(const JetLayout& layout, int mu) const;
  double holonomy_defect() const;
};

/// theta^a(u) = u.dy[a] - v[a][mu] u.dx[mu].
Eigen::VectorXd contact_eval(const JetPoint& p, const TangentVector& u);

/// Contact form theta^a as a dense covector.
Eigen::VectorXd contact_covector(const JetPoint& p, int a);

double semiholonomic_residual(const ConnectionCoeffs& c, const JetPoint& p);

/// Time-sliced samples of a section over a periodic spatial grid.
struct SectionSamples {
  JetLayout layout;
  int nu = 0;
  std::vector<double> times;
  // values[t] is (grid points) x m.
  std::vector<Eigen::MatrixXd> values;
  // Optional analytic time slices, same shapes as values.
  std::vector<Eigen::MatrixXd> ydot;
  std::vector<Eigen::MatrixXd> yddot;
  // jump(a, i): per-period increment of y^a along spatial axis i.
  Eigen::MatrixXd jump;
};

struct ProlongedJet {
  Jet2Point point;
  double symmetry_defect = 0.0;  // max |w(a,mu,nu) - w(a,nu,mu)| before averaging
};

ProlongedJet prolong_section(const SectionSamples& samples, int time_index, int point_index,
                             DerivativeScheme scheme = DerivativeScheme::Central4);

/// CSV with header `t,u,y1..ym`; n = 1.
SectionSamples read_section_csv(const std::string& path);
void write_section_csv(const std::string& path, const SectionSamples& samples);

}  // namespace nhfields
