#include "nhfields/jet.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "nhfields/errors.hpp"

namespace nhfields {

JetPoint::JetPoint(const JetLayout& layout)
    : layout_(layout), c_(Eigen::VectorXd::Zero(layout.dim())) {}

JetPoint::JetPoint(const JetLayout& layout, Eigen::VectorXd coords)
    : layout_(layout), c_(std::move(coords)) {
  if (c_.size() != layout_.dim()) throw InvalidArgument("JetPoint: coordinate count mismatch");
}

ConnectionCoeffs ConnectionCoeffs::zero(const JetLayout& layout) {
  return {Eigen::MatrixXd::Zero(layout.m, layout.n + 1),
          Tensor3(layout.m, layout.n + 1, layout.n + 1)};
}

TangentVector ConnectionCoeffs::horizontal_lift(const JetLayout& layout, int mu) const {
  TangentVector h(layout);
  h.dx(mu) = 1.0;
  for (int a = 0; a < layout.m; ++a) {
    h.dy(a) = gamma(a, mu);
    for (int nu = 0; nu <= layout.n; ++nu) h.dv(a, nu) = gamma2(a, mu, nu);
  }
  return h;
}

double ConnectionCoeffs::holonomy_defect() const {
  double d = 0.0;
  for (int a = 0; a < gamma2.dim0(); ++a)
    for (int mu = 0; mu < gamma2.dim1(); ++mu)
      for (int nu = mu + 1; nu < gamma2.dim2(); ++nu)
        d = std::max(d, std::abs(gamma2(a, mu, nu) - gamma2(a, nu, mu)));
  return d;
}

Eigen::VectorXd contact_eval(const JetPoint& p, const TangentVector& u) {
  const JetLayout& l = p.layout();
  if (!(u.layout() == l)) throw InvalidArgument("contact_eval: layout mismatch");
  Eigen::VectorXd th(l.m);
  for (int a = 0; a < l.m; ++a) {
    double s = u.dy(a);
    for (int mu = 0; mu <= l.n; ++mu) s -= p.v(a, mu) * u.dx(mu);
    th[a] = s;
  }
  return th;
}

Eigen::VectorXd contact_covector(const JetPoint& p, int a) {
  const JetLayout& l = p.layout();
  Eigen::VectorXd c = Eigen::VectorXd::Zero(l.dim());
  c[l.y_index(a)] = 1.0;
  for (int mu = 0; mu <= l.n; ++mu) c[l.x_index(mu)] = -p.v(a, mu);
  return c;
}

double semiholonomic_residual(const ConnectionCoeffs& c, const JetPoint& p) {
  const JetLayout& l = p.layout();
  double direct = 0.0;
  double via_contact = 0.0;
  for (int mu = 0; mu <= l.n; ++mu) {
    const Eigen::VectorXd th = contact_eval(p, c.horizontal_lift(l, mu));
    for (int a = 0; a < l.m; ++a) {
      direct = std::max(direct, std::abs(c.gamma(a, mu) - p.v(a, mu)));
      via_contact = std::max(via_contact, std::abs(th[a]));
    }
  }
  if (std::abs(direct - via_contact) > 1e-12 * std::max(1.0, direct)) {
    throw ConsistencyError("semiholonomic_residual: contact cross-check disagrees (" +
                           std::to_string(direct) + " vs " + std::to_string(via_contact) + ")");
  }
  return direct;
}

namespace {

// Weights for the d-th derivative at offset 0 from the given node offsets.
Eigen::VectorXd fd_weights(const std::vector<double>& nodes, int d) {
  const int k = static_cast<int>(nodes.size());
  Eigen::MatrixXd A(k, k);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(k);
  for (int r = 0; r < k; ++r) {
    for (int c = 0; c < k; ++c) A(r, c) = std::pow(nodes[c], r);
  }
  double fact = 1.0;
  for (int i = 2; i <= d; ++i) fact *= i;
  rhs[d] = fact;
  return A.partialPivLu().solve(rhs);
}

// Temporal derivative of order d at time index ti from a 5-level window.
Eigen::MatrixXd time_derivative(const std::vector<Eigen::MatrixXd>& levels, double dt, int ti, int d) {
  const int T = static_cast<int>(levels.size());
  const int start = std::clamp(ti - 2, 0, T - 5);
  std::vector<double> nodes;
  for (int i = 0; i < 5; ++i) nodes.push_back(static_cast<double>(start + i - ti));
  const Eigen::VectorXd w = fd_weights(nodes, d);
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(levels[ti].rows(), levels[ti].cols());
  for (int i = 0; i < 5; ++i) out += w[i] * levels[start + i];
  return out / std::pow(dt, d);
}

void check_periodic(const PeriodicGrid& grid, const Eigen::MatrixXd& y, const Eigen::MatrixXd& jump) {
  const int nu = grid.nu();
  for (int axis = 0; axis < grid.dims(); ++axis) {
    for (int a = 0; a < y.cols(); ++a) {
      const double jmp = jump(a, axis);
      double interior = 0.0;
      double wrap = 0.0;
      for (int p = 0; p < grid.size(); ++p) {
        const int q = grid.shift(p, axis, 1);
        const double d = y(q, a) - y(p, a) - jmp * (grid.coordinate(q, axis) - grid.coordinate(p, axis));
        if (grid.multi_index(p, axis) == nu - 1) {
          wrap = std::max(wrap, std::abs(d));
        } else {
          interior = std::max(interior, std::abs(d));
        }
      }
      if (wrap > 4.0 * interior + 1e-12) {
        throw InvalidArgument("prolong_section: samples are not periodic along axis " +
                              std::to_string(axis) + " (wrap step " + std::to_string(wrap) +
                              ", interior step " + std::to_string(interior) + ")");
      }
    }
  }
}

}  // namespace

ProlongedJet prolong_section(const SectionSamples& s, int ti, int point, DerivativeScheme scheme) {
  const JetLayout& l = s.layout;
  l.validate();
  const int n = l.n;
  const int m = l.m;
  const PeriodicGrid grid(n, s.nu);
  const int T = static_cast<int>(s.values.size());
  if (T == 0 || static_cast<int>(s.times.size()) != T) {
    throw InvalidArgument("prolong_section: times and value slices disagree");
  }
  if (ti < 0 || ti >= T) throw InvalidArgument("prolong_section: time index out of range");
  if (point < 0 || point >= grid.size()) throw InvalidArgument("prolong_section: point out of range");
  for (const auto& v : s.values) {
    if (v.rows() != grid.size() || v.cols() != m) throw InvalidArgument("prolong_section: slice shape");
  }
  double dt = 0.0;
  if (T > 1) {
    dt = s.times[1] - s.times[0];
    for (int i = 1; i < T; ++i) {
      const double d = s.times[i] - s.times[i - 1];
      if (!(dt > 0.0) || std::abs(d - dt) > 1e-9 * std::abs(dt)) {
        throw InvalidArgument("prolong_section: time levels are not uniform");
      }
    }
  }
  const Eigen::MatrixXd jump = s.jump.size() ? s.jump : Eigen::MatrixXd::Zero(m, n);
  const bool have_ydot = !s.ydot.empty();
  const bool have_yddot = !s.yddot.empty();
  const bool have_levels = T >= 5;
  if (!have_ydot && !have_levels) {
    throw InvalidArgument("prolong_section: need analytic time slices or at least 5 time levels");
  }

  const Eigen::MatrixXd& Y = s.values[ti];
  check_periodic(grid, Y, jump);
  const PeriodicDifferentiator D(grid, scheme);

  // Spatial first derivatives on the whole slice (one column per (a, i)).
  std::vector<Eigen::MatrixXd> dY(n, Eigen::MatrixXd(grid.size(), m));
  for (int i = 0; i < n; ++i)
    for (int a = 0; a < m; ++a) dY[i].col(a) = D.derivative(Y.col(a), i, jump(a, i));

  Eigen::MatrixXd ydot_slice;
  if (have_ydot) {
    ydot_slice = s.ydot[ti];
  } else {
    ydot_slice = time_derivative(s.values, dt, ti, 1);
  }

  ProlongedJet out{Jet2Point(l), 0.0};
  JetPoint& p = out.point.jet;
  for (int i = 0; i < n; ++i) p.x(i + 1) = grid.coordinate(point, i);
  p.x(0) = s.times[ti];
  for (int a = 0; a < m; ++a) {
    p.y(a) = Y(point, a);
    p.v(a, 0) = ydot_slice(point, a);
    for (int i = 0; i < n; ++i) p.v(a, i + 1) = dY[i](point, a);
  }

  Tensor3& w = out.point.w;
  double defect = 0.0;
  auto set_sym = [&](int a, int mu, int nu, double first, double second) {
    defect = std::max(defect, std::abs(first - second));
    const double avg = 0.5 * (first + second);
    w(a, mu, nu) = avg;
    w(a, nu, mu) = avg;
  };

  // Spatial-spatial block.
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) {
      for (int a = 0; a < m; ++a) {
        const double dij = D.derivative(dY[i].col(a), j, 0.0)[point];
        const double dji = (i == j) ? dij : D.derivative(dY[j].col(a), i, 0.0)[point];
        set_sym(a, i + 1, j + 1, dij, dji);
      }
    }
  }
  // Mixed block.
  for (int i = 0; i < n; ++i) {
    std::vector<Eigen::MatrixXd> dYi_levels;
    Eigen::MatrixXd dt_dYi;
    if (have_levels) {
      for (int tl = 0; tl < T; ++tl) {
        Eigen::MatrixXd d(grid.size(), m);
        for (int a = 0; a < m; ++a) d.col(a) = D.derivative(s.values[tl].col(a), i, jump(a, i));
        dYi_levels.push_back(std::move(d));
      }
      dt_dYi = time_derivative(dYi_levels, dt, ti, 1);
    }
    for (int a = 0; a < m; ++a) {
      const double from_space = D.derivative(ydot_slice.col(a), i, 0.0)[point];
      const double from_time = have_levels ? dt_dYi(point, a) : from_space;
      set_sym(a, 0, i + 1, from_space, from_time);
    }
  }
  // Temporal block.
  Eigen::MatrixXd ytt;
  if (have_yddot) {
    ytt = s.yddot[ti];
  } else if (have_ydot && T >= 5) {
    ytt = time_derivative(s.ydot, dt, ti, 1);
  } else if (have_levels) {
    ytt = time_derivative(s.values, dt, ti, 2);
  } else {
    throw InvalidArgument("prolong_section: second time derivative needs yddot or 5 time levels");
  }
  for (int a = 0; a < m; ++a) w(a, 0, 0) = ytt(point, a);

  out.symmetry_defect = defect;
  return out;
}

}  // namespace nhfields
