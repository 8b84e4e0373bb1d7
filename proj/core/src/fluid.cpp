#include "nhfields/fluid.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "nhfields/errors.hpp"

namespace nhfields {

namespace {

template <class S>
S det3(const JetView<S>& p) {
  auto F = [&](int a, int i) -> const S& { return p.v(a, i + 1); };
  return F(0, 0) * (F(1, 1) * F(2, 2) - F(1, 2) * F(2, 1)) -
         F(0, 1) * (F(1, 0) * F(2, 2) - F(1, 2) * F(2, 0)) +
         F(0, 2) * (F(1, 0) * F(2, 1) - F(1, 1) * F(2, 0));
}

Eigen::Matrix3d spatial_block(const JetPoint& p) {
  Eigen::Matrix3d F;
  for (int a = 0; a < 3; ++a)
    for (int i = 0; i < 3; ++i) F(a, i) = p.v(a, i + 1);
  return F;
}

}  // namespace

void FluidParams::validate() const {
  if (!(rho > 0.0)) throw InvalidArgument("fluid: rho must be > 0");
  if (kappa < 0.0) throw InvalidArgument("fluid: kappa must be >= 0");
  if (mu < 0.0) throw InvalidArgument("fluid: mu must be >= 0");
}

LagrangianModel fluid_model(const FluidParams& params) {
  params.validate();
  const FluidParams q = params;
  return LagrangianModel::make(
      "fluid", kFluidLayout,
      [q](const auto& p) {
        using S = std::decay_t<decltype(p[0])>;
        S kin = 0.0;
        S frob = 0.0;
        for (int a = 0; a < 3; ++a) {
          kin += p.v(a, 0) * p.v(a, 0);
          for (int i = 1; i <= 3; ++i) frob += p.v(a, i) * p.v(a, i);
        }
        const S dJ = det3(p) - 1.0;
        const S W = 0.5 * q.kappa * dJ * dJ + q.beta * dJ;
        return 0.5 * q.rho * kin - q.rho * (W + 0.5 * q.mu * frob);
      },
      Dependence{false, false});
}

ConstraintSpec incompressibility_constraint() {
  return ConstraintSpec::make("incompressibility", Dims{kFluidLayout, 1},
                              [](const auto& p, auto* out) { out[0] = det3(p) - 1.0; });
}

FluidQuantities fluid_quantities(const FluidParams& params, const JetPoint& p, double f_tol) {
  if (!(p.layout() == kFluidLayout)) throw InvalidArgument("fluid_quantities needs n = 3, m = 3");
  params.validate();
  FluidQuantities out;
  const Eigen::Matrix3d F = spatial_block(p);
  out.J = F.determinant();
  if (std::abs(out.J) < 1e-12) throw RegularityError("fluid_quantities: spatial jet block is singular");
  out.vinv = F.inverse();
  out.C = out.J * out.vinv;

  // Generic path: Chetaev coefficients and the AD Hessian of the actual L.
  const LagrangianModel model = fluid_model(params);
  const ConstraintSpec spec = incompressibility_constraint();
  const DerivativeBundle b = derivative_bundle(model, p);
  const ConstraintLinearization lin = spec.linearize(p);
  const Eigen::MatrixXd dphidv = lin.dphidv();
  out.zeta = solve_zeta(b, chetaev_coefficients(spec, p, lin));
  out.f = (out.zeta.zeta.transpose() * dphidv.transpose())(0, 0);
  if (std::abs(out.f) < f_tol) {
    throw CompatibilityError("fluid_quantities: f = zeta(phi) vanishes (" + std::to_string(out.f) + ")");
  }
  const int N = kFluidLayout.dim();
  const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(N, N);
  out.P = I - (1.0 / out.f) * out.zeta.embedded() * lin.jacobian;

  // Closed form: d2W/dv dv = W'' cof (x) cof + W' d2J + mu I on the spatial block.
  const double w1 = params.kappa * (out.J - 1.0) + params.beta;
  const double w2 = params.kappa;
  Eigen::MatrixXd Hs(9, 9);
  Eigen::VectorXd cof(9);
  for (int a = 0; a < 3; ++a)
    for (int i = 0; i < 3; ++i) cof[a * 3 + i] = out.C(i, a);
  for (int a = 0; a < 3; ++a)
    for (int i = 0; i < 3; ++i)
      for (int bb = 0; bb < 3; ++bb)
        for (int j = 0; j < 3; ++j) {
          const double d2J = out.J * (out.vinv(i, a) * out.vinv(j, bb) - out.vinv(i, bb) * out.vinv(j, a));
          Hs(a * 3 + i, bb * 3 + j) = w2 * cof[a * 3 + i] * cof[bb * 3 + j] + w1 * d2J +
                                      ((a == bb && i == j) ? params.mu : 0.0);
        }
  const Eigen::VectorXd zs = Hs.partialPivLu().solve(cof);
  out.closed_form_scale = -1.0 / params.rho;
  out.zeta_closed = Eigen::VectorXd::Zero(kFluidLayout.jet_dim());
  for (int a = 0; a < 3; ++a)
    for (int i = 0; i < 3; ++i) out.zeta_closed[kFluidLayout.v_flat(a, i + 1)] = out.closed_form_scale * zs[a * 3 + i];
  out.f_closed = out.zeta_closed.dot(dphidv.row(0));
  Eigen::MatrixXd Zc = Eigen::MatrixXd::Zero(N, 1);
  Zc.bottomRows(kFluidLayout.jet_dim()) = out.zeta_closed;
  out.P_closed = I - (1.0 / out.f_closed) * Zc * lin.jacobian;

  out.zeta_mismatch = (out.zeta.zeta.col(0) - out.zeta_closed).cwiseAbs().maxCoeff();
  out.f_mismatch = std::abs(out.f - out.f_closed);
  out.P_mismatch = (out.P - out.P_closed).cwiseAbs().maxCoeff();
  return out;
}

SectionPatch sample_patch(int points, double extent, const std::array<double, 4>& origin,
                          const SectionFn& section) {
  if (points < 9) throw InvalidArgument("sample_patch: need at least 9 points per direction");
  if (!(extent > 0.0)) throw InvalidArgument("sample_patch: extent must be > 0");
  SectionPatch s;
  s.points = points;
  s.spacing = extent / (points - 1);
  s.origin = origin;
  const int total = points * points * points * points;
  s.y.resize(total, 3);
  std::array<double, 4> x{};
  for (int t = 0; t < points; ++t)
    for (int i = 0; i < points; ++i)
      for (int j = 0; j < points; ++j)
        for (int k = 0; k < points; ++k) {
          x = {origin[0] + t * s.spacing, origin[1] + i * s.spacing, origin[2] + j * s.spacing,
               origin[3] + k * s.spacing};
          s.y.row(s.index(t, i, j, k)) = section(x).transpose();
        }
  return s;
}

namespace {

// Per time slice: spatial jet data on the points where a centred 4th-order
// stencil fits, then a second stencil for divergences.
struct SliceData {
  int N;
  std::vector<Eigen::Matrix3d> F;  // F(a, i) = dy^a/dx^i
  int at(int i, int j, int k) const { return (i * N + j) * N + k; }
};

double d4(double fm2, double fm1, double fp1, double fp2, double h) {
  return (fm2 - 8.0 * fm1 + 8.0 * fp1 - fp2) / (12.0 * h);
}

SliceData slice_jets(const SectionPatch& s, int t) {
  const int N = s.points;
  SliceData d{N, std::vector<Eigen::Matrix3d>(N * N * N, Eigen::Matrix3d::Zero())};
  const double h = s.spacing;
  for (int i = 2; i < N - 2; ++i)
    for (int j = 2; j < N - 2; ++j)
      for (int k = 2; k < N - 2; ++k) {
        Eigen::Matrix3d F;
        for (int a = 0; a < 3; ++a) {
          F(a, 0) = d4(s.y(s.index(t, i - 2, j, k), a), s.y(s.index(t, i - 1, j, k), a),
                       s.y(s.index(t, i + 1, j, k), a), s.y(s.index(t, i + 2, j, k), a), h);
          F(a, 1) = d4(s.y(s.index(t, i, j - 2, k), a), s.y(s.index(t, i, j - 1, k), a),
                       s.y(s.index(t, i, j + 1, k), a), s.y(s.index(t, i, j + 2, k), a), h);
          F(a, 2) = d4(s.y(s.index(t, i, j, k - 2), a), s.y(s.index(t, i, j, k - 1), a),
                       s.y(s.index(t, i, j, k + 1), a), s.y(s.index(t, i, j, k + 2), a), h);
        }
        if (std::abs(F.determinant()) < 1e-8) {
          throw RegularityError("section patch: spatial jet block is near-singular");
        }
        d.F[d.at(i, j, k)] = F;
      }
  return d;
}

// Divergence over spatial axes of a field g(point)[i], i = 0..2, at (i,j,k).
template <class G>
double spatial_divergence(const SliceData& d, int i, int j, int k, double h, const G& g) {
  return d4(g(d.at(i - 2, j, k), 0), g(d.at(i - 1, j, k), 0), g(d.at(i + 1, j, k), 0), g(d.at(i + 2, j, k), 0), h) +
         d4(g(d.at(i, j - 2, k), 1), g(d.at(i, j - 1, k), 1), g(d.at(i, j + 1, k), 1), g(d.at(i, j + 2, k), 1), h) +
         d4(g(d.at(i, j, k - 2), 2), g(d.at(i, j, k - 1), 2), g(d.at(i, j, k + 1), 2), g(d.at(i, j, k + 2), 2), h);
}

}  // namespace

double null_lagrangian_residual(const SectionPatch& s) {
  const int N = s.points;
  const double h = s.spacing;
  double worst = 0.0;
  // dphi/dv^a_0 = 0, so only the spatial divergence of the cofactor survives.
  for (int t = 4; t < N - 4; ++t) {
    const SliceData d = slice_jets(s, t);
    std::vector<Eigen::Matrix3d> cof(d.F.size(), Eigen::Matrix3d::Zero());
    for (int i = 2; i < N - 2; ++i)
      for (int j = 2; j < N - 2; ++j)
        for (int k = 2; k < N - 2; ++k) {
          const Eigen::Matrix3d& F = d.F[d.at(i, j, k)];
          cof[d.at(i, j, k)] = F.determinant() * F.inverse().transpose();  // cof(a, i)
        }
    for (int i = 4; i < N - 4; ++i)
      for (int j = 4; j < N - 4; ++j)
        for (int k = 4; k < N - 4; ++k)
          for (int a = 0; a < 3; ++a) {
            const double div = spatial_divergence(d, i, j, k, h, [&](int q, int ax) { return cof[q](a, ax); });
            worst = std::max(worst, std::abs(div));
          }
  }
  return worst;
}

double psi_divergence_residual(const SectionPatch& s) {
  const int N = s.points;
  const double h = s.spacing;
  double worst = 0.0;
  for (int t = 4; t < N - 4; ++t) {
    const SliceData d = slice_jets(s, t);
    // psi^i = (J y^a (v^-1)^i_a - x^i) / 3; psi^0 = 0.
    std::vector<Eigen::Vector3d> psi(d.F.size(), Eigen::Vector3d::Zero());
    for (int i = 2; i < N - 2; ++i)
      for (int j = 2; j < N - 2; ++j)
        for (int k = 2; k < N - 2; ++k) {
          const Eigen::Matrix3d& F = d.F[d.at(i, j, k)];
          const Eigen::Vector3d y = s.y.row(s.index(t, i, j, k)).transpose();
          const Eigen::Vector3d x(s.origin[1] + i * h, s.origin[2] + j * h, s.origin[3] + k * h);
          psi[d.at(i, j, k)] = (F.determinant() * (F.inverse() * y) - x) / 3.0;
        }
    for (int i = 4; i < N - 4; ++i)
      for (int j = 4; j < N - 4; ++j)
        for (int k = 4; k < N - 4; ++k) {
          const double phi = d.F[d.at(i, j, k)].determinant() - 1.0;
          const double div = spatial_divergence(d, i, j, k, h, [&](int q, int ax) { return psi[q][ax]; });
          worst = std::max(worst, std::abs(phi - div));
        }
  }
  return worst;
}

}  // namespace nhfields
