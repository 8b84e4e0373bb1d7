#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "nhfields/errors.hpp"
#include "nhfields/fluid.hpp"
#include "nhfields/registry.hpp"

using namespace nhfields;

namespace {

JetPoint with_spatial(const Eigen::Matrix3d& F) {
  JetPoint p(kFluidLayout);
  for (int a = 0; a < 3; ++a)
    for (int i = 0; i < 3; ++i) p.v(a, i + 1) = F(a, i);
  return p;
}

const std::array<double, 4> kOrigin{0.1, 0.2, 0.3, 0.4};

}  // namespace

TEST(FluidQuantities, Identity) {
  const FluidQuantities q = fluid_quantities(FluidParams{}, with_spatial(Eigen::Matrix3d::Identity()));
  EXPECT_DOUBLE_EQ(q.J, 1.0);
  EXPECT_NEAR((q.vinv - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff(), 0.0, 1e-15);
  EXPECT_NEAR((q.C - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff(), 0.0, 1e-15);
  EXPECT_LT(q.zeta_mismatch, 1e-9);
}

TEST(FluidQuantities, DiagonalStretch) {
  const Eigen::Matrix3d F = Eigen::Vector3d(2.0, 1.0, 0.5).asDiagonal();
  const FluidQuantities q = fluid_quantities(FluidParams{}, with_spatial(F));
  EXPECT_DOUBLE_EQ(q.J, 1.0);
  const Eigen::Matrix3d ref = Eigen::Vector3d(0.5, 1.0, 2.0).asDiagonal();
  EXPECT_NEAR((q.C - ref).cwiseAbs().maxCoeff(), 0.0, 1e-15);
}

TEST(FluidQuantities, GenericMatchesClosedForm) {
  std::mt19937_64 rng(1);
  for (const FluidParams fp : {FluidParams{}, FluidParams{2.0, 3.0, 0.5, 0.1}}) {
    const LagrangianModel model = fluid_model(fp);
    for (int trial = 0; trial < 30; ++trial) {
      const JetPoint p = sample_jet_point(model, rng);
      const FluidQuantities q = fluid_quantities(fp, p);
      EXPECT_NE(q.f, 0.0);
      EXPECT_LT(q.zeta_mismatch, 1e-9);
      EXPECT_LT(q.f_mismatch, 1e-9);
      EXPECT_LT(q.P_mismatch, 1e-9);
      EXPECT_NEAR((q.P * q.P - q.P).cwiseAbs().maxCoeff(), 0.0, 1e-9);
      EXPECT_NEAR(q.closed_form_scale, -1.0 / fp.rho, 1e-15);
    }
  }
}

TEST(FluidQuantities, SingularBlockThrows) {
  Eigen::Matrix3d F = Eigen::Matrix3d::Identity();
  F(2, 2) = 0.0;
  EXPECT_THROW(fluid_quantities(FluidParams{}, with_spatial(F)), RegularityError);
}

TEST(FluidParams, Validation) {
  EXPECT_THROW((FluidParams{0.0, 1.0, 1.0, 0.0}).validate(), InvalidArgument);
  EXPECT_THROW((FluidParams{1.0, -1.0, 1.0, 0.0}).validate(), InvalidArgument);
  EXPECT_THROW((FluidParams{1.0, 1.0, 1.0, -0.1}).validate(), InvalidArgument);
}

TEST(NullLagrangian, LinearSectionIsExact) {
  const Eigen::Matrix3d A = (Eigen::Matrix3d() << 2, 1, 0, 0.5, 1, 0.3, 0, 0.2, 1.5).finished();
  const Eigen::Vector3d b(0.1, -0.2, 0.3);
  const SectionPatch patch = sample_patch(12, 0.25, kOrigin, [&](const std::array<double, 4>& x) {
    return Eigen::Vector3d(A * Eigen::Vector3d(x[1], x[2], x[3]) + b);
  });
  EXPECT_LT(null_lagrangian_residual(patch), 1e-10);
}

TEST(NullLagrangian, FourthOrderConvergence) {
  const double eps = 0.1, two_pi = 2.0 * std::numbers::pi;
  const SectionFn section = [&](const std::array<double, 4>& x) {
    Eigen::Vector3d y;
    for (int a = 0; a < 3; ++a) {
      const double s = x[1 + (a + 1) % 3] + 0.5 * x[1 + (a + 2) % 3] + 0.3 * x[0];
      y[a] = x[1 + a] + eps * std::sin(two_pi * s);
    }
    return y;
  };
  const SectionPatch coarse = sample_patch(16, 0.25, kOrigin, section);
  const SectionPatch fine = sample_patch(32, 0.25, kOrigin, section);
  const double rc = null_lagrangian_residual(coarse);
  const double rf = null_lagrangian_residual(fine);
  EXPECT_LT(rc, 1e-4);
  const double order = std::log(rc / rf) / std::log(coarse.spacing / fine.spacing);
  EXPECT_GT(order, 3.5);
  EXPECT_LT(order, 4.5);
}

TEST(NullLagrangian, CubicSectionMatchesRichardson) {
  // Fourth-order stencils are exact on cubics: residual is roundoff.
  const SectionPatch patch = sample_patch(10, 0.5, kOrigin, [](const std::array<double, 4>& x) {
    return Eigen::Vector3d(x[1] + 0.2 * x[2] * x[2] * x[3], x[2] + 0.1 * x[3] * x[3] * x[3],
                           x[3] + 0.3 * x[1] * x[2] * x[0]);
  });
  EXPECT_LT(null_lagrangian_residual(patch), 1e-10);
}

TEST(PsiDivergence, ListedSections) {
  auto patch = [](SectionFn f) { return sample_patch(16, 0.25, kOrigin, f); };
  EXPECT_LT(psi_divergence_residual(patch([](const std::array<double, 4>& x) {
              return Eigen::Vector3d(x[1], x[2], x[3]);
            })),
            1e-10);
  EXPECT_LT(psi_divergence_residual(patch([](const std::array<double, 4>& x) {
              return Eigen::Vector3d(x[1] + 0.7 * x[2], x[2], x[3]);
            })),
            1e-6);
  EXPECT_LT(psi_divergence_residual(patch([](const std::array<double, 4>& x) {
              return Eigen::Vector3d(2.0 * x[1], x[2], x[3]);
            })),
            1e-6);
}

TEST(PsiDivergence, NonlinearSection) {
  const SectionPatch p = sample_patch(24, 0.25, kOrigin, [](const std::array<double, 4>& x) {
    return Eigen::Vector3d(x[1] + 0.1 * std::sin(3.0 * x[2]), x[2] * (1.0 + 0.2 * x[3]), x[3] + 0.1 * x[0] * x[1]);
  });
  EXPECT_LT(psi_divergence_residual(p), 1e-6);
}

TEST(Patch, TooFewPointsRejected) {
  EXPECT_THROW(sample_patch(8, 0.25, kOrigin, [](const std::array<double, 4>& x) {
                 return Eigen::Vector3d(x[1], x[2], x[3]);
               }),
               InvalidArgument);
}
