#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "nhfields/errors.hpp"
#include "nhfields/jet.hpp"
#include "test_util.hpp"

using namespace nhfields;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Samples of y(t, u) on a 1D periodic grid at 5 time levels around t = 0.
template <class F>
SectionSamples samples_1d(int nu, F f, double dt = 1e-2) {
  SectionSamples s;
  s.layout = JetLayout{1, 1};
  s.nu = nu;
  for (int k = -2; k <= 2; ++k) {
    const double t = k * dt;
    Eigen::MatrixXd y(nu, 1);
    for (int j = 0; j < nu; ++j) y(j, 0) = f(t, double(j) / nu);
    s.times.push_back(t);
    s.values.push_back(y);
  }
  return s;
}

}  // namespace

TEST(Contact, VerticalVector) {
  const JetLayout l{1, 2};
  std::mt19937_64 rng(1);
  const JetPoint p = nhtest::random_point(l, rng);
  for (int a = 0; a < 2; ++a) {
    const Eigen::VectorXd th = contact_eval(p, TangentVector::basis(l, l.y_index(a)));
    for (int b = 0; b < 2; ++b) EXPECT_DOUBLE_EQ(th[b], a == b ? 1.0 : 0.0);
  }
}

TEST(Contact, VanishesOnJetDirection) {
  const JetLayout l{2, 2};
  std::mt19937_64 rng(2);
  const JetPoint p = nhtest::random_point(l, rng);
  for (int mu = 0; mu <= 2; ++mu) {
    TangentVector u(l);
    u.dx(mu) = 1.0;
    for (int a = 0; a < 2; ++a) u.dy(a) = p.v(a, mu);
    EXPECT_NEAR(contact_eval(p, u).cwiseAbs().maxCoeff(), 0.0, 1e-15);
  }
}

TEST(Contact, MatchesDirectFormula) {
  const JetLayout l{2, 3};
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 100; ++trial) {
    const JetPoint p = nhtest::random_point(l, rng);
    const TangentVector u = nhtest::random_tangent(l, rng);
    const Eigen::VectorXd th = contact_eval(p, u);
    for (int a = 0; a < 3; ++a) {
      double ref = u.dy(a);
      for (int mu = 0; mu <= 2; ++mu) ref -= p.v(a, mu) * u.dx(mu);
      EXPECT_NEAR(th[a], ref, 1e-14);
      EXPECT_NEAR(contact_covector(p, a).dot(u.components()), ref, 1e-14);
    }
  }
}

TEST(Semiholonomic, ExactAndPerturbed) {
  const JetLayout l{1, 2};
  std::mt19937_64 rng(4);
  const JetPoint p = nhtest::random_point(l, rng);
  ConnectionCoeffs c = ConnectionCoeffs::zero(l);
  for (int a = 0; a < 2; ++a)
    for (int mu = 0; mu <= 1; ++mu) c.gamma(a, mu) = p.v(a, mu);
  EXPECT_EQ(semiholonomic_residual(c, p), 0.0);
  c.gamma(1, 0) += 0.5;
  EXPECT_NEAR(semiholonomic_residual(c, p), 0.5, 1e-15);
}

TEST(Semiholonomic, EqualsContactOfLifts) {
  const JetLayout l{2, 2};
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    const JetPoint p = nhtest::random_point(l, rng);
    ConnectionCoeffs c = ConnectionCoeffs::zero(l);
    c.gamma = Eigen::MatrixXd::Random(2, 3);
    c.gamma2.flat() = nhtest::random_vec(c.gamma2.flat().size(), rng);
    double ref = 0.0;
    for (int mu = 0; mu <= 2; ++mu)
      ref = std::max(ref, contact_eval(p, c.horizontal_lift(l, mu)).cwiseAbs().maxCoeff());
    EXPECT_NEAR(semiholonomic_residual(c, p), ref, 1e-14);
  }
}

TEST(Prolong, ConstantSection) {
  const SectionSamples s = samples_1d(16, [](double, double) { return 3.0; });
  const ProlongedJet j = prolong_section(s, 2, 5);
  EXPECT_DOUBLE_EQ(j.point.jet.y(0), 3.0);
  EXPECT_NEAR(j.point.jet.v(0, 0), 0.0, 1e-12);
  EXPECT_NEAR(j.point.jet.v(0, 1), 0.0, 1e-12);
  EXPECT_NEAR(j.point.w.flat().cwiseAbs().maxCoeff(), 0.0, 1e-9);
}

TEST(Prolong, NonPeriodicRejected) {
  const SectionSamples s = samples_1d(64, [](double, double x) { return x; });
  EXPECT_THROW(prolong_section(s, 2, 0), InvalidArgument);
}

TEST(Prolong, QuasiPeriodicWithJumpAccepted) {
  SectionSamples s = samples_1d(32, [](double, double x) { return x; });
  s.jump = Eigen::MatrixXd::Ones(1, 1);
  const ProlongedJet j = prolong_section(s, 2, 0);
  EXPECT_NEAR(j.point.jet.v(0, 1), 1.0, 1e-12);
}

TEST(Prolong, SineSpatialDerivativeSpectral) {
  const int nu = 64;
  const SectionSamples s = samples_1d(nu, [](double, double x) { return std::sin(kTwoPi * x); });
  double err = 0.0;
  for (int j = 0; j < nu; ++j) {
    const ProlongedJet pj = prolong_section(s, 2, j, DerivativeScheme::Spectral);
    err = std::max(err, std::abs(pj.point.jet.v(0, 1) - kTwoPi * std::cos(kTwoPi * j / double(nu))));
  }
  EXPECT_LT(err, 1e-6);
}

TEST(Prolong, Central4IsFourthOrder) {
  double prev = 0.0;
  for (int nu : {16, 32, 64}) {
    const SectionSamples s = samples_1d(nu, [](double, double x) { return std::sin(kTwoPi * x); });
    double err = 0.0;
    for (int j = 0; j < nu; ++j) {
      const ProlongedJet pj = prolong_section(s, 2, j);
      err = std::max(err, std::abs(pj.point.jet.v(0, 1) - kTwoPi * std::cos(kTwoPi * j / double(nu))));
    }
    if (prev > 0.0) {
      EXPECT_NEAR(prev / err, 16.0, 1.5);
    }
    prev = err;
  }
}

TEST(Prolong, TimeAndMixedDerivatives) {
  // y = sin(2 pi (x - t)): v0 = -2pi cos, w00 = w11 = -w01 = -(2pi)^2 sin.
  const int nu = 64;
  const SectionSamples s = samples_1d(
      nu, [](double t, double x) { return std::sin(kTwoPi * (x - t)); }, 1e-3);
  const int j = 7;
  const double x = j / double(nu);
  const ProlongedJet pj = prolong_section(s, 2, j, DerivativeScheme::Spectral);
  const double k2 = kTwoPi * kTwoPi;
  EXPECT_NEAR(pj.point.jet.v(0, 0), -kTwoPi * std::cos(kTwoPi * x), 1e-6);
  EXPECT_NEAR(pj.point.w(0, 1, 1), -k2 * std::sin(kTwoPi * x), 1e-6);
  EXPECT_NEAR(pj.point.w(0, 0, 0), -k2 * std::sin(kTwoPi * x), 1e-4);
  EXPECT_NEAR(pj.point.w(0, 0, 1), k2 * std::sin(kTwoPi * x), 1e-4);
  EXPECT_EQ(pj.point.w(0, 0, 1), pj.point.w(0, 1, 0));
}

TEST(Prolong, AnalyticTimeSlices) {
  const int nu = 32;
  SectionSamples s;
  s.layout = JetLayout{1, 1};
  s.nu = nu;
  Eigen::MatrixXd y(nu, 1), yd(nu, 1), ydd(nu, 1);
  for (int j = 0; j < nu; ++j) {
    const double x = j / double(nu);
    y(j, 0) = std::sin(kTwoPi * x);
    yd(j, 0) = 0.5;
    ydd(j, 0) = 2.0;
  }
  s.times = {0.0};
  s.values = {y};
  s.ydot = {yd};
  s.yddot = {ydd};
  const ProlongedJet pj = prolong_section(s, 0, 3);
  EXPECT_DOUBLE_EQ(pj.point.jet.v(0, 0), 0.5);
  EXPECT_DOUBLE_EQ(pj.point.w(0, 0, 0), 2.0);
  EXPECT_NEAR(pj.point.w(0, 0, 1), 0.0, 1e-12);
}

TEST(SectionCsv, RoundTrip) {
  const SectionSamples s = samples_1d(8, [](double t, double x) { return t + std::sin(kTwoPi * x); });
  const std::string path = ::testing::TempDir() + "section_roundtrip.csv";
  write_section_csv(path, s);
  const SectionSamples r = read_section_csv(path);
  ASSERT_EQ(r.values.size(), s.values.size());
  EXPECT_EQ(r.nu, 8);
  for (std::size_t t = 0; t < s.values.size(); ++t) {
    EXPECT_DOUBLE_EQ(r.times[t], s.times[t]);
    EXPECT_EQ((r.values[t] - s.values[t]).cwiseAbs().maxCoeff(), 0.0);
  }
}
