// Runs every acceptance criterion at its pinned tolerance and prints one
// PASS/FAIL line per criterion. Exit status is the number of failures.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "nhfields/cauchy.hpp"
#include "nhfields/ddw.hpp"
#include "nhfields/errors.hpp"
#include "nhfields/exterior.hpp"
#include "nhfields/fluid.hpp"
#include "nhfields/models.hpp"
#include "nhfields/projector.hpp"
#include "nhfields/registry.hpp"
#include "nhfields/scenario.hpp"

using namespace nhfields;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%s", ok ? "" : " [x]");
    if (!detail.empty()) detail += "; ";
    detail += what + buf;
    pass = pass && ok;
  }
  void below(const std::string& name, double value, double tol) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "%s %.3g < %.0e", name.c_str(), value, tol);
    require(std::isfinite(value) && value < tol, buf);
  }
};

Eigen::VectorXd random_vec(int n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Eigen::VectorXd v(n);
  for (int i = 0; i < n; ++i) v[i] = u(rng);
  return v;
}

std::vector<TangentVector> random_tuple(const JetLayout& l, int k, std::mt19937_64& rng) {
  std::vector<TangentVector> out;
  for (int i = 0; i < k; ++i) out.emplace_back(l, random_vec(l.dim(), rng));
  return out;
}

struct Scenario {
  std::string label;
  LagrangianModel model;
  ConstraintSpec spec;
};

std::vector<Scenario> constrained_scenarios() {
  const JetLayout w{1, 1};
  const LagrangianModel q = quadratic_model(JetLayout{2, 2}, 0.5);
  return {
      {"wave+transport", wave_model(w), make_constraint("linear-transport", w, {{"c", 2.0}})},
      {"fluid", fluid_model(), incompressibility_constraint()},
      {"quadratic+velocity-law", q, make_constraint("velocity-law", q.layout())},
  };
}

JetPoint on_constraint_point(const Scenario& s, std::mt19937_64& rng) {
  std::vector<int> free;
  const JetLayout& l = s.model.layout();
  for (int a = 0; a < l.m; ++a)
    for (int mu = 0; mu <= l.n; ++mu) free.push_back(l.v_index(a, mu));
  return project_to_constraint(s.spec, sample_jet_point(s.model, rng), free);
}

// ---------------------------------------------------------------------------

Outcome exterior_identities() {
  Outcome o;
  const JetLayout l{2, 1};
  std::mt19937_64 rng(101);
  double anti = 0.0, lin = 0.0, con = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    Form T(l.dim(), 3);
    for (int t = 0; t < 2; ++t) {
      std::vector<Covector> fac;
      for (int i = 0; i < 3; ++i) fac.push_back(Covector::dense(random_vec(l.dim(), rng)));
      T += Form::monomial(l.dim(), 1.0, fac);
    }
    const auto u = random_tuple(l, 4, rng);
    const std::vector<TangentVector> abc{u[0], u[1], u[2]}, bac{u[1], u[0], u[2]}, acb{u[0], u[2], u[1]};
    const double base = T.eval(abc);
    anti = std::max({anti, std::abs(T.eval(bac) + base), std::abs(T.eval(acb) + base)});
    const std::vector<TangentVector> mix{TangentVector(l, 0.3 * u[0].components() - 1.7 * u[3].components()), u[1], u[2]};
    const std::vector<TangentVector> dbc{u[3], u[1], u[2]};
    lin = std::max(lin, std::abs(T.eval(mix) - 0.3 * base + 1.7 * T.eval(dbc)));
    const std::vector<TangentVector> bc{u[1], u[2]};
    con = std::max(con, std::abs(contract_form(T, u[0]).eval(bc) - base));
  }
  o.below("antisymmetry", anti, 1e-12);
  o.below("multilinearity", lin, 1e-12);
  o.below("contraction", con, 1e-12);
  return o;
}

Outcome zeta_forms() {
  Outcome o;
  std::mt19937_64 rng(102);
  for (const Scenario& s : constrained_scenarios()) {
    if (s.label == "quadratic+velocity-law") continue;
    double worst = 0.0;
    for (int i = 0; i < 20; ++i) {
      const JetPoint p = on_constraint_point(s, rng);
      const DerivativeBundle b = derivative_bundle(s.model, p);
      const Eigen::MatrixXd C = chetaev_coefficients(s.spec, p);
      worst = std::max(worst, zeta_form_residual(p, b, solve_zeta(b, C), C, rng, 50));
    }
    o.below(s.label, worst, 1e-9);
  }
  return o;
}

Outcome compatibility_classification() {
  Outcome o;
  const JetLayout l{1, 1};
  int correct = 0, total = 0;
  for (double k : {0.0, 0.5, -0.5, 1.0, -1.0, 2.0, -2.0}) {
    JetPoint p(l);
    p.v(0, 1) = 0.37;
    p.v(0, 0) = k * p.v(0, 1);
    const ConstraintSpec spec = make_constraint("linear-transport", l, {{"c", k}});
    const DerivativeBundle b = derivative_bundle(wave_model(l), p);
    const ConstraintLinearization lin = spec.linearize(p);
    const Compatibility c = compatibility_matrix(solve_zeta(b, chetaev_coefficients(spec, p, lin)), lin.dphidv());
    correct += (c.compatible == (std::abs(k) != 1.0)) && std::abs(c.mmat(0, 0) - (1 - k * k)) < 1e-15;
    ++total;
  }
  o.require(correct == total, std::to_string(correct) + "/" + std::to_string(total) + " k values classified");
  return o;
}

Outcome projector_invariants_suite() {
  Outcome o;
  std::mt19937_64 rng(104);
  for (const Scenario& s : constrained_scenarios()) {
    double worst = 0.0;
    bool rank_ok = true;
    for (int i = 0; i < 100; ++i) {
      const JetPoint p = on_constraint_point(s, rng);
      const DerivativeBundle b = derivative_bundle(s.model, p);
      const ConstraintLinearization lin = s.spec.linearize(p);
      const ZetaBasis zb = solve_zeta(b, chetaev_coefficients(s.spec, p, lin));
      const ProjectorInvariants inv = projector_invariants(build_projectors(zb, lin), zb, lin);
      worst = std::max(worst, inv.max());
      rank_ok = rank_ok && inv.q_rank == s.spec.count();
    }
    o.below(s.label, worst, 1e-9);
    o.require(rank_ok, "rank Q = k");
  }
  return o;
}

Outcome free_ddw() {
  Outcome o;
  std::mt19937_64 rng(105);
  const std::vector<LagrangianModel> models{wave_model(JetLayout{1, 1}), wave_model(JetLayout{2, 2}),
                                            quadratic_model(JetLayout{2, 2}, 0.5), fluid_model()};
  double worst = 0.0, semi = 0.0;
  for (const auto& model : models) {
    for (int i = 0; i < 20; ++i) {
      const JetPoint p = sample_jet_point(model, rng);
      const DerivativeBundle b = derivative_bundle(model, p);
      const DdwSolution sol = solve_free_ddw(b, p);
      worst = std::max(worst, free_ddw_form_residual(p, b, sol.coeffs, rng, 50));
      semi = std::max(semi, semiholonomic_residual(sol.coeffs, p));
    }
  }
  o.below("form", worst, 1e-9);
  o.require(semi == 0.0, "semiholonomic exact");
  return o;
}

Outcome nonholonomic_ddw() {
  Outcome o;
  std::mt19937_64 rng(106);
  for (const Scenario& s : constrained_scenarios()) {
    double form = 0.0, tan = 0.0, lam = 0.0, direct = 0.0;
    for (int i = 0; i < 100; ++i) {
      const JetPoint p = on_constraint_point(s, rng);
      const DerivativeBundle b = derivative_bundle(s.model, p);
      const ConstraintLinearization lin = s.spec.linearize(p);
      const ZetaBasis zb = solve_zeta(b, chetaev_coefficients(s.spec, p, lin));
      const ProjectorPair pp = build_projectors(zb, lin);
      const DdwSolution proj = project_connection(solve_free_ddw(b, p), pp, zb, lin, p, &b);
      const NhDdwResidual r = nh_ddw_residual(s.model, s.spec, proj, p, rng, 50);
      form = std::max(form, r.form_residual);
      tan = std::max(tan, r.tangency_residual);
      lam = std::max(lam, r.multiplier_mismatch(proj.multipliers));
      const DdwSolution d = solve_constrained_ddw(s.model, s.spec, p);
      const NhDdwResidual rd = nh_ddw_residual(s.model, s.spec, d, p, rng, 20);
      direct = std::max({direct, d.residuals.ddw_rows, proj.residuals.ddw_rows, rd.form_residual});
      tan = std::max(tan, d.residuals.tangency);
    }
    o.below(s.label + " form", form, 1e-8);
    o.below("tangency", tan, 1e-10);
    o.below("lambda", lam, 1e-8);
    o.below("direct", direct, 1e-8);
  }
  return o;
}

Outcome field_equations() {
  Outcome o;
  const JetLayout l{1, 1};
  Jet2Point q(l);
  const double t = 0.25, x = -0.6, s = x + 2.0 * t;
  q.jet.x(0) = t;
  q.jet.x(1) = x;
  q.jet.y(0) = s * s;
  q.jet.v(0, 0) = 4.0 * s;
  q.jet.v(0, 1) = 2.0 * s;
  q.w(0, 0, 0) = 8.0;
  q.w(0, 1, 1) = 2.0;
  q.w(0, 0, 1) = q.w(0, 1, 0) = 4.0;
  const NhFieldResidual r =
      nh_field_residual(wave_model(l), make_constraint("linear-transport", l, {{"c", 2.0}}), q);
  o.below("|lambda - (6/5,-12/5)|",
          std::max(std::abs(r.lam_fit(0, 0) - 1.2), std::abs(r.lam_fit(0, 1) + 2.4)), 1e-9);
  o.below("residual", r.residual.cwiseAbs().maxCoeff(), 1e-9);
  o.below("phi", r.constraint_vals.cwiseAbs().maxCoeff(), 1e-9);
  return o;
}

CauchyState sine_state(int nu, StateMode mode, double amp, DerivativeScheme scheme) {
  CauchyState s = CauchyState::zeros(JetLayout{1, 1}, nu, mode);
  for (int j = 0; j < s.points(); ++j) s.y(j, 0) = amp * std::sin(kTwoPi * s.grid.coordinate(j, 0));
  if (mode == StateMode::FullJet) s.vi.col(0) = PeriodicDifferentiator(s.grid, scheme).derivative(s.y.col(0), 0);
  return s;
}

Outcome cauchy_free() {
  Outcome o;
  const LagrangianModel wave = wave_model(JetLayout{1, 1});
  const CauchyState s0 = sine_state(64, StateMode::PDE, 1.0, DerivativeScheme::Central4);
  EvolveOptions opt;
  opt.dt = 1e-3;
  opt.steps = 1000;
  opt.record_every = 1000;
  const EvolveResult r = evolve(wave, nullptr, s0, opt);
  const CauchyState& last = r.trajectory.back();
  double err = 0.0, eta = 0.0;
  for (int j = 0; j < last.points(); ++j) {
    const double u = last.grid.coordinate(j, 0);
    const double exact = 0.5 * (std::sin(kTwoPi * (u - last.t)) + std::sin(kTwoPi * (u + last.t)));
    err = std::max(err, std::abs(last.y(j, 0) - exact));
  }
  for (const auto& d : r.diagnostics) eta = std::max(eta, std::abs(d.eta - 1.0));
  std::mt19937_64 rng(108);
  const CauchyIdentityReport id = cauchy_identity_check(wave, nullptr, s0, rng, 20);
  o.below("|eta-1|", std::max(eta, id.eta_error), 1e-12);
  o.below("d'Alembert", err, 1e-5);
  o.below("energy drift", std::abs(r.diagnostics.back().energy - r.diagnostics.front().energy), 1e-8);
  o.below("i_Gamma Omega", id.free_kernel, 1e-8);
  return o;
}

double max_drift(const LagrangianModel& model, const ConstraintSpec& spec, const CauchyState& s0, double dt) {
  EvolveOptions opt;
  opt.dt = dt;
  opt.steps = static_cast<int>(std::lround(1.0 / dt));
  opt.drift_ceiling = 1.0;
  opt.record_every = opt.steps;
  const EvolveResult r = evolve(model, &spec, s0, opt);
  double d = 0.0;
  for (const auto& g : r.diagnostics) d = std::max(d, g.max_phi);
  return d;
}

Outcome cauchy_constrained() {
  Outcome o;
  const JetLayout l{1, 1};
  const LagrangianModel wave = wave_model(l);

  const ConstraintSpec transport = make_constraint("linear-transport", l, {{"c", 2.0}});
  CauchyState t0 = sine_state(32, StateMode::FullJet, 0.3, DerivativeScheme::Central4);
  t0.v0.col(0) = 2.0 * t0.vi.col(0);
  o.below("transport drift", max_drift(wave, transport, t0, 0.01), 1e-12);

  const ConstraintSpec law = make_constraint("velocity-law", l, {{"q", 2.0}});
  CauchyState s0 = sine_state(32, StateMode::FullJet, 1.0, DerivativeScheme::Central4);
  for (int j = 0; j < s0.points(); ++j) s0.v0(j, 0) = 2.0 * std::sin(s0.y(j, 0));
  std::vector<double> drift;
  for (double dt : {0.04, 0.02, 0.01, 0.005}) drift.push_back(max_drift(wave, law, s0, dt));
  bool ratios_ok = true;
  std::string ratios;
  for (std::size_t i = 0; i + 1 < drift.size(); ++i) {
    const double r = drift[i] / drift[i + 1];
    ratios_ok = ratios_ok && r >= 12.0 && r <= 20.0;
    char buf[32];
    std::snprintf(buf, sizeof buf, "%s%.2f", i ? "," : "", r);
    ratios += buf;
  }
  o.require(ratios_ok, "velocity-law drift ratios " + ratios + " in [12,20]");

  std::mt19937_64 rng(109);
  SodeOptions opt;
  double ann = 0.0, fit = 0.0, coeff = 0.0;
  for (const double amp : {0.3, 1.0}) {
    CauchyState c = sine_state(32, StateMode::FullJet, amp, DerivativeScheme::Central4);
    for (int j = 0; j < c.points(); ++j) c.v0(j, 0) = 2.0 * std::sin(c.y(j, 0));
    const CauchyIdentityReport id = cauchy_identity_check(wave, &law, c, rng, 20, opt);
    ann = std::max(ann, id.annihilator);
    fit = std::max(fit, id.force_fit);
    coeff = std::max(coeff, id.force_coeff);
  }
  o.below("i_PGamma Omega on TC^ann(F)", ann, 1e-7);
  o.below("constraint-form fit", fit, 1e-7);
  o.below("coefficient = -lambda0", coeff, 1e-7);
  return o;
}

Outcome fluid() {
  Outcome o;
  std::mt19937_64 rng(110);
  const FluidParams fp;
  const LagrangianModel model = fluid_model(fp);
  double mis = 0.0;
  for (int i = 0; i < 100; ++i) {
    const FluidQuantities q = fluid_quantities(fp, sample_jet_point(model, rng));
    mis = std::max({mis, q.zeta_mismatch, q.f_mismatch, q.P_mismatch});
  }
  o.below("closed form", mis, 1e-9);

  ScenarioConfig c;
  c.task = "fluid-identities";
  const std::array<double, 4> origin{0.1, 0.2, 0.3, 0.4};
  const double eps = 0.1;
  const SectionFn section = [eps](const std::array<double, 4>& x) {
    Eigen::Vector3d y;
    for (int a = 0; a < 3; ++a) {
      const double s = x[1 + (a + 1) % 3] + 0.5 * x[1 + (a + 2) % 3] + 0.3 * x[0];
      y[a] = x[1 + a] + eps * std::sin(kTwoPi * s);
    }
    return y;
  };
  const SectionPatch coarse = sample_patch(16, 0.25, origin, section);
  const SectionPatch fine = sample_patch(32, 0.25, origin, section);
  const double rc = null_lagrangian_residual(coarse), rf = null_lagrangian_residual(fine);
  const double order = std::log(rc / rf) / std::log(coarse.spacing / fine.spacing);
  o.below("null-Lagrangian 16^4", rc, 1e-4);
  char buf[64];
  std::snprintf(buf, sizeof buf, "order %.2f in [3.5,4.5]", order);
  o.require(order >= 3.5 && order <= 4.5, buf);

  double psi = 0.0;
  for (const SectionFn& f : std::vector<SectionFn>{
           [](const std::array<double, 4>& x) { return Eigen::Vector3d(x[1], x[2], x[3]); },
           [](const std::array<double, 4>& x) { return Eigen::Vector3d(x[1] + 0.5 * x[2], x[2], x[3]); },
           [](const std::array<double, 4>& x) { return Eigen::Vector3d(2.0 * x[1], x[2], x[3]); }}) {
    psi = std::max(psi, psi_divergence_residual(sample_patch(16, 0.25, origin, f)));
  }
  o.below("psi divergence", psi, 1e-6);

  ScenarioConfig smoke;
  smoke.task = "evolve";
  smoke.model = "fluid";
  smoke.constraint = "incompressibility";
  smoke.mode = StateMode::FullJet;
  smoke.nu = 8;
  smoke.initial.profile = "fluid-shear";
  smoke.initial.amplitude = 0.05;
  const ConstraintSpec spec = incompressibility_constraint();
  const CauchyState s0 = make_initial_state(smoke, model, &spec);
  EvolveOptions opt;
  opt.dt = 1e-3;
  opt.steps = 100;
  opt.record_every = 100;
  const EvolveResult r = evolve(model, &spec, s0, opt);
  double jdev = 0.0;
  for (const auto& d : r.diagnostics) jdev = std::max(jdev, d.max_phi);
  o.below("smoke |J-1|", jdev, 1e-5);
  return o;
}

Outcome determinism() {
  Outcome o;
  ScenarioConfig c = parse_scenario(R"({"task": "verify", "seed": 1, "points": 50, "tuples": 50,
      "model": {"name": "wave"}, "constraint": {"name": "linear-transport", "params": {"c": 2}}})");
  const ScenarioResult a = run_scenario(c, false);
  const ScenarioResult b = run_scenario(c, false);
  o.require(a.exit_code == 0, "verify exit 0");
  o.require(a.report_json == b.report_json, "byte-identical reports (" + std::to_string(a.report_json.size()) + " bytes)");
  c.model = "fluid";
  c.constraint = "incompressibility";
  c.constraint_params.clear();
  o.require(run_scenario(c, false).report_json == run_scenario(c, false).report_json, "fluid reports identical");
  return o;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"exterior algebra identities", exterior_identities},
      {"constraint force forms", zeta_forms},
      {"compatibility classification", compatibility_classification},
      {"projector invariants", projector_invariants_suite},
      {"free De Donder-Weyl", free_ddw},
      {"nonholonomic De Donder-Weyl", nonholonomic_ddw},
      {"nonholonomic field equations", field_equations},
      {"Cauchy layer, free evolution", cauchy_free},
      {"Cauchy layer, constrained evolution", cauchy_constrained},
      {"incompressible fluid", fluid},
      {"determinism", determinism},
  };
  int failures = 0;
  for (const auto& [name, fn] : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("%s  %-38s %s (%.1fs)\n", o.pass ? "PASS" : "FAIL", name.c_str(), o.detail.c_str(), secs);
    std::fflush(stdout);
    failures += !o.pass;
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures;
}
