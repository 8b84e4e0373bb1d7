#include "nhfields/scenario.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

#include <json.hpp>

#include "nhfields/errors.hpp"
#include "nhfields/fluid.hpp"
#include "nhfields/report_json.hpp"

namespace nhfields {

using json = nlohmann::json;

namespace {

void reject_unknown(const json& obj, const std::string& where, const std::set<std::string>& allowed) {
  if (!obj.is_object()) throw ConfigError(where + " must be an object");
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    if (!allowed.count(it.key())) throw ConfigError(where + ": unknown key '" + it.key() + "'");
  }
}

template <class T>
void read(const json& obj, const char* key, T& out) {
  if (!obj.contains(key)) return;
  try {
    out = obj.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError(std::string("bad value for '") + key + "'");
  }
}

ParamMap read_params(const json& obj, const std::string& where) {
  ParamMap out;
  if (!obj.contains("params")) return out;
  const json& p = obj.at("params");
  if (!p.is_object()) throw ConfigError(where + ".params must be an object");
  for (auto it = p.begin(); it != p.end(); ++it) {
    if (!it.value().is_number()) throw ConfigError(where + ".params." + it.key() + " must be a number");
    out[it.key()] = it.value().get<double>();
  }
  return out;
}

void read_tolerances(const json& t, Tolerances& tol) {
  reject_unknown(t, "tolerances",
                 {"on_constraint", "regularity_det", "regularity_cond", "compatibility", "zeta_form",
                  "projector", "free_ddw_form", "nh_ddw_form", "tangency", "multiplier_match",
                  "eta", "drift", "energy_drift", "null_lagrangian", "convergence_order", "psi"});
  read(t, "on_constraint", tol.on_constraint);
  read(t, "regularity_det", tol.regularity_det);
  read(t, "regularity_cond", tol.regularity_cond);
  read(t, "compatibility", tol.compatibility);
  read(t, "zeta_form", tol.zeta_form);
  read(t, "projector", tol.projector);
  read(t, "free_ddw_form", tol.free_ddw_form);
  read(t, "nh_ddw_form", tol.nh_ddw_form);
  read(t, "tangency", tol.tangency);
  read(t, "multiplier_match", tol.multiplier_match);
  read(t, "eta", tol.eta);
  read(t, "drift", tol.drift);
  read(t, "energy_drift", tol.energy_drift);
  read(t, "null_lagrangian", tol.null_lagrangian);
  read(t, "convergence_order", tol.convergence_order);
  read(t, "psi", tol.psi);
}

}  // namespace

ScenarioConfig parse_scenario(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  reject_unknown(j, "config",
                 {"task", "seed", "model", "constraint", "points", "tuples", "tolerances", "grid", "dt",
                  "steps", "integrator", "mode", "stabilize", "derivatives", "record_every", "initial",
                  "fluid", "output_dir"});
  ScenarioConfig c;
  read(j, "task", c.task);
  read(j, "seed", c.seed);
  read(j, "points", c.points);
  read(j, "tuples", c.tuples);
  read(j, "dt", c.dt);
  read(j, "steps", c.steps);
  read(j, "stabilize", c.stabilize);
  read(j, "record_every", c.record_every);
  read(j, "output_dir", c.output_dir);

  if (!j.contains("model") && c.task != "fluid-identities") throw ConfigError("config: missing 'model'");
  if (j.contains("model")) {
    const json& m = j.at("model");
    reject_unknown(m, "model", {"name", "params"});
    read(m, "name", c.model);
    c.model_params = read_params(m, "model");
  }
  if (j.contains("constraint") && !j.at("constraint").is_null()) {
    const json& k = j.at("constraint");
    reject_unknown(k, "constraint", {"name", "mode", "params", "custom_csv"});
    std::string name;
    read(k, "name", name);
    c.constraint = name;
    read(k, "mode", c.constraint_mode);
    read(k, "custom_csv", c.custom_csv);
    c.constraint_params = read_params(k, "constraint");
  }
  if (j.contains("tolerances")) read_tolerances(j.at("tolerances"), c.tolerances);
  if (j.contains("grid")) {
    reject_unknown(j.at("grid"), "grid", {"nu"});
    read(j.at("grid"), "nu", c.nu);
  }
  std::string s;
  if (j.contains("integrator")) {
    read(j, "integrator", s);
    if (s == "rk4") c.integrator = Integrator::RK4;
    else if (s == "euler") c.integrator = Integrator::Euler;
    else throw ConfigError("integrator must be rk4 or euler");
  }
  if (j.contains("mode")) {
    read(j, "mode", s);
    if (s == "pde") c.mode = StateMode::PDE;
    else if (s == "full-jet") c.mode = StateMode::FullJet;
    else throw ConfigError("mode must be pde or full-jet");
  }
  if (j.contains("derivatives")) {
    read(j, "derivatives", s);
    if (s == "central4") c.derivatives = DerivativeScheme::Central4;
    else if (s == "spectral") c.derivatives = DerivativeScheme::Spectral;
    else throw ConfigError("derivatives must be central4 or spectral");
  }
  if (j.contains("initial")) {
    const json& i = j.at("initial");
    reject_unknown(i, "initial", {"profile", "amplitude", "wavenumber"});
    read(i, "profile", c.initial.profile);
    read(i, "amplitude", c.initial.amplitude);
    read(i, "wavenumber", c.initial.wavenumber);
  }
  if (j.contains("fluid")) {
    const json& f = j.at("fluid");
    reject_unknown(f, "fluid", {"grids", "extent", "epsilon", "psi_grid"});
    read(f, "grids", c.fluid.grids);
    read(f, "extent", c.fluid.extent);
    read(f, "epsilon", c.fluid.epsilon);
    read(f, "psi_grid", c.fluid.psi_grid);
  }

  if (c.task != "verify" && c.task != "evolve" && c.task != "fluid-identities") {
    throw ConfigError("unknown task '" + c.task + "'");
  }
  if (c.constraint_mode != "chetaev" && c.constraint_mode != "custom") {
    throw ConfigError("constraint mode must be chetaev or custom");
  }
  if (c.constraint_mode == "custom" && c.custom_csv.empty()) {
    throw ConfigError("custom constraint mode needs custom_csv");
  }
  if (c.points < 1 || c.tuples < 1) throw ConfigError("points and tuples must be positive");
  if (c.nu < 5) throw ConfigError("grid.nu must be at least 5");
  if (!(c.dt > 0.0) || c.steps < 0 || c.record_every < 1) throw ConfigError("bad dt/steps/record_every");
  if (c.fluid.grids.empty()) throw ConfigError("fluid.grids must not be empty");
  for (int g : c.fluid.grids) {
    if (g < 9) throw ConfigError("fluid grids need at least 9 points");
  }
  return c;
}

ScenarioConfig load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_scenario(ss.str());
}

namespace {

struct CheckTable {
  struct Entry {
    std::string name;
    double worst = 0.0;
    double tolerance = 0.0;
    bool upper = true;  // pass iff worst <= tolerance (else worst >= tolerance)
    bool pass = true;
    std::string note;
  };
  std::vector<Entry> entries;
  std::string first_failure;

  Entry& get(const std::string& name, double tol, bool upper) {
    for (auto& e : entries) {
      if (e.name == name) return e;
    }
    entries.push_back(Entry{name, upper ? 0.0 : INFINITY, tol, upper, true, {}});
    return entries.back();
  }

  // Records one measurement; returns whether it passed.
  bool record(const std::string& name, double value, double tol, bool upper = true) {
    Entry& e = get(name, tol, upper);
    const bool ok = std::isfinite(value) && (upper ? value <= tol : value >= tol);
    if (upper) e.worst = std::isfinite(value) ? std::max(e.worst, value) : INFINITY;
    else e.worst = std::min(e.worst, value);
    if (!ok) fail(name, "");
    return ok;
  }

  void fail(const std::string& name, const std::string& note) {
    Entry& e = get(name, 0.0, true);
    e.pass = false;
    if (e.note.empty()) e.note = note;
    if (first_failure.empty()) first_failure = name;
  }

  bool pass() const { return first_failure.empty(); }

  void write(JsonWriter& w) const {
    w.key("checks").begin_array();
    for (const auto& e : entries) {
      w.begin_object();
      w.field("name", e.name);
      w.field("worst", e.worst);
      w.field("tolerance", e.tolerance);
      w.field("pass", e.pass);
      if (!e.note.empty()) w.field("note", e.note);
      w.end_object();
    }
    w.end_array();
  }
};

void write_tolerances(JsonWriter& w, const Tolerances& t) {
  w.key("tolerances").begin_object();
  w.field("on_constraint", t.on_constraint);
  w.field("regularity_det", t.regularity_det);
  w.field("regularity_cond", t.regularity_cond);
  w.field("compatibility", t.compatibility);
  w.field("zeta_form", t.zeta_form);
  w.field("projector", t.projector);
  w.field("free_ddw_form", t.free_ddw_form);
  w.field("nh_ddw_form", t.nh_ddw_form);
  w.field("tangency", t.tangency);
  w.field("multiplier_match", t.multiplier_match);
  w.field("eta", t.eta);
  w.field("drift", t.drift);
  w.field("energy_drift", t.energy_drift);
  w.field("null_lagrangian", t.null_lagrangian);
  w.field("convergence_order", t.convergence_order);
  w.field("psi", t.psi);
  w.end_object();
}

void write_params(JsonWriter& w, const ParamMap& params) {
  w.key("params").begin_object();
  for (const auto& [k, v] : params) w.field(k, v);
  w.end_object();
}

void write_header(JsonWriter& w, const ScenarioConfig& c) {
  w.field("task", c.task);
  w.field("seed", c.seed);
  w.key("model").begin_object();
  w.field("name", c.model);
  write_params(w, c.model_params);
  w.end_object();
  w.key("constraint");
  if (c.constraint) {
    w.begin_object();
    w.field("name", *c.constraint);
    w.field("mode", c.constraint_mode);
    write_params(w, c.constraint_params);
    w.end_object();
  } else {
    w.null();
  }
  write_tolerances(w, c.tolerances);
}

std::optional<ConstraintSpec> build_constraint(const ScenarioConfig& c, const JetLayout& layout) {
  if (!c.constraint) return std::nullopt;
  ConstraintSpec spec = make_constraint(*c.constraint, layout, c.constraint_params);
  if (c.constraint_mode == "custom") spec = with_custom_csv(spec, c.custom_csv);
  return spec;
}

std::vector<int> v_indices(const JetLayout& l) {
  std::vector<int> idx;
  for (int a = 0; a < l.m; ++a)
    for (int mu = 0; mu <= l.n; ++mu) idx.push_back(l.v_index(a, mu));
  return idx;
}

double max_abs(const Eigen::MatrixXd& m) { return m.size() ? m.cwiseAbs().maxCoeff() : 0.0; }

// ---- verify ----------------------------------------------------------------

struct PointRecord {
  Eigen::VectorXd coords;
  std::vector<std::pair<std::string, double>> residuals;
  bool pass = true;
};

void verify_point(const LagrangianModel& model, const ConstraintSpec* spec, const ScenarioConfig& c,
                  std::mt19937_64& rng, int index, CheckTable& table, PointRecord& rec) {
  const Tolerances& tol = c.tolerances;
  const std::string at = "point " + std::to_string(index) + ": ";
  auto res = [&](const std::string& name, double value, double t, bool upper = true) {
    rec.residuals.emplace_back(name, value);
    if (!table.record(name, value, t, upper)) rec.pass = false;
  };
  auto failed = [&](const std::string& name, const std::string& msg) {
    rec.pass = false;
    table.fail(name, at + msg);
  };

  JetPoint p = sample_jet_point(model, rng);
  if (spec) {
    try {
      p = project_to_constraint(*spec, p, v_indices(model.layout()));
    } catch (const Error& e) {
      rec.coords = p.coords();
      failed("on_constraint", e.what());
      return;
    }
    res("on_constraint", max_abs(spec->values(p)), tol.on_constraint);
  }
  rec.coords = p.coords();

  const DerivativeBundle bundle = derivative_bundle(model, p);
  const Regularity reg = regularity_check(bundle, RegularityThresholds{tol.regularity_det, tol.regularity_cond});
  rec.residuals.emplace_back("hessian_det", reg.det);
  rec.residuals.emplace_back("hessian_cond", reg.cond);
  if (!reg.regular) {
    failed("regularity", "singular or ill-conditioned Hessian");
    return;
  }

  DdwSolution free;
  try {
    free = solve_free_ddw(bundle, p);
  } catch (const Error& e) {
    failed("free_ddw", e.what());
    return;
  }
  res("free_ddw_form", free_ddw_form_residual(p, bundle, free.coeffs, rng, c.tuples), tol.free_ddw_form);
  res("semiholonomic", semiholonomic_residual(free.coeffs, p), 0.0);

  if (!spec) return;

  const ConstraintLinearization lin = spec->linearize(p);
  try {
    constraint_rank_check(*spec, p, RankTolerances{tol.on_constraint, 1e-8});
  } catch (const Error& e) {
    failed("constraint_rank", e.what());
    return;
  }
  const Eigen::MatrixXd C = chetaev_coefficients(*spec, p, lin);
  ZetaBasis zb;
  try {
    zb = solve_zeta(bundle, C);
  } catch (const Error& e) {
    failed("regularity", e.what());
    return;
  }
  res("zeta_form", zeta_form_residual(p, bundle, zb, C, rng, c.tuples), tol.zeta_form);

  const Compatibility comp = compatibility_matrix(zb, lin.dphidv(), tol.compatibility);
  rec.residuals.emplace_back("compatibility_det", comp.det);
  if (!comp.compatible) {
    std::ostringstream msg;
    msg << "zeta(phi) is singular, det = " << format_double(comp.det);
    failed("compatibility", msg.str());
    return;
  }

  ProjectorPair pp;
  try {
    pp = build_projectors(zb, lin, tol.on_constraint, tol.projector);
  } catch (const Error& e) {
    failed("projector", e.what());
    return;
  }
  const ProjectorInvariants inv = projector_invariants(pp, zb, lin);
  res("projector", inv.max(), tol.projector);
  if (inv.q_rank != spec->count()) failed("projector", "rank of Q differs from k");

  const DdwSolution projected = project_connection(free, pp, zb, lin, p, &bundle, tol.on_constraint);
  const NhDdwResidual nh = nh_ddw_residual(model, *spec, projected, p, rng, c.tuples);
  res("nh_ddw_form", nh.form_residual, tol.nh_ddw_form);
  res("nh_tangency", nh.tangency_residual, tol.tangency);
  res("nh_ddw_rows", projected.residuals.ddw_rows, tol.nh_ddw_form);
  res("multiplier_match", nh.multiplier_mismatch(projected.multipliers), tol.multiplier_match);

  try {
    const DdwSolution direct = solve_constrained_ddw(model, *spec, p, std::nullopt, tol.on_constraint);
    res("constrained_ddw_rows", direct.residuals.ddw_rows, tol.nh_ddw_form);
    res("constrained_tangency", direct.residuals.tangency, tol.tangency);
  } catch (const Error& e) {
    failed("constrained_ddw", e.what());
  }
}

ScenarioResult run_verify(const ScenarioConfig& c, const LagrangianModel& model,
                          const std::optional<ConstraintSpec>& spec) {
  std::mt19937_64 rng(static_cast<std::uint64_t>(c.seed));
  CheckTable table;
  JsonWriter w;
  w.begin_object();
  write_header(w, c);
  w.key("points").begin_array();
  for (int i = 0; i < c.points; ++i) {
    PointRecord rec;
    verify_point(model, spec ? &*spec : nullptr, c, rng, i, table, rec);
    w.begin_object();
    w.field("index", i);
    w.key("point").begin_array();
    for (int j = 0; j < rec.coords.size(); ++j) w.value(rec.coords[j]);
    w.end_array();
    w.key("residuals").begin_object();
    for (const auto& [name, v] : rec.residuals) w.field(name, v);
    w.end_object();
    w.field("pass", rec.pass);
    w.end_object();
  }
  w.end_array();
  table.write(w);
  w.field("pass", table.pass());
  w.field("first_failure", table.first_failure);
  w.end_object();
  return ScenarioResult{table.pass() ? 0 : 1, table.first_failure, w.str()};
}

// ---- evolve ----------------------------------------------------------------

void write_trajectory_csv(const std::string& path, const EvolveResult& r) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write '" + path + "'");
  const JetLayout& l = r.trajectory.front().layout;
  out << "t,point";
  for (int i = 1; i <= l.n; ++i) out << ",u" << i;
  for (int a = 1; a <= l.m; ++a) out << ",y" << a;
  for (int a = 1; a <= l.m; ++a) out << ",v0_" << a;
  out << '\n';
  for (const CauchyState& s : r.trajectory) {
    for (int j = 0; j < s.points(); ++j) {
      out << format_double(s.t) << ',' << j;
      for (int i = 0; i < l.n; ++i) out << ',' << format_double(s.grid.coordinate(j, i));
      for (int a = 0; a < l.m; ++a) out << ',' << format_double(s.y(j, a));
      for (int a = 0; a < l.m; ++a) out << ',' << format_double(s.v0(j, a));
      out << '\n';
    }
  }
}

void write_diagnostics_csv(const std::string& path, const EvolveResult& r) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write '" + path + "'");
  out << "t,max_phi,holonomy,eta,energy\n";
  for (const auto& d : r.diagnostics) {
    out << format_double(d.t) << ',' << format_double(d.max_phi) << ',' << format_double(d.holonomy) << ','
        << format_double(d.eta) << ',' << format_double(d.energy) << '\n';
  }
}

ScenarioResult run_evolve(const ScenarioConfig& c, const LagrangianModel& model,
                          const std::optional<ConstraintSpec>& spec, EvolveResult& result) {
  const ConstraintSpec* sp = spec ? &*spec : nullptr;
  const Tolerances& tol = c.tolerances;
  CheckTable table;
  CauchyState s0 = make_initial_state(c, model, sp);

  EvolveOptions opt;
  opt.dt = c.dt;
  opt.steps = c.steps;
  opt.integrator = c.integrator;
  opt.scheme = c.derivatives;
  opt.stabilize = c.stabilize;
  opt.drift_ceiling = tol.drift;
  opt.record_every = c.record_every;

  std::string abort_note;
  try {
    result = evolve(model, sp, s0, opt);
  } catch (const DriftError& e) {
    table.fail("drift", e.what());
    abort_note = e.what();
  } catch (const InstabilityError& e) {
    table.fail("stability", e.what());
    abort_note = e.what();
  }

  JsonWriter w;
  w.begin_object();
  write_header(w, c);
  w.key("run").begin_object();
  w.field("nu", c.nu);
  w.field("dt", c.dt);
  w.field("steps", c.steps);
  w.field("integrator", c.integrator == Integrator::RK4 ? "rk4" : "euler");
  w.field("mode", c.mode == StateMode::PDE ? "pde" : "full-jet");
  w.field("derivatives", c.derivatives == DerivativeScheme::Central4 ? "central4" : "spectral");
  w.field("stabilize", c.stabilize);
  w.end_object();

  if (abort_note.empty() && !result.diagnostics.empty()) {
    double max_phi = 0.0, max_hol = 0.0, max_eta = 0.0;
    for (const auto& d : result.diagnostics) {
      max_phi = std::max(max_phi, d.max_phi);
      max_hol = std::max(max_hol, d.holonomy);
      max_eta = std::max(max_eta, std::abs(d.eta - 1.0));
    }
    const double e0 = result.diagnostics.front().energy;
    const double e1 = result.diagnostics.back().energy;
    const CauchyState& last = result.trajectory.back();
    w.key("summary").begin_object();
    w.field("final_t", last.t);
    w.field("max_phi", max_phi);
    w.field("max_holonomy", max_hol);
    w.field("eta_error", max_eta);
    w.field("initial_energy", e0);
    w.field("final_energy", e1);
    w.field("energy_drift", std::abs(e1 - e0));
    const bool dalembert = model.name() == "wave" && !sp && c.initial.profile == "sine" &&
                           model.layout().n == 1;
    if (dalembert) {
      const double speed = c.model_params.count("c") ? c.model_params.at("c") : 1.0;
      const double k2pi = 2.0 * std::numbers::pi * c.initial.wavenumber;
      double err = 0.0;
      for (int j = 0; j < last.points(); ++j)
        for (int a = 0; a < last.layout.m; ++a) {
          const double exact = c.initial.amplitude * std::sin(k2pi * last.grid.coordinate(j, 0)) *
                               std::cos(k2pi * speed * last.t);
          err = std::max(err, std::abs(last.y(j, a) - exact));
        }
      w.field("analytic_error", err);
    }
    w.end_object();
    table.record("eta", max_eta, tol.eta);
    if (sp) table.record("drift", max_phi, tol.drift);
    else table.record("energy_drift", std::abs(e1 - e0), tol.energy_drift);
  }
  table.write(w);
  w.field("pass", table.pass());
  w.field("first_failure", table.first_failure);
  w.end_object();
  return ScenarioResult{table.pass() ? 0 : 1, table.first_failure, w.str()};
}

// ---- fluid identities ------------------------------------------------------

ScenarioResult run_fluid_identities(const ScenarioConfig& c) {
  const Tolerances& tol = c.tolerances;
  const double eps = c.fluid.epsilon;
  const double two_pi = 2.0 * std::numbers::pi;
  const SectionFn perturbed = [eps, two_pi](const std::array<double, 4>& x) {
    Eigen::Vector3d y;
    for (int a = 0; a < 3; ++a) {
      const double s = x[1 + (a + 1) % 3] + 0.5 * x[1 + (a + 2) % 3] + 0.3 * x[0];
      y[a] = x[1 + a] + eps * std::sin(two_pi * s);
    }
    return y;
  };
  const std::array<double, 4> origin{0.1, 0.2, 0.3, 0.4};
  CheckTable table;
  JsonWriter w;
  w.begin_object();
  write_header(w, c);

  std::vector<double> res, spacing;
  w.key("null_lagrangian").begin_array();
  for (std::size_t g = 0; g < c.fluid.grids.size(); ++g) {
    const int N = c.fluid.grids[g];
    const SectionPatch patch = sample_patch(N, c.fluid.extent, origin, perturbed);
    res.push_back(null_lagrangian_residual(patch));
    spacing.push_back(patch.spacing);
    w.begin_object();
    w.field("grid", N);
    w.field("spacing", patch.spacing);
    w.field("residual", res.back());
    if (g > 0) {
      const double order = std::log(res[g - 1] / res[g]) / std::log(spacing[g - 1] / spacing[g]);
      w.field("observed_order", order);
      table.record("convergence_order", order, tol.convergence_order, false);
    } else {
      w.key("observed_order").null();
    }
    w.end_object();
  }
  w.end_array();
  table.record("null_lagrangian", res.front(), tol.null_lagrangian);

  const std::vector<std::pair<std::string, SectionFn>> sections{
      {"identity", [](const std::array<double, 4>& x) { return Eigen::Vector3d(x[1], x[2], x[3]); }},
      {"shear", [](const std::array<double, 4>& x) { return Eigen::Vector3d(x[1] + 0.5 * x[2], x[2], x[3]); }},
      {"stretch", [](const std::array<double, 4>& x) { return Eigen::Vector3d(2.0 * x[1], x[2], x[3]); }},
  };
  w.key("psi_divergence").begin_array();
  for (const auto& [name, fn] : sections) {
    const SectionPatch patch = sample_patch(c.fluid.psi_grid, c.fluid.extent, origin, fn);
    const double r = psi_divergence_residual(patch);
    w.begin_object();
    w.field("section", name);
    w.field("grid", c.fluid.psi_grid);
    w.field("residual", r);
    w.end_object();
    table.record("psi_" + name, r, tol.psi);
  }
  w.end_array();
  table.write(w);
  w.field("pass", table.pass());
  w.field("first_failure", table.first_failure);
  w.end_object();
  return ScenarioResult{table.pass() ? 0 : 1, table.first_failure, w.str()};
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write '" + path.string() + "'");
  out << text;
}

}  // namespace

CauchyState make_initial_state(const ScenarioConfig& c, const LagrangianModel& model,
                               const ConstraintSpec* spec) {
  const JetLayout& l = model.layout();
  if (l.n < 1) throw ConfigError("evolve needs n >= 1");
  CauchyState s = CauchyState::zeros(l, c.nu, c.mode);
  const int P = s.points();
  const double A = c.initial.amplitude;
  const double k2pi = 2.0 * std::numbers::pi * c.initial.wavenumber;
  if (c.initial.profile == "sine") {
    for (int j = 0; j < P; ++j)
      for (int a = 0; a < l.m; ++a) s.y(j, a) = A * std::sin(k2pi * s.grid.coordinate(j, 0));
  } else if (c.initial.profile == "fluid-shear") {
    if (!(l == kFluidLayout)) throw ConfigError("fluid-shear profile needs n = 3, m = 3");
    s.jump = Eigen::MatrixXd::Identity(3, 3);
    for (int j = 0; j < P; ++j) {
      for (int a = 0; a < 3; ++a) s.y(j, a) = s.grid.coordinate(j, a);
      s.y(j, 0) += A * std::sin(k2pi * s.grid.coordinate(j, 1));
      for (int a = 0; a < 3; ++a) s.v0(j, a) = A * std::sin(k2pi * s.grid.coordinate(j, (a + 1) % 3));
    }
  } else if (c.initial.profile != "constant") {
    throw ConfigError("unknown initial profile '" + c.initial.profile + "'");
  }

  if (c.mode == StateMode::FullJet) {
    const PeriodicDifferentiator D(s.grid, c.derivatives);
    for (int a = 0; a < l.m; ++a)
      for (int i = 0; i < l.n; ++i) s.vi.col(a * l.n + i) = D.derivative(s.y.col(a), i, s.jump(a, i));
  }

  if (spec) {
    // Move the evolved v-variables of each point onto C.
    const StateGeometry g = state_geometry(s, c.derivatives);
    std::vector<int> free;
    for (int a = 0; a < l.m; ++a) {
      free.push_back(l.v_index(a, 0));
      if (c.mode == StateMode::FullJet)
        for (int i = 1; i <= l.n; ++i) free.push_back(l.v_index(a, i));
    }
    for (int j = 0; j < P; ++j) {
      if (max_abs(spec->values(g.jets[j])) <= 1e-14) continue;
      const JetPoint q = project_to_constraint(*spec, g.jets[j], free);
      for (int a = 0; a < l.m; ++a) {
        s.v0(j, a) = q.v(a, 0);
        if (c.mode == StateMode::FullJet)
          for (int i = 1; i <= l.n; ++i) s.vi(j, a * l.n + i - 1) = q.v(a, i);
      }
    }
  }
  return s;
}

ScenarioResult run_scenario(const ScenarioConfig& c, bool write_files) {
  ScenarioResult r;
  EvolveResult evolved;
  try {
    if (c.task == "fluid-identities") {
      r = run_fluid_identities(c);
    } else {
      const LagrangianModel model = make_model(c.model, c.model_params);
      const std::optional<ConstraintSpec> spec = build_constraint(c, model.layout());
      if (c.task == "verify") r = run_verify(c, model, spec);
      else r = run_evolve(c, model, spec, evolved);
    }
  } catch (const ConfigError& e) {
    return ScenarioResult{2, "", std::string("config error: ") + e.what()};
  }
  if (write_files) {
    std::error_code ec;
    std::filesystem::create_directories(c.output_dir, ec);
    if (ec) return ScenarioResult{2, "", "cannot create output directory '" + c.output_dir + "'"};
    const std::filesystem::path dir(c.output_dir);
    write_text(dir / "report.json", r.report_json);
    if (!evolved.trajectory.empty()) {
      write_trajectory_csv((dir / "traj_fields.csv").string(), evolved);
      write_diagnostics_csv((dir / "diag_steps.csv").string(), evolved);
    }
  }
  return r;
}

}  // namespace nhfields
