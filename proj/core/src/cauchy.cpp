#include "nhfields/cauchy.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "nhfields/errors.hpp"

namespace nhfields {

CauchyState CauchyState::zeros(const JetLayout& layout, int nu, StateMode mode) {
  layout.validate();
  CauchyState s;
  s.layout = layout;
  s.grid = PeriodicGrid(layout.n, nu);
  s.mode = mode;
  const int P = s.grid.size();
  s.y = Eigen::MatrixXd::Zero(P, layout.m);
  s.v0 = Eigen::MatrixXd::Zero(P, layout.m);
  if (mode == StateMode::FullJet) s.vi = Eigen::MatrixXd::Zero(P, layout.m * layout.n);
  s.jump = Eigen::MatrixXd::Zero(layout.m, layout.n);
  return s;
}

namespace {

void check_state(const CauchyState& s) {
  const JetLayout& l = s.layout;
  const int P = s.grid.size();
  if (s.grid.dims() != l.n) throw InvalidArgument("state grid dimension must equal n");
  if (s.y.rows() != P || s.y.cols() != l.m || s.v0.rows() != P || s.v0.cols() != l.m) {
    throw InvalidArgument("state field shapes do not match the grid");
  }
  if (s.mode == StateMode::FullJet && (s.vi.rows() != P || s.vi.cols() != l.m * l.n)) {
    throw InvalidArgument("FullJet state needs vi of shape P x (m n)");
  }
  if (s.jump.rows() != l.m || s.jump.cols() != l.n) throw InvalidArgument("jump must be m x n");
}

void check_variation(const CauchyState& s, const StateVariation& W) {
  if (static_cast<int>(W.w.size()) != s.grid.size()) {
    throw InvalidArgument("variation size does not match the state grid");
  }
  for (const auto& t : W.w) {
    if (!(t.layout() == s.layout)) throw InvalidArgument("variation layout mismatch");
  }
}

}  // namespace

StateGeometry state_geometry(const CauchyState& s, DerivativeScheme scheme) {
  check_state(s);
  const JetLayout& l = s.layout;
  const int P = s.grid.size();
  const int n = l.n;
  const int m = l.m;
  const PeriodicDifferentiator D(s.grid, scheme);

  std::vector<Eigen::MatrixXd> dy(n, Eigen::MatrixXd(P, m));
  for (int i = 0; i < n; ++i)
    for (int a = 0; a < m; ++a) dy[i].col(a) = D.derivative(s.y.col(a), i, s.jump(a, i));

  // v(a, nu) as columns a*(n+1)+nu.
  Eigen::MatrixXd v(P, m * (n + 1));
  StateGeometry g;
  for (int a = 0; a < m; ++a) {
    v.col(a * (n + 1)) = s.v0.col(a);
    for (int i = 0; i < n; ++i) {
      if (s.mode == StateMode::FullJet) {
        v.col(a * (n + 1) + i + 1) = s.vi.col(a * n + i);
        g.holonomy_defect = std::max(g.holonomy_defect, (s.vi.col(a * n + i) - dy[i].col(a)).cwiseAbs().maxCoeff());
      } else {
        v.col(a * (n + 1) + i + 1) = dy[i].col(a);
      }
    }
  }
  std::vector<Eigen::MatrixXd> dv(n, Eigen::MatrixXd(P, m * (n + 1)));
  for (int i = 0; i < n; ++i)
    for (int c = 0; c < m * (n + 1); ++c) dv[i].col(c) = D.derivative(v.col(c), i, 0.0);

  g.jets.reserve(P);
  g.slice.resize(P);
  g.pins.reserve(P);
  for (int j = 0; j < P; ++j) {
    JetPoint p(l);
    p.x(0) = s.t;
    for (int i = 0; i < n; ++i) p.x(i + 1) = s.grid.coordinate(j, i);
    SpatialPin pin(m, n, n + 1);
    for (int a = 0; a < m; ++a) {
      p.y(a) = s.y(j, a);
      for (int nu = 0; nu <= n; ++nu) p.v(a, nu) = v(j, a * (n + 1) + nu);
    }
    for (int i = 0; i < n; ++i) {
      TangentVector K(l);
      K.dx(i + 1) = 1.0;
      for (int a = 0; a < m; ++a) {
        K.dy(a) = dy[i](j, a);
        for (int nu = 0; nu <= n; ++nu) {
          K.dv(a, nu) = dv[i](j, a * (n + 1) + nu);
          pin(a, i, nu) = dv[i](j, a * (n + 1) + nu);
        }
      }
      g.slice[j].push_back(std::move(K));
    }
    g.jets.push_back(std::move(p));
    g.pins.push_back(std::move(pin));
  }
  return g;
}

double tilde_eta_contract(const CauchyState& state, const StateVariation& W) {
  check_variation(state, W);
  double s = 0.0;
  for (const auto& t : W.w) s += t.dx(0);
  return s / state.grid.size();
}

CauchyForms::CauchyForms(const LagrangianModel& model, const CauchyState& state, DerivativeScheme scheme)
    : state_(&state), geom_(state_geometry(state, scheme)) {
  omega_.reserve(geom_.jets.size());
  for (const auto& p : geom_.jets) omega_.push_back(omega_form(p, derivative_bundle(model, p)));
}

double CauchyForms::eta(const StateVariation& W) const { return tilde_eta_contract(*state_, W); }

double CauchyForms::omega_density(int j, const TangentVector& W, const TangentVector& Wp) const {
  std::vector<TangentVector> vecs;
  vecs.reserve(geom_.slice[j].size() + 2);
  vecs.push_back(Wp);
  vecs.push_back(W);
  for (const auto& K : geom_.slice[j]) vecs.push_back(K);
  return omega_[j].eval(vecs);
}

double CauchyForms::omega(const StateVariation& W, const StateVariation& Wp) const {
  check_variation(*state_, W);
  check_variation(*state_, Wp);
  double s = 0.0;
  for (std::size_t j = 0; j < W.w.size(); ++j) s += omega_density(static_cast<int>(j), W.w[j], Wp.w[j]);
  return s / static_cast<double>(W.w.size());
}

double tilde_omega_contract(const LagrangianModel& model, const CauchyState& state,
                            const StateVariation& W, const StateVariation& Wp, DerivativeScheme scheme) {
  return CauchyForms(model, state, scheme).omega(W, Wp);
}

SodeDetails sode_details(const LagrangianModel& model, const ConstraintSpec* spec,
                         const CauchyState& state, const SodeOptions& opt) {
  if (!(model.layout() == state.layout)) throw InvalidArgument("model and state layouts differ");
  if (spec && !(spec->layout() == state.layout)) throw InvalidArgument("constraint and state layouts differ");
  const StateGeometry g = state_geometry(state, opt.scheme);
  const JetLayout& l = state.layout;
  const int P = state.grid.size();
  const int k = spec ? spec->count() : 0;
  SodeDetails out;
  out.free.w.reserve(P);
  out.projected.w.reserve(P);
  out.lambda0 = Eigen::MatrixXd::Zero(P, k);
  for (int j = 0; j < P; ++j) {
    const JetPoint& p = g.jets[j];
    const DerivativeBundle b = derivative_bundle(model, p);
    const DdwSolution free = solve_free_ddw(b, p, g.pins[j]);
    out.free.w.push_back(free.coeffs.horizontal_lift(l, 0));
    if (k == 0) {
      out.projected.w.push_back(out.free.w.back());
      continue;
    }
    const ConstraintLinearization lin = spec->linearize(p);
    const double phi = lin.values.cwiseAbs().maxCoeff();
    out.max_phi = std::max(out.max_phi, phi);
    if (phi >= opt.on_tol) {
      throw DriftError("sode_vector_field: constraint violated at grid point " + std::to_string(j) +
                       " (|phi| = " + std::to_string(phi) + ")");
    }
    const ZetaBasis zb = solve_zeta(b, chetaev_coefficients(*spec, p, lin));
    const Compatibility comp = compatibility_matrix(zb, lin.dphidv());
    if (!comp.compatible) {
      throw CompatibilityError("sode_vector_field: incompatible at grid point " + std::to_string(j), j);
    }
    const ProjectorPair pp = build_projectors(zb, lin, opt.on_tol);
    const DdwSolution proj = project_connection(free, pp, zb, lin, p, nullptr, opt.on_tol);
    out.projected.w.push_back(proj.coeffs.horizontal_lift(l, 0));
    out.lambda0.row(j) = proj.multipliers.col(0).transpose();
  }
  return out;
}

StateVariation sode_vector_field(const LagrangianModel& model, const ConstraintSpec* spec,
                                 const CauchyState& state, const SodeOptions& opt) {
  return sode_details(model, spec, state, opt).projected;
}

double state_energy(const LagrangianModel& model, const CauchyState& state, DerivativeScheme scheme) {
  const StateGeometry g = state_geometry(state, scheme);
  const JetLayout& l = state.layout;
  double e = 0.0;
  for (const auto& p : g.jets) {
    const Eigen::VectorXd grad = lagrangian_gradient(model, p);
    double s = -model(p);
    for (int a = 0; a < l.m; ++a) s += p.v(a, 0) * grad[l.v_index(a, 0)];
    e += s;
  }
  return e / static_cast<double>(g.jets.size());
}

StateVariation random_variation(const CauchyState& state, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  StateVariation W;
  W.w.reserve(state.grid.size());
  for (int j = 0; j < state.grid.size(); ++j) {
    TangentVector t(state.layout);
    for (int c = 0; c < t.dim(); ++c) t.components()[c] = u(rng);
    W.w.push_back(std::move(t));
  }
  return W;
}

namespace {

int packed_size(const CauchyState& s) {
  return static_cast<int>(s.y.size() + s.v0.size() + (s.mode == StateMode::FullJet ? s.vi.size() : 0));
}

Eigen::VectorXd pack(const CauchyState& s) {
  Eigen::VectorXd z(packed_size(s));
  int o = 0;
  auto put = [&](const Eigen::MatrixXd& M) {
    z.segment(o, M.size()) = Eigen::Map<const Eigen::VectorXd>(M.data(), M.size());
    o += static_cast<int>(M.size());
  };
  put(s.y);
  put(s.v0);
  if (s.mode == StateMode::FullJet) put(s.vi);
  return z;
}

void unpack(const Eigen::VectorXd& z, CauchyState& s) {
  int o = 0;
  auto get = [&](Eigen::MatrixXd& M) {
    Eigen::Map<Eigen::VectorXd>(M.data(), M.size()) = z.segment(o, M.size());
    o += static_cast<int>(M.size());
  };
  get(s.y);
  get(s.v0);
  if (s.mode == StateMode::FullJet) get(s.vi);
}

Eigen::VectorXd rate_of(const CauchyState& s, const StateVariation& W) {
  CauchyState r = s;
  const JetLayout& l = s.layout;
  for (int j = 0; j < s.grid.size(); ++j) {
    const TangentVector& t = W.w[j];
    for (int a = 0; a < l.m; ++a) {
      r.y(j, a) = t.dy(a);
      r.v0(j, a) = t.dv(a, 0);
      if (s.mode == StateMode::FullJet)
        for (int i = 0; i < l.n; ++i) r.vi(j, a * l.n + i) = t.dv(a, i + 1);
    }
  }
  return pack(r);
}

double max_phi_of(const ConstraintSpec* spec, const StateGeometry& g) {
  if (!spec || spec->count() == 0) return 0.0;
  double m = 0.0;
  for (const auto& p : g.jets) m = std::max(m, spec->values(p).cwiseAbs().maxCoeff());
  return m;
}

void stabilize_state(const ConstraintSpec& spec, CauchyState& s, DerivativeScheme scheme) {
  const StateGeometry g = state_geometry(s, scheme);
  const JetLayout& l = s.layout;
  std::vector<int> idx;
  for (int a = 0; a < l.m; ++a) {
    idx.push_back(l.v_index(a, 0));
    if (s.mode == StateMode::FullJet)
      for (int i = 1; i <= l.n; ++i) idx.push_back(l.v_index(a, i));
  }
  for (int j = 0; j < s.grid.size(); ++j) {
    const JetPoint q = project_to_constraint(spec, g.jets[j], idx, 1e-14);
    for (int a = 0; a < l.m; ++a) {
      s.v0(j, a) = q.v(a, 0);
      if (s.mode == StateMode::FullJet)
        for (int i = 0; i < l.n; ++i) s.vi(j, a * l.n + i) = q.v(a, i + 1);
    }
  }
}

}  // namespace

EvolveResult evolve(const LagrangianModel& model, const ConstraintSpec* spec, const CauchyState& state0,
                    const EvolveOptions& opt) {
  check_state(state0);
  if (opt.steps < 0) throw InvalidArgument("evolve: steps must be >= 0");
  if (!(opt.dt > 0.0)) throw InvalidArgument("evolve: dt must be > 0");
  const int every = std::max(1, opt.record_every);
  const SodeOptions sopt{opt.scheme, opt.drift_ceiling};

  EvolveResult res;
  CauchyState s = state0;
  res.trajectory.push_back(s);

  auto field = [&](const CauchyState& st, long step) {
    try {
      return sode_vector_field(model, spec, st, sopt);
    } catch (const DriftError& e) {
      throw DriftError(std::string(e.what()) + " at step " + std::to_string(step), step);
    }
  };
  auto diagnose = [&](const CauchyState& st, const StateVariation& W) {
    const StateGeometry g = state_geometry(st, opt.scheme);
    StepDiagnostics d;
    d.t = st.t;
    d.max_phi = max_phi_of(spec, g);
    d.holonomy = g.holonomy_defect;
    d.eta = tilde_eta_contract(st, W);
    d.energy = state_energy(model, st, opt.scheme);
    return d;
  };

  for (int step = 0; step < opt.steps; ++step) {
    const StateVariation W1 = field(s, step);
    res.diagnostics.push_back(diagnose(s, W1));
    const Eigen::VectorXd z = pack(s);
    const Eigen::VectorXd k1 = rate_of(s, W1);
    Eigen::VectorXd znew;
    if (opt.integrator == Integrator::Euler) {
      znew = z + opt.dt * k1;
    } else {
      CauchyState st = s;
      auto stage = [&](const Eigen::VectorXd& zz, double tt) {
        unpack(zz, st);
        st.t = tt;
        return rate_of(st, field(st, step));
      };
      const Eigen::VectorXd k2 = stage(z + 0.5 * opt.dt * k1, s.t + 0.5 * opt.dt);
      const Eigen::VectorXd k3 = stage(z + 0.5 * opt.dt * k2, s.t + 0.5 * opt.dt);
      const Eigen::VectorXd k4 = stage(z + opt.dt * k3, s.t + opt.dt);
      znew = z + (opt.dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    if (!znew.allFinite()) {
      throw InstabilityError("evolve: non-finite state after step " + std::to_string(step + 1), step + 1);
    }
    unpack(znew, s);
    s.t = state0.t + (step + 1) * opt.dt;
    if (spec && opt.stabilize) stabilize_state(*spec, s, opt.scheme);
    if (spec && spec->count() > 0) {
      const double drift = max_phi_of(spec, state_geometry(s, opt.scheme));
      if (drift > opt.drift_ceiling) {
        throw DriftError("evolve: constraint drift " + std::to_string(drift) + " exceeds ceiling at step " +
                             std::to_string(step + 1),
                         step + 1);
      }
    }
    if ((step + 1) % every == 0 || step + 1 == opt.steps) res.trajectory.push_back(s);
  }
  res.diagnostics.push_back(diagnose(s, field(s, opt.steps)));
  return res;
}

CauchyIdentityReport cauchy_identity_check(const LagrangianModel& model, const ConstraintSpec* spec,
                                           const CauchyState& state, std::mt19937_64& rng, int variations,
                                           const SodeOptions& opt) {
  const CauchyForms forms(model, state, opt.scheme);
  const SodeDetails det = sode_details(model, spec, state, opt);
  const StateGeometry& g = forms.geometry();
  const JetLayout& l = state.layout;
  const int P = state.grid.size();
  const int k = spec ? spec->count() : 0;

  CauchyIdentityReport r;
  r.eta_error = std::abs(forms.eta(det.projected) - 1.0);
  for (int j = 0; j < P; ++j)
    for (int a = 0; a < l.m; ++a)
      r.sode_error = std::max(r.sode_error, std::abs(det.projected.w[j].dy(a) - state.v0(j, a)));
  for (int v = 0; v < variations; ++v) {
    r.free_kernel = std::max(r.free_kernel, std::abs(forms.omega(det.free, random_variation(state, rng))));
  }
  if (k == 0) return r;

  // Per-point constraint data: dphi rows and the covectors w -> Phi_alpha(w, K).
  std::vector<Eigen::MatrixXd> annih(P);
  std::vector<std::vector<Form>> phis(P);
  for (int j = 0; j < P; ++j) {
    const JetPoint& p = g.jets[j];
    const ConstraintLinearization lin = spec->linearize(p);
    phis[j] = constraint_forms(p, chetaev_coefficients(*spec, p, lin));
    const Eigen::VectorXd t = lin.jacobian * det.projected.w[j].components();
    r.tangency = std::max(r.tangency, t.cwiseAbs().maxCoeff());
    Eigen::MatrixXd A(2 * k, l.dim());
    A.topRows(k) = lin.jacobian;
    for (int al = 0; al < k; ++al) {
      std::vector<TangentVector> vecs(1, TangentVector(l));
      for (const auto& K : g.slice[j]) vecs.push_back(K);
      for (int c = 0; c < l.dim(); ++c) {
        vecs[0] = TangentVector::basis(l, c);
        A(k + al, c) = phis[j][al].eval(vecs);
      }
    }
    annih[j] = A;
  }

  for (int v = 0; v < variations; ++v) {
    StateVariation W = random_variation(state, rng);
    for (int j = 0; j < P; ++j) {
      const Eigen::MatrixXd& A = annih[j];
      Eigen::VectorXd& w = W.w[j].components();
      w -= A.completeOrthogonalDecomposition().solve(A * w);
    }
    r.annihilator = std::max(r.annihilator, std::abs(forms.omega(det.projected, W)));
  }

  // Pointwise fit of the difference against Phi_alpha(W, K).
  std::vector<StateVariation> Ws;
  for (int v = 0; v < variations; ++v) Ws.push_back(random_variation(state, rng));
  for (int j = 0; j < P; ++j) {
    Eigen::MatrixXd G(variations, k);
    Eigen::VectorXd d(variations);
    for (int v = 0; v < variations; ++v) {
      const TangentVector& w = Ws[v].w[j];
      d[v] = forms.omega_density(j, det.projected.w[j], w) - forms.omega_density(j, det.free.w[j], w);
      std::vector<TangentVector> vecs{w};
      for (const auto& K : g.slice[j]) vecs.push_back(K);
      for (int al = 0; al < k; ++al) G(v, al) = phis[j][al].eval(vecs);
    }
    const Eigen::VectorXd c = G.completeOrthogonalDecomposition().solve(d);
    r.force_fit = std::max(r.force_fit, (d - G * c).cwiseAbs().maxCoeff());
    for (int al = 0; al < k; ++al) r.force_coeff = std::max(r.force_coeff, std::abs(c[al] + det.lambda0(j, al)));
  }
  return r;
}

}  // namespace nhfields
