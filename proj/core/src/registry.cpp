#include "nhfields/registry.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "nhfields/errors.hpp"
#include "nhfields/fluid.hpp"
#include "nhfields/models.hpp"

namespace nhfields {

namespace {

void check_keys(const std::string& what, const ParamMap& params, const std::set<std::string>& allowed) {
  for (const auto& [k, v] : params) {
    if (!allowed.count(k)) throw ConfigError(what + ": unknown parameter '" + k + "'");
    if (!std::isfinite(v)) throw ConfigError(what + ": parameter '" + k + "' is not finite");
  }
}

double get(const ParamMap& params, const std::string& k, double def) {
  auto it = params.find(k);
  return it == params.end() ? def : it->second;
}

int get_dim(const ParamMap& params, const std::string& k, int def, int lo) {
  const double v = get(params, k, def);
  if (v != std::floor(v) || v < lo || v > 8) {
    throw ConfigError("parameter '" + k + "' must be an integer in [" + std::to_string(lo) + ", 8]");
  }
  return static_cast<int>(v);
}

}  // namespace

std::vector<std::string> model_names() { return {"wave", "quadratic", "fluid"}; }

std::vector<std::string> constraint_names() {
  return {"linear-transport", "incompressibility", "velocity-law"};
}

LagrangianModel make_model(const std::string& name, const ParamMap& params) {
  if (name == "wave") {
    check_keys("wave", params, {"c", "n", "m"});
    return wave_model(JetLayout{get_dim(params, "n", 1, 0), get_dim(params, "m", 1, 1)},
                      get(params, "c", 1.0));
  }
  if (name == "quadratic") {
    check_keys("quadratic", params, {"g", "n", "m"});
    return quadratic_model(JetLayout{get_dim(params, "n", 1, 0), get_dim(params, "m", 1, 1)},
                           get(params, "g", 1.0));
  }
  if (name == "fluid") {
    check_keys("fluid", params, {"rho", "kappa", "beta", "mu"});
    FluidParams fp;
    fp.rho = get(params, "rho", fp.rho);
    fp.kappa = get(params, "kappa", fp.kappa);
    fp.beta = get(params, "beta", fp.beta);
    fp.mu = get(params, "mu", fp.mu);
    try {
      fp.validate();
    } catch (const InvalidArgument& e) {
      throw ConfigError(e.what());
    }
    return fluid_model(fp);
  }
  throw ConfigError("unknown model '" + name + "'");
}

ConstraintSpec make_constraint(const std::string& name, const JetLayout& layout,
                               const ParamMap& params) {
  if (name == "linear-transport") {
    check_keys(name, params, {"c"});
    if (layout.n < 1) throw ConfigError("linear-transport needs n >= 1");
    const double c = get(params, "c", 2.0);
    return ConstraintSpec::make(name, Dims{layout, 1}, [c](const auto& p, auto* out) {
      out[0] = p.v(0, 0) - c * p.v(0, 1);
    });
  }
  if (name == "velocity-law") {
    check_keys(name, params, {"q"});
    const double q = get(params, "q", 2.0);
    return ConstraintSpec::make(name, Dims{layout, 1}, [q](const auto& p, auto* out) {
      using std::sin;
      out[0] = p.v(0, 0) - q * sin(p.y(0));
    });
  }
  if (name == "incompressibility") {
    check_keys(name, params, {});
    if (!(layout == kFluidLayout)) throw ConfigError("incompressibility needs n = 3, m = 3");
    return incompressibility_constraint();
  }
  throw ConfigError("unknown constraint '" + name + "'");
}

ConstraintSpec with_custom_csv(const ConstraintSpec& spec, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open coefficient file '" + path + "'");
  const int k = spec.count();
  const int M = spec.layout().jet_dim();
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      try {
        std::size_t used = 0;
        row.push_back(std::stod(cell, &used));
      } catch (const std::exception&) {
        throw ConfigError("coefficient file '" + path + "': bad number '" + cell + "'");
      }
    }
    rows.push_back(std::move(row));
  }
  if (static_cast<int>(rows.size()) != k) {
    throw ConfigError("coefficient file '" + path + "': expected " + std::to_string(k) + " rows");
  }
  Eigen::MatrixXd C(k, M);
  for (int r = 0; r < k; ++r) {
    if (static_cast<int>(rows[r].size()) != M) {
      throw ConfigError("coefficient file '" + path + "': expected " + std::to_string(M) + " columns");
    }
    for (int j = 0; j < M; ++j) C(r, j) = rows[r][j];
  }
  return spec.with_custom_coefficients([C](const JetPoint&) { return C; });
}

JetPoint sample_jet_point(const LagrangianModel& model, std::mt19937_64& rng) {
  const JetLayout& l = model.layout();
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  JetPoint p(l);
  for (int i = 0; i < l.dim(); ++i) p.coords()[i] = uni(rng);
  if (model.name() == "fluid") {
    // Near-identity spatial block rescaled to unit determinant.
    Eigen::Matrix3d F = Eigen::Matrix3d::Identity();
    for (int a = 0; a < 3; ++a)
      for (int i = 0; i < 3; ++i) F(a, i) += 0.3 * uni(rng);
    const double J = F.determinant();
    F /= std::cbrt(J);
    for (int a = 0; a < 3; ++a)
      for (int i = 0; i < 3; ++i) p.v(a, i + 1) = F(a, i);
  }
  return p;
}

}  // namespace nhfields
