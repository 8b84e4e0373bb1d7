#include "nhfields/models.hpp"

namespace nhfields {

LagrangianModel wave_model(const JetLayout& layout, double c) {
  const double c2 = c * c;
  return LagrangianModel::make(
      "wave", layout,
      [c2](const auto& p) {
        using S = std::decay_t<decltype(p[0])>;
        const JetLayout& l = p.layout();
        S kin = 0.0;
        S pot = 0.0;
        for (int a = 0; a < l.m; ++a) {
          kin += p.v(a, 0) * p.v(a, 0);
          for (int i = 1; i <= l.n; ++i) pot += p.v(a, i) * p.v(a, i);
        }
        return 0.5 * (kin - c2 * pot);
      },
      Dependence{false, false});
}

LagrangianModel quadratic_model(const JetLayout& layout, double g) {
  return LagrangianModel::make(
      "quadratic", layout,
      [g](const auto& p) {
        using S = std::decay_t<decltype(p[0])>;
        const JetLayout& l = p.layout();
        S sum = 0.0;
        S coupling = 0.0;
        for (int a = 0; a < l.m; ++a) {
          for (int mu = 0; mu <= l.n; ++mu) sum += p.v(a, mu) * p.v(a, mu);
          coupling += p.y(a) * p.v(a, 0);
        }
        return 0.5 * sum + g * coupling;
      },
      Dependence{false, true});
}

}  // namespace nhfields
