#include <cmath>
#include <numbers>

#include <benchmark/benchmark.h>

#include "nhfields/cauchy.hpp"
#include "nhfields/models.hpp"
#include "nhfields/registry.hpp"

using namespace nhfields;

static void BM_SodeWaveFree(benchmark::State& st) {
  const int nu = static_cast<int>(st.range(0));
  const LagrangianModel model = wave_model(JetLayout{1, 1});
  CauchyState s = CauchyState::zeros(model.layout(), nu, StateMode::PDE);
  for (int j = 0; j < s.points(); ++j)
    s.y(j, 0) = std::sin(2.0 * std::numbers::pi * s.grid.coordinate(j, 0));
  for (auto _ : st) benchmark::DoNotOptimize(sode_vector_field(model, nullptr, s));
  st.SetItemsProcessed(st.iterations() * s.points());
}
BENCHMARK(BM_SodeWaveFree)->Arg(64)->Arg(256);

static void BM_SodeVelocityLaw(benchmark::State& st) {
  const int nu = static_cast<int>(st.range(0));
  const LagrangianModel model = wave_model(JetLayout{1, 1});
  const ConstraintSpec spec = make_constraint("velocity-law", model.layout(), {{"q", 2.0}});
  CauchyState s = CauchyState::zeros(model.layout(), nu, StateMode::FullJet);
  for (int j = 0; j < s.points(); ++j) {
    const double u = 2.0 * std::numbers::pi * s.grid.coordinate(j, 0);
    s.y(j, 0) = std::sin(u);
    s.vi(j, 0) = 2.0 * std::numbers::pi * std::cos(u);
    s.v0(j, 0) = 2.0 * std::sin(s.y(j, 0));
  }
  for (auto _ : st) benchmark::DoNotOptimize(sode_vector_field(model, &spec, s));
  st.SetItemsProcessed(st.iterations() * s.points());
}
BENCHMARK(BM_SodeVelocityLaw)->Arg(64)->Arg(256);

BENCHMARK_MAIN();
