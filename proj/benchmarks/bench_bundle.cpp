#include <random>

#include <benchmark/benchmark.h>

#include "nhfields/fluid.hpp"
#include "nhfields/lagrangian.hpp"
#include "nhfields/models.hpp"
#include "nhfields/registry.hpp"

using namespace nhfields;

static void run_bundle(benchmark::State& st, const LagrangianModel& model) {
  std::mt19937_64 rng(1);
  const JetPoint p = sample_jet_point(model, rng);
  for (auto _ : st) benchmark::DoNotOptimize(derivative_bundle(model, p));
}

static void BM_BundleWave(benchmark::State& st) {
  const int n = static_cast<int>(st.range(0));
  run_bundle(st, wave_model(JetLayout{n, n}));
}
BENCHMARK(BM_BundleWave)->Arg(1)->Arg(2)->Arg(3);

static void BM_BundleFluid(benchmark::State& st) { run_bundle(st, fluid_model()); }
BENCHMARK(BM_BundleFluid);

BENCHMARK_MAIN();
