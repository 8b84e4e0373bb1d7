#include <random>

#include <benchmark/benchmark.h>

#include "nhfields/fluid.hpp"
#include "nhfields/models.hpp"
#include "nhfields/projector.hpp"
#include "nhfields/registry.hpp"

using namespace nhfields;

static void BM_BuildProjectorsFluid(benchmark::State& st) {
  const LagrangianModel model = fluid_model();
  const ConstraintSpec spec = incompressibility_constraint();
  std::mt19937_64 rng(2);
  const JetPoint p = sample_jet_point(model, rng);
  const DerivativeBundle b = derivative_bundle(model, p);
  const ConstraintLinearization lin = spec.linearize(p);
  const ZetaBasis zb = solve_zeta(b, chetaev_coefficients(spec, p, lin));
  for (auto _ : st) benchmark::DoNotOptimize(build_projectors(zb, lin));
}
BENCHMARK(BM_BuildProjectorsFluid);

static void BM_SolveZetaFluid(benchmark::State& st) {
  const LagrangianModel model = fluid_model();
  const ConstraintSpec spec = incompressibility_constraint();
  std::mt19937_64 rng(3);
  const JetPoint p = sample_jet_point(model, rng);
  const DerivativeBundle b = derivative_bundle(model, p);
  const Eigen::MatrixXd C = chetaev_coefficients(spec, p);
  for (auto _ : st) benchmark::DoNotOptimize(solve_zeta(b, C));
}
BENCHMARK(BM_SolveZetaFluid);

BENCHMARK_MAIN();
