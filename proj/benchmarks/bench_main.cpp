#include <benchmark/benchmark.h>

#include <numbers>

#include "qhd/kinetics.hpp"
#include "qhd/madelung_engine.hpp"
#include "qhd/schrodinger.hpp"
#include "qhd/spectral.hpp"
#include "qhd/states.hpp"

using namespace qhd;

namespace {

LatticeGrid square(std::size_t points) { return LatticeGrid::cubic(2, 1, points, 2.0 * std::numbers::pi); }

void BM_SpectralLaplacian(benchmark::State& state) {
  const auto g = square(std::size_t(state.range(0)));
  const SpectralOps ops(g);
  const auto rho = random_nodeless_density(g, 2, 0.3, 1);
  for (auto _ : state) benchmark::DoNotOptimize(ops.laplacian(std::span<const double>(rho)));
  state.SetItemsProcessed(state.iterations() * std::int64_t(g.size()));
}
BENCHMARK(BM_SpectralLaplacian)->Arg(64)->Arg(128)->Arg(256);

void BM_SplitStep(benchmark::State& state) {
  const auto g = square(std::size_t(state.range(0)));
  EvolveConfig cfg;
  cfg.dt = default_time_step(g, 1.0, 1.0);
  cfg.steps = 1;
  cfg.nonlinear = NonlinearTerm::cubic(0.5);
  SchrodingerEngine engine(periodic_gaussian(g, {{0.8, 0.8}, {}, {}}, 1.0, 1.0),
                           PotentialSpec::harmonic(1.0, 0.5).sample(g), cfg);
  for (auto _ : state) engine.step();
  state.SetItemsProcessed(state.iterations() * std::int64_t(g.size()));
}
BENCHMARK(BM_SplitStep)->Arg(64)->Arg(128)->Arg(256);

void BM_MadelungStep(benchmark::State& state) {
  const auto g = square(std::size_t(state.range(0)));
  EvolveConfig cfg;
  cfg.dt = default_time_step(g, 1.0, 1.0);
  cfg.steps = 1;
  cfg.diagnostics = false;
  const MadelungPair pair(g, random_nodeless_density(g, 2, 0.3, 2), std::vector<double>(g.size(), 0.0), 1.0);
  MadelungEngine engine(pair, 1.0, std::vector<double>(g.size(), 0.0), ConstitutiveParams::quantum(1.0, 1.0), cfg);
  for (auto _ : state) engine.step();
  state.SetItemsProcessed(state.iterations() * std::int64_t(g.size()));
}
BENCHMARK(BM_MadelungStep)->Arg(64)->Arg(128);

MonadEnsemble cube_ensemble(std::size_t count) {
  EnsembleSpec spec;
  spec.count = count;
  spec.dims = 3;
  spec.box = {1.0, 1.0, 1.0};
  spec.density_amplitude = 0.2;
  spec.seed = 5;
  return sample_ensemble(spec);
}

void BM_Collide(benchmark::State& state) {
  const auto ens = cube_ensemble(std::size_t(state.range(0)));
  const CollisionSettings settings{{8, 8, 8}, 50.0};
  for (auto _ : state) benchmark::DoNotOptimize(collide(ens, settings, 1e-3));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Collide)->Arg(10000)->Arg(100000);

void BM_ProjectMoments(benchmark::State& state) {
  const auto ens = cube_ensemble(std::size_t(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(project_split(ens, {16, 4, 4}));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_ProjectMoments)->Arg(10000)->Arg(100000);

}  // namespace
BENCHMARK_MAIN();
