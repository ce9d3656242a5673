#include <benchmark/benchmark.h>

#include <numeric>

#include "goalrom/burgers.hpp"
#include "goalrom/dwr.hpp"
#include "goalrom/ecsw.hpp"
#include "goalrom/lspg.hpp"
#include "goalrom/pod.hpp"
#include "goalrom/sampler.hpp"

using namespace goalrom;

namespace {

struct Fixture {
  Grid1D grid{1024};
  SnapshotSet snaps;
  PodBasis basis;
  ReducedMesh mesh;

  Fixture() {
    for (double b : {0.01, 0.0188, 0.0302, 0.055, 0.0792, 0.0909, 0.096, 0.1}) {
      const BurgersModel model(grid, {b, 1.0});
      snaps.add(model.params(), solve_fom_march(model));
    }
    basis = build_basis(snaps);
    std::vector<int> all(snaps.size());
    std::iota(all.begin(), all.end(), 0);
    mesh = find_weights(grid, basis, snaps, all, TrainingMode::jacobian, 1e-6);
  }
};

const Fixture& fixture() {
  static const Fixture f;
  return f;
}

void BM_FomNewton(benchmark::State& state) {
  const BurgersModel model(Grid1D(static_cast<int>(state.range(0))), {0.044, 1.0});
  for (auto _ : state) benchmark::DoNotOptimize(solve_fom(model).state.data());
}
BENCHMARK(BM_FomNewton)->Arg(256)->Arg(1024)->Arg(4096);

void BM_PodBasis(benchmark::State& state) {
  const Fixture& f = fixture();
  for (auto _ : state) benchmark::DoNotOptimize(build_basis(f.snaps).modes.data());
}
BENCHMARK(BM_PodBasis);

void BM_RomExact(benchmark::State& state) {
  const Fixture& f = fixture();
  const BurgersModel model(f.grid, {0.044, 1.0});
  for (auto _ : state) benchmark::DoNotOptimize(solve_rom_exact(model, f.basis, f.snaps.states[2]).state.data());
}
BENCHMARK(BM_RomExact);

void BM_RomHyper(benchmark::State& state) {
  const Fixture& f = fixture();
  const BurgersModel model(f.grid, {0.044, 1.0});
  for (auto _ : state) {
    benchmark::DoNotOptimize(solve_rom_hyper(model, f.basis, f.mesh, f.snaps.states[2]).state.data());
  }
  state.counters["mesh"] = static_cast<double>(f.mesh.size());
}
BENCHMARK(BM_RomHyper);

void BM_EpsilonR(benchmark::State& state) {
  const Fixture& f = fixture();
  const BurgersModel model(f.grid, {0.044, 1.0});
  const bool hyper = state.range(0) == 1;
  for (auto _ : state) {
    const FineCorrection c = hyper ? epsilon_r_hyper(model, f.basis, f.mesh, f.snaps.states[2])
                                   : epsilon_r_exact(model, f.basis, f.snaps.states[2]);
    benchmark::DoNotOptimize(c.epsilon);
  }
}
BENCHMARK(BM_EpsilonR)->Arg(0)->Arg(1);

void BM_NnlsTraining(benchmark::State& state) {
  const Fixture& f = fixture();
  std::vector<int> all(f.snaps.size());
  std::iota(all.begin(), all.end(), 0);
  const TrainingMode mode = state.range(0) == 0 ? TrainingMode::residual : TrainingMode::jacobian;
  const TrainingSystem system = assemble_training(mode, f.grid, f.basis, f.snaps, all);
  for (auto _ : state) benchmark::DoNotOptimize(nnls_solve(system, 1e-6).size());
}
BENCHMARK(BM_NnlsTraining)->Arg(0)->Arg(1);

void BM_AdaptiveRun(benchmark::State& state) {
  SamplerConfig config;
  config.mode = static_cast<SamplingMode>(state.range(0));
  const ParameterDomain domain(Vector::Constant(1, 0.01), Vector::Constant(1, 0.1));
  for (auto _ : state) {
    SamplerState s = init_sampler(config, domain);
    run_adaptive(s);
    benchmark::DoNotOptimize(s.eps_max);
  }
}
BENCHMARK(BM_AdaptiveRun)->Arg(0)->Arg(1)->Arg(2)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
