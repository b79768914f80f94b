#include <benchmark/benchmark.h>

#include "sepsim/dynamics.hpp"
#include "sepsim/gf2.hpp"
#include "sepsim/percolation.hpp"
#include "sepsim/tableau.hpp"

using namespace sepsim;

namespace {

EvolvedState steady_state(uint32_t n, double g, GateMode mode, uint64_t seed) {
  DynamicsParams params = params_for_g(g);
  params.mode = mode;
  params.burn_in_timesteps = default_burn_in(n, params);
  Rng rng = make_rng(seed, 0);
  EvolvedState state(n, mode);
  for (uint64_t t = 0; t < params.burn_in_timesteps; ++t) advance_timestep(state, params, rng);
  return state;
}

void BM_AdvanceTimestep(benchmark::State& state) {
  const uint32_t n = static_cast<uint32_t>(state.range(0));
  const double g = state.range(1) / 100.0;
  DynamicsParams params = params_for_g(g);
  params.burn_in_timesteps = default_burn_in(n, params);
  Rng rng = make_rng(42, 0);
  EvolvedState sim(n, GateMode::Clifford);
  for (uint64_t t = 0; t < params.burn_in_timesteps; ++t) advance_timestep(sim, params, rng);
  for (auto _ : state) {
    advance_timestep(sim, params, rng);
  }
  state.SetItemsProcessed(state.iterations() * (params.gamma_u + params.gamma_m));
}
BENCHMARK(BM_AdvanceTimestep)->Args({2000, 30})->Args({2000, 67})->Args({2000, 150});

void BM_ClusterStatistics(benchmark::State& state) {
  const EvolvedState sim = steady_state(static_cast<uint32_t>(state.range(0)),
                                        state.range(1) / 100.0, GateMode::Clifford, 7);
  for (auto _ : state) {
    benchmark::DoNotOptimize(cluster_statistics(sim));
  }
}
BENCHMARK(BM_ClusterStatistics)->Args({2000, 30})->Args({2000, 67});

void BM_Gf2Rank(benchmark::State& state) {
  const uint32_t n = static_cast<uint32_t>(state.range(0));
  Rng rng = make_rng(3, 0);
  BitMatrix m(n, n);
  for (uint32_t r = 0; r < n; ++r)
    for (uint32_t c = 0; c < n; ++c) m.set(r, c, coin(rng));
  for (auto _ : state) {
    benchmark::DoNotOptimize(gf2_rank(m));
  }
}
BENCHMARK(BM_Gf2Rank)->Arg(256)->Arg(1000)->Arg(2000);

void BM_EntanglingPower(benchmark::State& state) {
  const uint32_t n = static_cast<uint32_t>(state.range(0));
  const EvolvedState sim = steady_state(n, 2.0 / 3.0, GateMode::Clifford, 9);
  Rng rng = make_rng(10, 0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        entangling_power_experiment(sim, 0, n / 2, MeasureBasisMode::PauliX, rng));
  }
}
BENCHMARK(BM_EntanglingPower)->Arg(100)->Arg(200)->Arg(400);

}  // namespace

BENCHMARK_MAIN();
