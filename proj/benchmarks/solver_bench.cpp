#include <benchmark/benchmark.h>

#include "ddchain/enumeration.hpp"
#include "ddchain/formulation.hpp"
#include "ddchain/snapshot.hpp"
#include "ddchain/solvers.hpp"

namespace {

using namespace ddchain;

ExchangeGraph pool_graph(int pairs, int deceased, std::uint64_t seed) {
  PoolConfig cfg;
  cfg.pairs = pairs;
  cfg.deceased = deceased;
  cfg.wait_list_per_group = 1;
  cfg.pwl_fraction = 0.1;
  cfg.seed = seed;
  RegistrySnapshot s;
  s.nodes = generate_pool(cfg);
  return snapshot_graph(s, GraphOptions{0.3, seed});
}

void BM_EnumerateCycles(benchmark::State& state) {
  const ExchangeGraph g = pool_graph(static_cast<int>(state.range(0)), 5, 11);
  const int k = static_cast<int>(state.range(1));
  for (auto _ : state) benchmark::DoNotOptimize(enumerate_cycles(g, k));
}
BENCHMARK(BM_EnumerateCycles)->Args({50, 2})->Args({100, 3})->Args({200, 3})->Unit(benchmark::kMillisecond);

void BM_SolveCompact(benchmark::State& state) {
  const ExchangeGraph g = pool_graph(static_cast<int>(state.range(0)), 5, 11);
  const SolveOptions options{static_cast<int>(state.range(1))};
  for (auto _ : state) benchmark::DoNotOptimize(solve_bb(build_compact(g, options)));
}
BENCHMARK(BM_SolveCompact)->Args({50, 2})->Args({100, 2})->Args({100, 3})->Unit(benchmark::kMillisecond);

void BM_SolvePacking(benchmark::State& state) {
  const ExchangeGraph g = pool_graph(static_cast<int>(state.range(0)), 5, 11);
  const SolveOptions options{static_cast<int>(state.range(1))};
  for (auto _ : state) benchmark::DoNotOptimize(solve_packing(g, options));
}
BENCHMARK(BM_SolvePacking)->Args({50, 2})->Args({100, 2})->Args({100, 3})->Unit(benchmark::kMillisecond);

}  // namespace
