#include <benchmark/benchmark.h>

#include "ddchain/simulation.hpp"

namespace {

using namespace ddchain;

void BM_Replication(benchmark::State& state) {
  ScenarioConfig cfg;
  cfg.rounds = static_cast<int>(state.range(0));
  cfg.dropout_prob = 0.1;
  for (auto _ : state) benchmark::DoNotOptimize(run_replication(cfg, 0));
}
BENCHMARK(BM_Replication)->Arg(12)->Arg(60)->Unit(benchmark::kMillisecond);

void BM_SingleRound(benchmark::State& state) {
  ScenarioConfig cfg;
  cfg.kep_arrival = {40, 40};
  cfg.dd_arrival = {static_cast<int>(state.range(0)), static_cast<int>(state.range(0))};
  const RoundArrivals a = ArrivalStream(cfg, 5).next(0);
  for (auto _ : state) benchmark::DoNotOptimize(compare_single_round(a.pairs, a.deceased, 2));
}
BENCHMARK(BM_SingleRound)->Arg(2)->Arg(6)->Unit(benchmark::kMillisecond);

}  // namespace
