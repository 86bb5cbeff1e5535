#include <benchmark/benchmark.h>

#include "covspec/harness.hpp"

namespace covspec {
namespace {

void BM_LoopbackEpisode(benchmark::State& state) {
  ExperimentConfig cfg;
  cfg.max_new_tokens = static_cast<std::size_t>(state.range(0));
  const Scenario s(cfg);
  for (auto _ : state) benchmark::DoNotOptimize(run_loopback(s));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_LoopbackEpisode)->Arg(256)->Arg(1024)->Unit(benchmark::kMillisecond);

void BM_ScenarioSetup(benchmark::State& state) {
  const ExperimentConfig cfg;
  for (auto _ : state) benchmark::DoNotOptimize(Scenario(cfg));
}
BENCHMARK(BM_ScenarioSetup)->Unit(benchmark::kMillisecond);

}  // namespace
}  // namespace covspec
