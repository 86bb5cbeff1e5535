#include <benchmark/benchmark.h>

#include <vector>

#include "covspec/f16.hpp"
#include "covspec/probcore.hpp"
#include "covspec/rng.hpp"

namespace covspec {
namespace {

std::vector<double> random_logits(std::size_t n, std::uint64_t seed) {
  SeededRng rng(seed, "bench");
  std::vector<double> z(n);
  for (double& x : z) x = rng.next_normal() * 3;
  return z;
}

void BM_Softmax(benchmark::State& state) {
  const auto z = random_logits(static_cast<std::size_t>(state.range(0)), 1);
  for (auto _ : state) benchmark::DoNotOptimize(softmax(z));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Softmax)->RangeMultiplier(4)->Range(16, 4096);

void BM_Residual(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const ProbDist p_t = softmax(random_logits(n, 2));
  const ProbDist p_d = softmax(random_logits(n, 3));
  for (auto _ : state) benchmark::DoNotOptimize(residual_dist(p_t, p_d));
}
BENCHMARK(BM_Residual)->RangeMultiplier(4)->Range(16, 4096);

void BM_F16RoundTrip(benchmark::State& state) {
  const auto z = random_logits(1024, 4);
  for (auto _ : state) {
    double acc = 0.0;
    for (double x : z) acc += f16_decode(f16_encode(x));
    benchmark::DoNotOptimize(acc);
  }
  state.SetItemsProcessed(state.iterations() * 1024);
}
BENCHMARK(BM_F16RoundTrip);

}  // namespace
}  // namespace covspec
