#include <benchmark/benchmark.h>

#include "covspec/models.hpp"
#include "covspec/rng.hpp"
#include "covspec/tokensel.hpp"

namespace covspec {
namespace {

void BM_SubspaceEnergies(benchmark::State& state) {
  const auto m = static_cast<std::size_t>(state.range(0));
  SeededRng rng(1, "bench-svd");
  Matrix z(m, 64);
  for (std::size_t i = 0; i < m; ++i) {
    for (double& x : z.row(i)) x = rng.next_normal();
  }
  for (auto _ : state) benchmark::DoNotOptimize(subspace_energies(z, m / 4));
}
BENCHMARK(BM_SubspaceEnergies)->Arg(32)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);

void BM_SelectVisualTokens(benchmark::State& state) {
  const Query q = Query::from_text("what is written on the red sign above the shop door", 64, 1);
  const VisualTokenSet v = gen_visual(1, 768, 64, 6, q);
  SelectionConfig cfg;
  cfg.preselect_m = 128;
  cfg.budget = 64;
  cfg.rank = 32;
  for (auto _ : state) benchmark::DoNotOptimize(select_visual_tokens(v, q, cfg));
}
BENCHMARK(BM_SelectVisualTokens)->Unit(benchmark::kMillisecond);

}  // namespace
}  // namespace covspec
