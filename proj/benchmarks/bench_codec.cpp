#include <benchmark/benchmark.h>

#include <numeric>

#include "covspec/codec.hpp"

namespace covspec {
namespace {

void BM_EncodeUplink(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  Uplink m{{1, 2}, std::vector<TokenId>(n), std::vector<F16>(n, 0xBC00)};
  std::iota(m.draft.begin(), m.draft.end(), 0u);
  for (auto _ : state) benchmark::DoNotOptimize(encode_message(m));
}
BENCHMARK(BM_EncodeUplink)->Arg(4)->Arg(16);

void BM_DecodeReject(benchmark::State& state) {
  const auto w = static_cast<std::size_t>(state.range(0));
  const auto frame = encode_message(DownlinkReject{3, std::vector<F16>(w, 0x3C00)});
  for (auto _ : state) benchmark::DoNotOptimize(decode_message(frame));
  state.SetBytesProcessed(state.iterations() * static_cast<std::int64_t>(frame.size()));
}
BENCHMARK(BM_DecodeReject)->RangeMultiplier(4)->Range(64, 16384);

}  // namespace
}  // namespace covspec
