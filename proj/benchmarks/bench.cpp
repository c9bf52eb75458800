#include <benchmark/benchmark.h>

#include "tracelab/channel.hpp"
#include "tracelab/classes.hpp"
#include "tracelab/distinguish.hpp"
#include "tracelab/edit_distance.hpp"
#include "tracelab/reconstruct.hpp"

using namespace tracelab;

namespace {

Bits random_bits(std::size_t n, std::uint64_t seed) {
  ClassSpec s;
  s.kind = ClassKind::Random;
  s.n = n;
  s.seed = seed;
  return generate(s).bits;
}

void BM_EditDistance(benchmark::State& st) {
  const auto n = static_cast<std::size_t>(st.range(0));
  const Bits a = random_bits(n, 1), b = random_bits(n, 2);
  for (auto _ : st) benchmark::DoNotOptimize(edit_distance(a, b));
  st.SetComplexityN(static_cast<benchmark::IterationCount>(n));
}
BENCHMARK(BM_EditDistance)->RangeMultiplier(4)->Range(256, 16384)->Complexity();

void BM_EditDistanceBanded(benchmark::State& st) {
  const auto n = static_cast<std::size_t>(st.range(0));
  const Bits a = random_bits(n, 1);
  const auto ch = ChannelParams::make(0.05, 3);
  const Bits b = sample_trace(a, ch, 0);
  for (auto _ : st) benchmark::DoNotOptimize(edit_distance_banded(a, b, n / 8));
}
BENCHMARK(BM_EditDistanceBanded)->RangeMultiplier(4)->Range(1024, 65536);

void BM_SampleTrace(benchmark::State& st) {
  const auto n = static_cast<std::size_t>(st.range(0));
  const Bits x = random_bits(n, 4);
  const auto ch = ChannelParams::make(0.5, 5);
  std::uint64_t i = 0;
  for (auto _ : st) benchmark::DoNotOptimize(sample_trace(x, ch, i++));
  st.SetBytesProcessed(static_cast<std::int64_t>(st.iterations()) * static_cast<std::int64_t>(n / 8));
}
BENCHMARK(BM_SampleTrace)->RangeMultiplier(4)->Range(1024, 1 << 16);

void BM_ReconGap(benchmark::State& st) {
  ClassSpec s;
  s.kind = ClassKind::GapClass;
  s.n = 1 << 14;
  s.epsilon = 0.25;
  s.c_prime = 200;
  s.q = 0.5;
  s.seed = 6;
  const Bits x = generate(s).bits;
  const auto gp = GapParams::make(s.epsilon, s.c_prime, s.q, s.n);
  const auto traces = sample_traces(x, ChannelParams::make(0.5, 7), static_cast<std::size_t>(st.range(0)));
  for (auto _ : st) benchmark::DoNotOptimize(recon_gap(traces, gp));
}
BENCHMARK(BM_ReconGap)->Arg(100)->Arg(1792);

void BM_EmbeddingCount(benchmark::State& st) {
  const auto n = static_cast<std::size_t>(st.range(0));
  const Bits x = random_bits(n, 8);
  const Bits t = sample_trace(x, ChannelParams::make(0.5, 9), 0);
  for (auto _ : st) benchmark::DoNotOptimize(embedding_count(x, t));
}
BENCHMARK(BM_EmbeddingCount)->Arg(23)->Arg(64)->Arg(256);

}  // namespace
BENCHMARK_MAIN();
