#include <benchmark/benchmark.h>

#include <vector>

#include "dsm/numkernel.hpp"
#include "dsm/random.hpp"

namespace nk = dsm::numkernel;

namespace {

std::vector<double> noise(std::size_t n, std::uint64_t seed) {
  dsm::Rng rng(seed);
  std::vector<double> x(n);
  for (auto& v : x) v = rng.normal();
  return x;
}

void BM_DftDirect(benchmark::State& state) {
  const auto x = noise(static_cast<std::size_t>(state.range(0)), 1);
  for (auto _ : state) benchmark::DoNotOptimize(nk::dft(x, nk::DftMethod::Direct));
}
BENCHMARK(BM_DftDirect)->Arg(20)->Arg(64)->Arg(256);

void BM_DftRadix2(benchmark::State& state) {
  const auto x = noise(static_cast<std::size_t>(state.range(0)), 1);
  for (auto _ : state) benchmark::DoNotOptimize(nk::dft(x, nk::DftMethod::Radix2));
}
BENCHMARK(BM_DftRadix2)->Arg(64)->Arg(256)->Arg(4096);

void BM_FindPeaks(benchmark::State& state) {
  const auto x = noise(static_cast<std::size_t>(state.range(0)), 2);
  for (auto _ : state) benchmark::DoNotOptimize(nk::find_peaks(x));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_FindPeaks)->RangeMultiplier(4)->Range(64, 16384)->Complexity();

void BM_KlDivergence(benchmark::State& state) {
  const auto p = nk::normalize_to_distribution(noise(static_cast<std::size_t>(state.range(0)), 3));
  const auto q = nk::normalize_to_distribution(noise(static_cast<std::size_t>(state.range(0)), 4));
  for (auto _ : state) benchmark::DoNotOptimize(nk::kl_divergence(p, q));
}
BENCHMARK(BM_KlDivergence)->Arg(180)->Arg(4096);

}  // namespace
