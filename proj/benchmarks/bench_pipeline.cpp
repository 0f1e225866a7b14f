#include <benchmark/benchmark.h>

#include "dsm/dsmetric.hpp"
#include "dsm/synthsig.hpp"

namespace dm = dsm::dsmetric;
namespace ss = dsm::synthsig;

namespace {

dsm::numkernel::RealSeries series(ss::SignalKind kind, std::size_t length) {
  ss::GeneratorSpec spec;
  spec.kind = kind;
  spec.length = length;
  spec.seed = 11;
  return ss::generate(spec);
}

// Full DS for one series, dominated by autoencoder training.
void BM_ComputeDs(benchmark::State& state) {
  const auto x = series(ss::SignalKind::WhiteNoise, static_cast<std::size_t>(state.range(0)));
  const dm::DsConfig cfg;
  for (auto _ : state) benchmark::DoNotOptimize(dm::compute_ds(x, cfg).ds);
}
BENCHMARK(BM_ComputeDs)->Arg(150)->Arg(200)->Arg(400)->Unit(benchmark::kMillisecond);

// Everything after the dissimilarity curve.
void BM_DsFromCurve(benchmark::State& state) {
  const auto x = series(ss::SignalKind::Ar1, 200);
  const dm::DsConfig cfg;
  const auto d = dm::learn_dissimilarity(x.values(), cfg);
  for (auto _ : state) benchmark::DoNotOptimize(dm::ds_from_curve(x.values(), d.values, cfg.windowing, cfg.grid).ds);
}
BENCHMARK(BM_DsFromCurve)->Unit(benchmark::kMicrosecond);

}  // namespace
