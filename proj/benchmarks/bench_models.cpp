#include <benchmark/benchmark.h>

#include "dsm/mlharness.hpp"
#include "dsm/project.hpp"
#include "dsm/random.hpp"

namespace ml = dsm::mlharness;

namespace {

struct Data {
  ml::FeatureMatrix x;
  ml::LabelVector y;
};

Data cohort(std::size_t rows, std::size_t cols) {
  dsm::Rng rng(5);
  std::vector<std::string> names, ids;
  for (std::size_t c = 0; c < cols; ++c) names.push_back("f" + std::to_string(c));
  std::vector<double> v;
  ml::LabelVector y;
  for (std::size_t r = 0; r < rows; ++r) {
    ids.push_back("s" + std::to_string(r));
    const int label = static_cast<int>(r % 2);
    y.push_back(label);
    for (std::size_t c = 0; c < cols; ++c) v.push_back(rng.normal() + (c < 3 ? 1.5 * label : 0.0));
  }
  return {{names, ids, v}, y};
}

void BM_Train(benchmark::State& state) {
  const auto kind = static_cast<ml::ModelKind>(state.range(0));
  const auto d = cohort(100, 34);
  const auto spec = ml::ModelSpec::defaults(kind);
  for (auto _ : state) benchmark::DoNotOptimize(ml::train(spec, d.x, d.y));
  state.SetLabel(std::string(ml::kind_name(kind)));
}
BENCHMARK(BM_Train)
    ->Arg(static_cast<int>(ml::ModelKind::Logistic))
    ->Arg(static_cast<int>(ml::ModelKind::LinearSvm))
    ->Arg(static_cast<int>(ml::ModelKind::RandomForest))
    ->Arg(static_cast<int>(ml::ModelKind::GradientBoosting))
    ->Unit(benchmark::kMillisecond);

void BM_CrossValidateForest(benchmark::State& state) {
  const auto d = cohort(100, 34);
  const auto spec = ml::ModelSpec::defaults(ml::ModelKind::RandomForest);
  for (auto _ : state) benchmark::DoNotOptimize(ml::cross_validate(spec, d.x, d.y, 5, 1).mean_accuracy);
}
BENCHMARK(BM_CrossValidateForest)->Unit(benchmark::kMillisecond);

void BM_Tsne(benchmark::State& state) {
  const auto d = cohort(static_cast<std::size_t>(state.range(0)), 34);
  dsm::project::TsneConfig cfg;
  cfg.iterations = 500;
  for (auto _ : state) benchmark::DoNotOptimize(dsm::project::tsne_2d(d.x, cfg));
}
BENCHMARK(BM_Tsne)->Arg(100)->Arg(200)->Unit(benchmark::kMillisecond);

void BM_Pca(benchmark::State& state) {
  const auto d = cohort(100, 34);
  for (auto _ : state) benchmark::DoNotOptimize(dsm::project::pca_2d(d.x));
}
BENCHMARK(BM_Pca)->Unit(benchmark::kMicrosecond);

}  // namespace
