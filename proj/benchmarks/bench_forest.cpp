#include <benchmark/benchmark.h>

#include "bench_common.hpp"
#include "defectscope/analysis.hpp"
#include "defectscope/forest.hpp"
#include "defectscope/rng.hpp"

namespace {

std::vector<std::uint8_t> noisy_target(const dscope::DCMatrix& matrix) {
  // Label from one column plus noise so trees grow to realistic depth.
  dscope::Rng rng(99);
  std::vector<std::uint8_t> target(matrix.rows.size());
  for (std::size_t i = 0; i < target.size(); ++i) {
    const bool base = matrix.rows[i][4] > 0.6;
    target[i] = (rng.unit() < 0.1 ? !base : base) ? 1 : 0;
  }
  return target;
}

void BM_PlantForest(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const dscope::DCMatrix matrix = dscope::bench::noise_matrix(n, 5);
  const auto target = noisy_target(matrix);
  dscope::ForestConfig config;
  config.n_tree = static_cast<int>(state.range(1));
  for (auto _ : state) {
    auto forest = dscope::plant_forest(matrix, target, config, 1);
    benchmark::DoNotOptimize(forest);
  }
}
BENCHMARK(BM_PlantForest)->Args({200, 50})->Args({400, 50})->Args({400, 200});

void BM_ClimbAndAnalyse(benchmark::State& state) {
  const dscope::DCMatrix matrix = dscope::bench::noise_matrix(300, 6);
  const auto target = noisy_target(matrix);
  dscope::ForestConfig config;
  config.n_tree = 100;
  const dscope::Forest forest = dscope::plant_forest(matrix, target, config, 1);
  const std::vector<std::string> names(dscope::feature_names().begin(),
                                       dscope::feature_names().end());
  for (auto _ : state) {
    auto climb = dscope::climb_forest(forest, names);
    auto analysed = dscope::analyse_forest(climb, {});
    benchmark::DoNotOptimize(analysed);
  }
}
BENCHMARK(BM_ClimbAndAnalyse);

}  // namespace
