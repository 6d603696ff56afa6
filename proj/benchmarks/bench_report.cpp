#include <benchmark/benchmark.h>

#include "defectscope/report.hpp"

namespace {

void BM_RenderDcChart(benchmark::State& state) {
  const std::vector<std::pair<double, double>> failure = {{0.1, 0.2}, {0.55, 0.7}};
  const std::vector<std::pair<double, double>> success = {{0.3, 0.45}};
  for (auto _ : state) {
    auto svg = dscope::render_dc_chart("area_ratio", 0.312, failure, success, {0.0, 1.0});
    benchmark::DoNotOptimize(svg);
  }
}
BENCHMARK(BM_RenderDcChart);

}  // namespace
