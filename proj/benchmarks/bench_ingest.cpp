#include <benchmark/benchmark.h>

#include "bench_common.hpp"
#include "defectscope/ingest.hpp"

namespace {

void BM_ExtractComponents(benchmark::State& state) {
  const int size = static_cast<int>(state.range(0));
  const dscope::MaskImage mask = dscope::bench::blob_mask(size, 6, 42);
  for (auto _ : state) {
    auto components = dscope::extract_components(mask);
    benchmark::DoNotOptimize(components);
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(size) * size);
}
BENCHMARK(BM_ExtractComponents)->Arg(128)->Arg(256)->Arg(512);

void BM_MatchPredictions(benchmark::State& state) {
  const int size = static_cast<int>(state.range(0));
  const dscope::MaskImage gt_mask = dscope::bench::blob_mask(size, 8, 1);
  const dscope::MaskImage pred_mask = dscope::bench::blob_mask(size, 8, 2);
  auto gt = dscope::extract_components(gt_mask);
  dscope::assign_defect_ids(gt, "bench");
  auto pred = dscope::extract_components(pred_mask);
  dscope::assign_defect_ids(pred, "bench");
  for (auto _ : state) {
    auto matches = dscope::match_predictions(gt, pred, 0.5);
    benchmark::DoNotOptimize(matches);
  }
}
BENCHMARK(BM_MatchPredictions)->Arg(256);

}  // namespace
