#include <benchmark/benchmark.h>

#include "bench_common.hpp"
#include "defectscope/features.hpp"
#include "defectscope/ingest.hpp"

namespace {

void BM_ExtractDC(benchmark::State& state) {
  const int size = static_cast<int>(state.range(0));
  const dscope::MaskImage mask = dscope::bench::blob_mask(size, 3, 7);
  auto instances = dscope::extract_components(mask);
  dscope::assign_defect_ids(instances, "bench");
  const dscope::RgbImage image = dscope::bench::noise_image(size, 8);
  for (auto _ : state) {
    for (const auto& defect : instances) {
      auto dc = dscope::extract_dc(image, defect);
      benchmark::DoNotOptimize(dc);
    }
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(instances.size()));
}
BENCHMARK(BM_ExtractDC)->Arg(128)->Arg(256)->Arg(512);

}  // namespace
