#include <benchmark/benchmark.h>

#include "tdet/metrics.hpp"
#include "tdet/nms.hpp"
#include "tdet/postprocess.hpp"
#include "tdet/rng.hpp"

namespace {

std::vector<tdet::SpotPrediction> random_spots(int n, tdet::Rng& rng) {
  std::vector<tdet::SpotPrediction> out;
  for (int i = 0; i < n; ++i) {
    out.push_back({"g", static_cast<int>(rng.uniform_int(1, 2)), static_cast<int>(rng.uniform_int(0, 2700)),
                   static_cast<int>(rng.uniform_int(0, 16)), rng.uniform()});
  }
  return out;
}

void BM_Nms1d(benchmark::State& state) {
  tdet::Rng rng(3);
  const auto preds = random_spots(static_cast<int>(state.range(0)), rng);
  for (auto _ : state) benchmark::DoNotOptimize(tdet::nms_1d(preds, 20));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Nms1d)->Arg(1000)->Arg(20000);

void BM_MergeNms(benchmark::State& state) {
  tdet::Rng rng(4);
  std::vector<tdet::GroundingPrediction> a, b;
  for (int i = 0; i < state.range(0); ++i) {
    a.push_back({"g", 1, static_cast<int>(rng.uniform_int(0, 2700)), rng.uniform()});
    b.push_back({"g", 1, static_cast<int>(rng.uniform_int(0, 2700)), rng.uniform()});
  }
  for (auto _ : state) benchmark::DoNotOptimize(tdet::merge_nms(a, b, 25));
}
BENCHMARK(BM_MergeNms)->Arg(100)->Arg(2000);

void BM_AverageMap(benchmark::State& state) {
  tdet::Rng rng(5);
  const auto preds = random_spots(static_cast<int>(state.range(0)), rng);
  std::vector<tdet::EventAnnotation> gts;
  for (int i = 0; i < state.range(0) / 4; ++i) {
    gts.push_back({"g", static_cast<int>(rng.uniform_int(1, 2)), static_cast<int>(rng.uniform_int(0, 2700)), "",
                   static_cast<int>(rng.uniform_int(0, 16))});
  }
  for (auto _ : state) benchmark::DoNotOptimize(tdet::average_map(preds, gts));
}
BENCHMARK(BM_AverageMap)->Arg(1000)->Arg(10000);

}  // namespace
