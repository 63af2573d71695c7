// Serial reference vs OpenMP kernels. Arg 0 selects the execution mode.

#include <benchmark/benchmark.h>

#include <cmath>
#include <string>
#include <vector>

#include "stylemetric/common.hpp"
#include "stylemetric/kernels.hpp"
#include "stylemetric/synthetic.hpp"

using namespace stylemetric;

namespace {

Execution mode(const benchmark::State& state) {
  return state.range(0) == 0 ? Execution::serial : Execution::parallel;
}

const std::vector<TrajectoryDataset>& datasets() {
  static const auto data = [] {
    const auto spec = separated_styles(5);
    std::vector<TrajectoryDataset> out;
    for (std::size_t i = 0; i < 32; ++i) {
      out.push_back(gen_styled_dataset(spec, i % 5, 2048, 100 + i, "d" + std::to_string(i)));
    }
    return out;
  }();
  return data;
}

const std::vector<MultiscaleIndex>& indices() {
  static const auto idx = build_indices_serial(datasets(), styled_encoders());
  return idx;
}

void BM_BuildIndices(benchmark::State& state) {
  const auto enc = styled_encoders();
  for (auto _ : state) {
    benchmark::DoNotOptimize(build_indices(datasets(), enc, mode(state)));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(datasets().size()));
}

void BM_ComparePairs(benchmark::State& state) {
  std::vector<IndexPair> pairs;
  for (std::size_t i = 0; i < indices().size(); ++i) {
    for (std::size_t j = i + 1; j < indices().size(); ++j) pairs.push_back({i, j});
  }
  for (auto _ : state) {
    benchmark::DoNotOptimize(compare_pairs(indices(), pairs, DistanceMetric::w2, 1, mode(state)));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(pairs.size()));
}

void BM_LabelAgreement(benchmark::State& state) {
  Rng rng(5);
  std::vector<PairObservation> pairs;
  for (std::size_t a = 0; a < 300; ++a) {
    for (std::size_t b = 0; b < 300; ++b) pairs.push_back({a, b, rng.uniform(), 1});
  }
  const WinFunction predict = [](std::size_t a, std::size_t b) {
    return 1.0 / (1.0 + std::exp(std::sin(static_cast<double>(b)) - std::sin(static_cast<double>(a))));
  };
  for (auto _ : state) {
    benchmark::DoNotOptimize(count_label_agreement(pairs, predict, mode(state)));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(pairs.size()));
}

}  // namespace

BENCHMARK(BM_BuildIndices)->ArgName("parallel")->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ComparePairs)->ArgName("parallel")->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_LabelAgreement)->ArgName("parallel")->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
