#include "stylemetric/kernels.hpp"

#include <cstdint>
#include <exception>

#include "stylemetric/common.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace stylemetric {

namespace {

// Runs body(i) for i in [0, n) across the worker pool. The exception from the
// lowest failing index is rethrown after the loop.
template <typename Body>
void parallel_for(std::size_t n, Body&& body) {
  std::vector<std::exception_ptr> errors(n);
  const auto count = static_cast<std::int64_t>(n);
#pragma omp parallel for schedule(dynamic) num_threads(worker_count())
  for (std::int64_t i = 0; i < count; ++i) {
    try {
      body(static_cast<std::size_t>(i));
    } catch (...) {
      errors[static_cast<std::size_t>(i)] = std::current_exception();
    }
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

void check_pairs(std::span<const MultiscaleIndex> items, std::span<const IndexPair> pairs) {
  for (const auto& p : pairs) {
    if (p.first >= items.size() || p.second >= items.size()) {
      throw InvalidArgument("pair index out of range");
    }
  }
}

}  // namespace

std::vector<MultiscaleIndex> build_indices_serial(std::span<const TrajectoryDataset> datasets,
                                                  const EncoderSet& encoders) {
  std::vector<MultiscaleIndex> out;
  out.reserve(datasets.size());
  for (const auto& ds : datasets) out.push_back(build_multiscale_index(ds, encoders));
  return out;
}

std::vector<MultiscaleIndex> build_indices_parallel(std::span<const TrajectoryDataset> datasets,
                                                    const EncoderSet& encoders) {
  validate_encoder_set(encoders);
  const std::size_t k = encoders.size();
  std::vector<MultiscaleIndex> out(datasets.size());
  for (auto& m : out) m.reserve(k);
  // One work item per (dataset, encoder); slots are filled afterwards in order.
  std::vector<std::vector<ScaledStateIndex>> built(datasets.size() * k);
  parallel_for(datasets.size() * k, [&](std::size_t item) {
    built[item].push_back(build_state_index(datasets[item / k], encoders[item % k]));
  });
  for (std::size_t item = 0; item < built.size(); ++item) {
    out[item / k].push_back(std::move(built[item].front()));
  }
  return out;
}

std::vector<MultiscaleIndex> build_indices(std::span<const TrajectoryDataset> datasets,
                                           const EncoderSet& encoders, Execution exec) {
  return exec == Execution::serial ? build_indices_serial(datasets, encoders)
                                   : build_indices_parallel(datasets, encoders);
}

std::vector<PairComparison> compare_pairs_serial(std::span<const MultiscaleIndex> items,
                                                 std::span<const IndexPair> pairs,
                                                 DistanceMetric metric, std::size_t threshold) {
  check_pairs(items, pairs);
  std::vector<PairComparison> out;
  out.reserve(pairs.size());
  for (const auto& p : pairs) {
    out.push_back(compare_pair(items[p.first], items[p.second], metric, threshold));
  }
  return out;
}

std::vector<PairComparison> compare_pairs_parallel(std::span<const MultiscaleIndex> items,
                                                   std::span<const IndexPair> pairs,
                                                   DistanceMetric metric, std::size_t threshold) {
  check_pairs(items, pairs);
  std::vector<PairComparison> out(pairs.size());
  parallel_for(pairs.size(), [&](std::size_t i) {
    out[i] = compare_pair(items[pairs[i].first], items[pairs[i].second], metric, threshold);
  });
  return out;
}

std::vector<PairComparison> compare_pairs(std::span<const MultiscaleIndex> items,
                                          std::span<const IndexPair> pairs, DistanceMetric metric,
                                          std::size_t threshold, Execution exec) {
  return exec == Execution::serial ? compare_pairs_serial(items, pairs, metric, threshold)
                                   : compare_pairs_parallel(items, pairs, metric, threshold);
}

std::size_t count_label_agreement_serial(std::span<const PairObservation> pairs,
                                         const WinFunction& predict) {
  std::size_t correct = 0;
  for (const auto& p : pairs) {
    if (strength_label(predict(p.a, p.b)) == strength_label(p.mean)) ++correct;
  }
  return correct;
}

std::size_t count_label_agreement_parallel(std::span<const PairObservation> pairs,
                                           const WinFunction& predict) {
  std::vector<unsigned char> hit(pairs.size(), 0);
  parallel_for(pairs.size(), [&](std::size_t i) {
    const auto& p = pairs[i];
    hit[i] = strength_label(predict(p.a, p.b)) == strength_label(p.mean) ? 1 : 0;
  });
  std::size_t correct = 0;
  for (auto h : hit) correct += h;
  return correct;
}

std::size_t count_label_agreement(std::span<const PairObservation> pairs,
                                  const WinFunction& predict, Execution exec) {
  return exec == Execution::serial ? count_label_agreement_serial(pairs, predict)
                                   : count_label_agreement_parallel(pairs, predict);
}

}  // namespace stylemetric
