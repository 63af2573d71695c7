#pragma once

// Data-parallel inner loops. Every kernel has a serial reference and an
// OpenMP version; both return identical results because each work item writes
// only its own output slot and reductions run in index order.

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "stylemetric/comparison.hpp"
#include "stylemetric/trajectory.hpp"

namespace stylemetric {

enum class Execution { serial, parallel };

struct IndexPair {
  std::size_t first = 0;
  std::size_t second = 0;
};

std::vector<MultiscaleIndex> build_indices_serial(std::span<const TrajectoryDataset> datasets,
                                                  const EncoderSet& encoders);
std::vector<MultiscaleIndex> build_indices_parallel(std::span<const TrajectoryDataset> datasets,
                                                    const EncoderSet& encoders);
std::vector<MultiscaleIndex> build_indices(std::span<const TrajectoryDataset> datasets,
                                           const EncoderSet& encoders,
                                           Execution exec = Execution::parallel);

std::vector<PairComparison> compare_pairs_serial(std::span<const MultiscaleIndex> items,
                                                 std::span<const IndexPair> pairs,
                                                 DistanceMetric metric, std::size_t threshold);
std::vector<PairComparison> compare_pairs_parallel(std::span<const MultiscaleIndex> items,
                                                   std::span<const IndexPair> pairs,
                                                   DistanceMetric metric, std::size_t threshold);
std::vector<PairComparison> compare_pairs(std::span<const MultiscaleIndex> items,
                                          std::span<const IndexPair> pairs, DistanceMetric metric,
                                          std::size_t threshold,
                                          Execution exec = Execution::parallel);

// Three-way strength relation of an (observed or predicted) win value.
enum class StrengthLabel : int { weaker = -1, equal = 0, stronger = 1 };

inline constexpr double kStrongerAbove = 0.501;
inline constexpr double kWeakerBelow = 0.499;

inline StrengthLabel strength_label(double win_value) {
  if (win_value > kStrongerAbove) return StrengthLabel::stronger;
  if (win_value < kWeakerBelow) return StrengthLabel::weaker;
  return StrengthLabel::equal;
}

// Ordered composition pair with its mean observed win value.
struct PairObservation {
  std::size_t a = 0;
  std::size_t b = 0;
  double mean = 0.5;
  std::size_t count = 0;
};

// Must be safe to call concurrently.
using WinFunction = std::function<double(std::size_t, std::size_t)>;

std::size_t count_label_agreement_serial(std::span<const PairObservation> pairs,
                                         const WinFunction& predict);
std::size_t count_label_agreement_parallel(std::span<const PairObservation> pairs,
                                           const WinFunction& predict);
std::size_t count_label_agreement(std::span<const PairObservation> pairs,
                                  const WinFunction& predict,
                                  Execution exec = Execution::parallel);

}  // namespace stylemetric
