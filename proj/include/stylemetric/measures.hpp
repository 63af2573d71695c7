#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "stylemetric/comparison.hpp"
#include "stylemetric/distances.hpp"
#include "stylemetric/kernels.hpp"
#include "stylemetric/trajectory.hpp"

namespace stylemetric {

enum class Averaging { uniform, expected };

// distance: multiscale Playstyle Distance (lower is closer).
// intersection: perceptual similarity averaged over intersected states.
// jaccard: multiscale intersection over union of visited states.
// similarity: Playstyle Similarity, the Jaccard-weighted intersection measure.
enum class Measure { distance, intersection, jaccard, similarity };

Measure parse_measure(std::string_view name);
std::string_view measure_name(Measure measure);
Averaging parse_averaging(std::string_view name);
std::string_view averaging_name(Averaging averaging);

inline bool higher_is_closer(Measure m) { return m != Measure::distance; }

struct MeasureConfig {
  EncoderSet encoders;
  std::size_t threshold = 1;             // visit threshold for the distance
  std::size_t similarity_threshold = 1;  // visit threshold for the similarity family
  DistanceMetric metric = DistanceMetric::w2;
  Averaging averaging = Averaging::expected;
  std::optional<double> fixed_scale;  // kernel scaling constant; batch mean when unset
  bool keep_details = false;

  void validate() const;
  std::size_t threshold_for(Measure m) const {
    return m == Measure::distance ? threshold : similarity_threshold;
  }
};

struct StateDetail {
  std::string encoder_id;
  std::string key;
  double local = 0.0;   // raw metric value at the state
  double weight = 0.0;  // share of the final value carried by this state
};

struct ComparisonResult {
  double value = 0.0;
  bool comparable = true;  // false when a distance has no shared context
  std::size_t intersected = 0;
  std::size_t union_count = 0;
  std::vector<StateDetail> details;
};

double perceptual_kernel(double d);

// Similarity contributed by one intersected state. BC values pass through, BD
// goes through the kernel unscaled, every other metric is divided by `scale`.
double kernel_value(DistanceMetric metric, double local, double scale);

// Mean of every per-state value in the batch, pooled over encoders and pairs.
// Returns 1 for BC/BD (never rescaled) and whenever the mean is not positive.
double batch_scale(std::span<const PairComparison> batch, DistanceMetric metric);

// Reductions of one pair comparison. The comparison must have been built with
// the threshold that cfg.threshold_for(measure) names.
ComparisonResult distance_from(const PairComparison& pc, const MeasureConfig& cfg);
ComparisonResult intersection_from(const PairComparison& pc, const MeasureConfig& cfg,
                                   double scale);
ComparisonResult jaccard_from(const PairComparison& pc, const MeasureConfig& cfg);
ComparisonResult similarity_from(const PairComparison& pc, const MeasureConfig& cfg,
                                 double scale);
ComparisonResult evaluate(Measure measure, const PairComparison& pc, const MeasureConfig& cfg,
                          double scale);

// Evaluates `measure` over every pair in one batch sharing a single kernel
// scale. Pairs without shared context come back with comparable = false
// instead of throwing.
std::vector<ComparisonResult> evaluate_batch(std::span<const MultiscaleIndex> items,
                                             std::span<const IndexPair> pairs, Measure measure,
                                             const MeasureConfig& cfg,
                                             Execution exec = Execution::parallel);

ComparisonResult playstyle_distance(const TrajectoryDataset& a, const TrajectoryDataset& b,
                                    const MeasureConfig& cfg);
ComparisonResult intersection_similarity(const TrajectoryDataset& a, const TrajectoryDataset& b,
                                         const MeasureConfig& cfg);
ComparisonResult jaccard_index(const TrajectoryDataset& a, const TrajectoryDataset& b,
                               const MeasureConfig& cfg);
ComparisonResult playstyle_similarity(const TrajectoryDataset& a, const TrajectoryDataset& b,
                                      const MeasureConfig& cfg);
ComparisonResult measure_pair(Measure measure, const TrajectoryDataset& a,
                              const TrajectoryDataset& b, const MeasureConfig& cfg);

// Index of the first candidate that breaks the strict trend (similarities
// strictly decreasing, distances strictly increasing), or nullopt.
std::optional<std::size_t> spectrum_consistency(std::span<const double> values,
                                                bool higher_is_closer);
std::optional<std::size_t> spectrum_consistency(const TrajectoryDataset& query,
                                                std::span<const TrajectoryDataset> ordered,
                                                Measure measure, const MeasureConfig& cfg);

}  // namespace stylemetric
