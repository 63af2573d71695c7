#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "stylemetric/measures.hpp"
#include "stylemetric/trajectory.hpp"

namespace stylemetric {

inline constexpr double kDefaultDiversityThreshold = 0.2;

struct DiversityConfig {
  double threshold = kDefaultDiversityThreshold;
  MeasureConfig measure;
  std::optional<std::size_t> max_trajectories;  // first N only

  void validate() const;
};

struct DiversityResult {
  std::size_t diverse = 0;
  std::size_t total = 0;
  std::vector<bool> verdicts;  // true where the trajectory counted as diverse
};

// The counting loop on its own: trajectory i is diverse when sim(i, j) < t for
// every earlier j. Every trajectory joins the store.
DiversityResult count_diverse(std::size_t n, const std::function<double(std::size_t, std::size_t)>& sim,
                              double threshold);

// Lower-triangle Playstyle Similarity matrix, row-major over pairs (i, j)
// with j < i, all sharing one kernel scale.
std::vector<double> similarity_lower_triangle(std::span<const MultiscaleIndex> items,
                                              const MeasureConfig& cfg,
                                              Execution exec = Execution::parallel);

inline std::size_t lower_triangle_slot(std::size_t i, std::size_t j) { return i * (i - 1) / 2 + j; }

DiversityResult diverse_trajectory_count(std::span<const TrajectoryDataset> trajectories,
                                         const DiversityConfig& cfg,
                                         Execution exec = Execution::parallel);

// One single-episode dataset per episode, ids suffixed with the episode id.
std::vector<TrajectoryDataset> split_episodes(const TrajectoryDataset& dataset);

}  // namespace stylemetric
