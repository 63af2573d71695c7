#include "stylemetric/diversity.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "stylemetric/common.hpp"

namespace stylemetric {

void DiversityConfig::validate() const {
  if (!(threshold >= 0.0) || !std::isfinite(threshold)) {
    throw InvalidArgument("diversity threshold must be a finite value >= 0");
  }
  if (max_trajectories && *max_trajectories < 1) {
    throw InvalidArgument("max trajectories must be >= 1");
  }
  measure.validate();
}

DiversityResult count_diverse(std::size_t n, const std::function<double(std::size_t, std::size_t)>& sim,
                              double threshold) {
  if (n == 0) throw InvalidArgument("diversity: no trajectories");
  DiversityResult r;
  r.total = n;
  r.verdicts.assign(n, false);
  for (std::size_t i = 0; i < n; ++i) {
    bool diverse = true;
    for (std::size_t j = 0; j < i && diverse; ++j) {
      if (sim(i, j) >= threshold) diverse = false;
    }
    r.verdicts[i] = diverse;
    if (diverse) ++r.diverse;
  }
  return r;
}

std::vector<double> similarity_lower_triangle(std::span<const MultiscaleIndex> items,
                                              const MeasureConfig& cfg, Execution exec) {
  std::vector<IndexPair> pairs;
  if (!items.empty()) pairs.reserve(items.size() * (items.size() - 1) / 2);
  for (std::size_t i = 1; i < items.size(); ++i) {
    for (std::size_t j = 0; j < i; ++j) pairs.push_back({i, j});
  }
  const auto results = evaluate_batch(items, pairs, Measure::similarity, cfg, exec);
  std::vector<double> out;
  out.reserve(results.size());
  for (const auto& r : results) out.push_back(r.value);
  return out;
}

DiversityResult diverse_trajectory_count(std::span<const TrajectoryDataset> trajectories,
                                         const DiversityConfig& cfg, Execution exec) {
  cfg.validate();
  if (trajectories.empty()) throw InvalidArgument("diversity: no trajectories");
  const std::size_t n = cfg.max_trajectories
                            ? std::min(*cfg.max_trajectories, trajectories.size())
                            : trajectories.size();
  const auto used = trajectories.first(n);
  for (const auto& t : used) {
    if (!(t.action_space == used.front().action_space)) {
      throw InvalidArgument("diversity: trajectories declare different action spaces");
    }
  }
  const auto items = build_indices(used, cfg.measure.encoders, exec);
  const auto sims = similarity_lower_triangle(items, cfg.measure, exec);
  return count_diverse(
      n, [&](std::size_t i, std::size_t j) { return sims[lower_triangle_slot(i, j)]; },
      cfg.threshold);
}

std::vector<TrajectoryDataset> split_episodes(const TrajectoryDataset& dataset) {
  std::vector<TrajectoryDataset> out;
  out.reserve(dataset.episodes.size());
  for (const auto& ep : dataset.episodes) {
    if (ep.steps.empty()) continue;
    TrajectoryDataset one;
    one.id = dataset.id + "#" + std::to_string(ep.id);
    one.action_space = dataset.action_space;
    one.episodes.push_back(ep);
    out.push_back(std::move(one));
  }
  return out;
}

}  // namespace stylemetric
