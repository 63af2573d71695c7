#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "stylemetric/trajectory.hpp"

namespace stylemetric {

enum class DistanceMetric { w1, w2, kl, mkl, bc, bd };

DistanceMetric parse_metric(std::string_view name);
std::string_view metric_name(DistanceMetric metric);

inline constexpr double kKlSmoothing = 1e-6;
inline constexpr double kCovarianceFloor = 1e-6;
inline constexpr double kBhattacharyyaClip = 10.0;
inline constexpr double kDeterminantEpsilon = 1e-8;

// Empirical action distribution at one state. Categorical distributions carry
// normalized counts; Gaussian summaries carry the sample mean and a
// floor-regularized covariance (row-major, dim x dim).
struct ActionDistribution {
  enum class Kind { categorical, gaussian };

  Kind kind = Kind::categorical;
  std::vector<double> probs;
  std::vector<double> mean;
  std::vector<double> cov;
  std::size_t samples = 0;

  std::size_t dim() const { return kind == Kind::categorical ? probs.size() : mean.size(); }

  static ActionDistribution categorical(std::vector<double> probs, std::size_t samples = 0);
  static ActionDistribution gaussian(std::vector<double> mean, std::vector<double> cov,
                                     std::size_t samples = 0);
};

ActionDistribution empirical_policy(std::span<const ActionValue> records,
                                    const ActionSpace& space);

// W1/W2 use the 0/1 ground metric over action indices, so W1 is the total
// variation distance and W2 its square root. KL smooths every cell by
// kKlSmoothing; BD is clipped at kBhattacharyyaClip. BC is a similarity.
double categorical_distance(DistanceMetric metric, const ActionDistribution& p,
                            const ActionDistribution& q);

// Metrics W2, BD and BC over Gaussian summaries.
double gaussian_distance(DistanceMetric metric, const ActionDistribution& p,
                         const ActionDistribution& q);

// Dispatches on the distribution kind.
double action_distance(DistanceMetric metric, const ActionDistribution& p,
                       const ActionDistribution& q);

}  // namespace stylemetric
