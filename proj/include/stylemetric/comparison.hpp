#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "stylemetric/distances.hpp"
#include "stylemetric/trajectory.hpp"

namespace stylemetric {

// Local comparison at one intersected state.
struct StateComparison {
  std::string key;
  double value = 0.0;  // metric value; for BC this is the coefficient
  std::size_t visits_a = 0;
  std::size_t visits_b = 0;
};

struct EncoderComparison {
  std::string encoder_id;
  std::vector<StateComparison> states;  // filtered intersection, key order
  std::size_t intersected = 0;          // unfiltered |phi(A) n phi(B)|
  std::size_t union_count = 0;          // |phi(A) u phi(B)|
};

// Everything the measures need from one (A, B) pair, for one metric and one
// visit threshold. Reductions to a scalar happen in measures.hpp.
struct PairComparison {
  std::vector<EncoderComparison> encoders;

  std::size_t compared_states() const;
  std::size_t intersected() const;
  std::size_t union_count() const;
};

PairComparison compare_pair(const MultiscaleIndex& a, const MultiscaleIndex& b,
                            DistanceMetric metric, std::size_t threshold);

}  // namespace stylemetric
