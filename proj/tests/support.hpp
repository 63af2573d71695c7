#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "stylemetric/common.hpp"
#include "stylemetric/trajectory.hpp"

namespace stylemetric::testing {

// (state, action) steps in one episode, with the state as a 1-d vector.
inline TrajectoryDataset steps_dataset(std::string id, std::size_t actions,
                                       const std::vector<std::pair<int, int>>& steps) {
  TrajectoryDataset ds;
  ds.id = std::move(id);
  ds.action_space = ActionSpace::discrete(actions);
  Episode ep;
  for (auto [s, a] : steps) {
    ep.steps.push_back({VectorObs{{static_cast<double>(s)}},
                        ActionValue::discrete(static_cast<std::size_t>(a))});
  }
  ds.episodes.push_back(std::move(ep));
  return ds;
}

// Random discrete dataset. Each state has its own random action preference so
// that two draws with different seeds differ in style.
inline TrajectoryDataset random_dataset(Rng& rng, std::string id, std::size_t states,
                                        std::size_t actions, std::size_t pairs) {
  std::vector<std::vector<double>> cum(states);
  for (auto& row : cum) {
    double acc = 0.0;
    std::vector<double> w(actions);
    for (double& x : w) {
      x = 0.05 + rng.uniform();
      acc += x;
    }
    double run = 0.0;
    for (double x : w) row.push_back(run += x / acc);
  }
  std::vector<std::pair<int, int>> steps;
  for (std::size_t i = 0; i < pairs; ++i) {
    const std::size_t s = rng.below(states);
    const double u = rng.uniform();
    std::size_t a = 0;
    while (a + 1 < actions && u >= cum[s][a]) ++a;
    steps.emplace_back(static_cast<int>(s), static_cast<int>(a));
  }
  return steps_dataset(std::move(id), actions, steps);
}

// Probability vector with a common denominator `n`, support size `k`.
inline std::vector<std::size_t> random_counts(Rng& rng, std::size_t k, std::size_t n) {
  std::vector<std::size_t> c(k, 0);
  for (std::size_t i = 0; i < n; ++i) ++c[rng.below(k)];
  return c;
}

// Exhaustive transport between two empirical distributions with n unit
// masses each: every bijection between the units of p and the units of q is a
// transport plan, and the optimum of the transport LP over integral masses is
// attained at one of them. Cost is 0 for the same action, 1 otherwise.
inline double brute_force_w1(const std::vector<std::size_t>& cp, const std::vector<std::size_t>& cq) {
  std::vector<std::size_t> units_p;
  std::vector<std::size_t> units_q;
  for (std::size_t a = 0; a < cp.size(); ++a) units_p.insert(units_p.end(), cp[a], a);
  for (std::size_t a = 0; a < cq.size(); ++a) units_q.insert(units_q.end(), cq[a], a);
  const std::size_t n = units_p.size();
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  std::size_t best = n;
  do {
    std::size_t cost = 0;
    for (std::size_t i = 0; i < n; ++i) cost += units_p[i] != units_q[perm[i]] ? 1 : 0;
    best = std::min(best, cost);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return static_cast<double>(best) / static_cast<double>(n);
}

}  // namespace stylemetric::testing
