#include <doctest.h>

#include <cmath>
#include <numeric>

#include "stylemetric/common.hpp"
#include "stylemetric/distances.hpp"
#include "support.hpp"

using namespace stylemetric;
using stylemetric::testing::brute_force_w1;
using stylemetric::testing::random_counts;

namespace {

ActionDistribution cat(std::vector<double> p) { return ActionDistribution::categorical(std::move(p)); }

ActionDistribution from_counts(const std::vector<std::size_t>& c) {
  const double n = static_cast<double>(std::accumulate(c.begin(), c.end(), std::size_t{0}));
  std::vector<double> p;
  for (auto x : c) p.push_back(static_cast<double>(x) / n);
  return cat(p);
}

}  // namespace

TEST_CASE("identical distributions") {
  const auto p = cat({0.2, 0.3, 0.5});
  for (auto m : {DistanceMetric::w1, DistanceMetric::w2, DistanceMetric::kl, DistanceMetric::mkl,
                 DistanceMetric::bd}) {
    CHECK(categorical_distance(m, p, p) == doctest::Approx(0.0).epsilon(1e-12));
  }
  CHECK(categorical_distance(DistanceMetric::bc, p, p) == doctest::Approx(1.0));
}

TEST_CASE("one-hot opposites") {
  const auto p = cat({1.0, 0.0});
  const auto q = cat({0.0, 1.0});
  CHECK(categorical_distance(DistanceMetric::w1, p, q) == 1.0);
  CHECK(categorical_distance(DistanceMetric::w2, p, q) == 1.0);
  CHECK(categorical_distance(DistanceMetric::bc, p, q) == 0.0);
  CHECK(categorical_distance(DistanceMetric::bd, p, q) == kBhattacharyyaClip);
  CHECK(brute_force_w1({1, 0}, {0, 1}) == 1.0);
}

TEST_CASE("W2 is the square root of total variation") {
  const auto p = cat({0.75, 0.25});
  const auto q = cat({0.25, 0.75});
  CHECK(categorical_distance(DistanceMetric::w1, p, q) == doctest::Approx(0.5));
  CHECK(categorical_distance(DistanceMetric::w2, p, q) == doctest::Approx(std::sqrt(0.5)));
}

TEST_CASE("KL smoothing keeps disjoint supports finite and asymmetric") {
  const auto p = cat({1.0, 0.0, 0.0});
  const auto q = cat({0.5, 0.5, 0.0});
  const double pq = categorical_distance(DistanceMetric::kl, p, q);
  const double qp = categorical_distance(DistanceMetric::kl, q, p);
  CHECK(std::isfinite(qp));
  CHECK(pq == doctest::Approx(std::log(2.0)).epsilon(1e-4));
  CHECK(pq != doctest::Approx(qp));
  CHECK(categorical_distance(DistanceMetric::mkl, p, q) == doctest::Approx(0.5 * (pq + qp)));
}

TEST_CASE("categorical errors") {
  CHECK_THROWS_AS(categorical_distance(DistanceMetric::w1, cat({1.0}), cat({0.5, 0.5})),
                  InvalidArgument);
  CHECK_THROWS_AS(ActionDistribution::categorical({0.5, 0.6}), InvalidArgument);
  const auto g = ActionDistribution::gaussian({0.0}, {1.0});
  CHECK_THROWS_AS(categorical_distance(DistanceMetric::w1, g, g), InvalidArgument);
}

TEST_CASE("empirical policy") {
  const std::vector<ActionValue> r1{ActionValue::discrete(0), ActionValue::discrete(0),
                                    ActionValue::discrete(1), ActionValue::discrete(1)};
  CHECK(empirical_policy(r1, ActionSpace::discrete(2)).probs == std::vector<double>{0.5, 0.5});
  const std::vector<ActionValue> r2{ActionValue::discrete(0), ActionValue::discrete(0),
                                    ActionValue::discrete(0), ActionValue::discrete(1)};
  CHECK(empirical_policy(r2, ActionSpace::discrete(2)).probs == std::vector<double>{0.75, 0.25});

  const std::vector<ActionValue> one{ActionValue::continuous({1.5, -2.0})};
  const auto g = empirical_policy(one, ActionSpace::continuous(2));
  CHECK(g.mean == std::vector<double>{1.5, -2.0});
  CHECK(g.cov == std::vector<double>{kCovarianceFloor, 0.0, 0.0, kCovarianceFloor});
  CHECK_THROWS_AS(empirical_policy({}, ActionSpace::discrete(2)), InvalidArgument);
}

TEST_CASE("gaussian examples") {
  const auto g = ActionDistribution::gaussian({0.5, 1.0}, {2.0, 0.3, 0.3, 1.0});
  CHECK(gaussian_distance(DistanceMetric::w2, g, g) == doctest::Approx(0.0).epsilon(1e-7));
  CHECK(gaussian_distance(DistanceMetric::bd, g, g) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(gaussian_distance(DistanceMetric::bc, g, g) == doctest::Approx(1.0));

  // Identity covariances, means d apart: BD = d^2/8.
  for (double d : {0.5, 1.0, 3.0}) {
    const auto a = ActionDistribution::gaussian({0.0, 0.0}, {1.0, 0.0, 0.0, 1.0});
    const auto b = ActionDistribution::gaussian({d, 0.0}, {1.0, 0.0, 0.0, 1.0});
    CHECK(gaussian_distance(DistanceMetric::bd, a, b) == doctest::Approx(d * d / 8.0).epsilon(1e-9));
    CHECK(gaussian_distance(DistanceMetric::w2, a, b) == doctest::Approx(d).epsilon(1e-9));
  }

  // Degenerate covariance goes through the determinant guard.
  const auto s1 = ActionDistribution::gaussian({0.0, 0.0}, {1.0, 1.0, 1.0, 1.0});
  const auto s2 = ActionDistribution::gaussian({0.1, 0.0}, {1.0, 0.0, 0.0, 0.0});
  const double bd = gaussian_distance(DistanceMetric::bd, s1, s2);
  CHECK(std::isfinite(bd));
  CHECK(bd >= 0.0);
  CHECK(bd <= kBhattacharyyaClip);

  CHECK_THROWS_AS(gaussian_distance(DistanceMetric::kl, g, g), InvalidArgument);
  const auto bad = ActionDistribution::gaussian({0.0, 0.0}, {1.0, 0.0, 0.0, -1.0});
  CHECK_THROWS_AS(gaussian_distance(DistanceMetric::w2, bad, bad), InvalidArgument);
  const auto one_d = ActionDistribution::gaussian({0.0}, {1.0});
  CHECK_THROWS_AS(gaussian_distance(DistanceMetric::w2, g, one_d), InvalidArgument);
}

TEST_CASE("property: W1 equals exhaustive transport on supports up to 4") {
  Rng rng(21);
  for (int round = 0; round < 300; ++round) {
    const std::size_t k = 1 + rng.below(4);
    const std::size_t n = 1 + rng.below(7);
    const auto cp = random_counts(rng, k, n);
    const auto cq = random_counts(rng, k, n);
    const double w1 = categorical_distance(DistanceMetric::w1, from_counts(cp), from_counts(cq));
    CHECK(w1 == doctest::Approx(brute_force_w1(cp, cq)).epsilon(1e-9));
  }
}

TEST_CASE("property: symmetry, bounds and BC/BD duality") {
  Rng rng(22);
  for (int round = 0; round < 300; ++round) {
    const std::size_t k = 2 + rng.below(5);
    const auto p = from_counts(random_counts(rng, k, 1 + rng.below(20)));
    const auto q = from_counts(random_counts(rng, k, 1 + rng.below(20)));
    for (auto m : {DistanceMetric::w1, DistanceMetric::w2, DistanceMetric::mkl, DistanceMetric::bc,
                   DistanceMetric::bd}) {
      CHECK(categorical_distance(m, p, q) == doctest::Approx(categorical_distance(m, q, p)).epsilon(1e-12));
    }
    const double bc = categorical_distance(DistanceMetric::bc, p, q);
    const double bd = categorical_distance(DistanceMetric::bd, p, q);
    CHECK(bc >= 0.0);
    CHECK(bc <= 1.0);
    CHECK(bd >= 0.0);
    CHECK(bd <= kBhattacharyyaClip);
    if (bd < kBhattacharyyaClip) CHECK(bc == doctest::Approx(std::exp(-bd)).epsilon(1e-12));
    const double w1 = categorical_distance(DistanceMetric::w1, p, q);
    const double w2 = categorical_distance(DistanceMetric::w2, p, q);
    CHECK(w1 >= 0.0);
    CHECK(w1 <= 1.0);
    CHECK(w2 == doctest::Approx(std::sqrt(w1)).epsilon(1e-12));
    CHECK(categorical_distance(DistanceMetric::kl, p, q) >= 0.0);
  }
}

TEST_CASE("property: gaussian W2 and BD are symmetric") {
  Rng rng(23);
  for (int round = 0; round < 50; ++round) {
    std::vector<ActionValue> ra;
    std::vector<ActionValue> rb;
    for (int i = 0; i < 6; ++i) {
      ra.push_back(ActionValue::continuous({rng.normal(), rng.normal()}));
      rb.push_back(ActionValue::continuous({1.0 + rng.normal(), rng.normal()}));
    }
    const auto a = empirical_policy(ra, ActionSpace::continuous(2));
    const auto b = empirical_policy(rb, ActionSpace::continuous(2));
    CHECK(gaussian_distance(DistanceMetric::w2, a, b) ==
          doctest::Approx(gaussian_distance(DistanceMetric::w2, b, a)).epsilon(1e-9));
    CHECK(gaussian_distance(DistanceMetric::bd, a, b) ==
          doctest::Approx(gaussian_distance(DistanceMetric::bd, b, a)).epsilon(1e-9));
    CHECK(gaussian_distance(DistanceMetric::bc, a, b) ==
          doctest::Approx(std::exp(-gaussian_distance(DistanceMetric::bd, a, b))).epsilon(1e-12));
  }
}
