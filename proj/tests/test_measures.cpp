#include <doctest.h>

#include <cmath>

#include "stylemetric/common.hpp"
#include "stylemetric/measures.hpp"
#include "stylemetric/synthetic.hpp"
#include "support.hpp"

using namespace stylemetric;
using stylemetric::testing::steps_dataset;

namespace {

// One encoder with the given (value, visits_a, visits_b) states.
PairComparison one_encoder(std::vector<StateComparison> states, std::size_t union_count) {
  EncoderComparison enc;
  enc.encoder_id = "e";
  enc.intersected = states.size();
  enc.union_count = union_count;
  enc.states = std::move(states);
  PairComparison pc;
  pc.encoders.push_back(std::move(enc));
  return pc;
}

MeasureConfig identity_config() {
  MeasureConfig cfg;
  cfg.encoders = {StateEncoder::identity()};
  return cfg;
}

}  // namespace

TEST_CASE("distance of a dataset to itself is 0") {
  const auto ds = steps_dataset("a", 3, {{0, 0}, {0, 1}, {1, 2}, {2, 2}, {1, 0}});
  for (auto avg : {Averaging::uniform, Averaging::expected}) {
    for (auto metric : {DistanceMetric::w1, DistanceMetric::w2, DistanceMetric::kl,
                        DistanceMetric::mkl, DistanceMetric::bd}) {
      auto cfg = identity_config();
      cfg.averaging = avg;
      cfg.metric = metric;
      CHECK(playstyle_distance(ds, ds, cfg).value == doctest::Approx(0.0).epsilon(1e-9));
    }
  }
}

TEST_CASE("opposite deterministic actions at one shared state give distance 1") {
  const auto a = steps_dataset("a", 2, {{0, 0}, {0, 0}});
  const auto b = steps_dataset("b", 2, {{0, 1}});
  const auto r = playstyle_distance(a, b, identity_config());
  CHECK(r.value == doctest::Approx(1.0));
  CHECK(r.intersected == 1);
}

TEST_CASE("averaging examples") {
  auto cfg = identity_config();
  const auto pc = one_encoder({{"s0", 0.0, 1, 3}, {"s1", 1.0, 1, 1}}, 2);
  cfg.averaging = Averaging::uniform;
  CHECK(distance_from(pc, cfg).value == doctest::Approx(0.5));
  // A|B weights by B's visits {3, 1}: 0.25. B|A weights by A's {1, 1}: 0.5.
  cfg.averaging = Averaging::expected;
  CHECK(distance_from(pc, cfg).value == doctest::Approx(0.5 * (0.25 + 0.5)));
  const auto mirrored = one_encoder({{"s0", 0.0, 3, 3}, {"s1", 1.0, 1, 1}}, 2);
  CHECK(distance_from(mirrored, cfg).value == doctest::Approx(0.25));
}

TEST_CASE("multiscale distance averages over encoders with shared states") {
  auto cfg = identity_config();
  cfg.averaging = Averaging::uniform;
  auto pc = one_encoder({{"s", 0.2, 1, 1}}, 1);
  auto second = pc.encoders[0];
  second.encoder_id = "f";
  second.states[0].value = 0.6;
  pc.encoders.push_back(second);
  EncoderComparison empty;
  empty.encoder_id = "g";
  empty.union_count = 3;
  pc.encoders.push_back(empty);
  CHECK(distance_from(pc, cfg).value == doctest::Approx(0.4));
}

TEST_CASE("no shared context is an error, not a distance of 0") {
  const auto a = steps_dataset("a", 2, {{0, 0}});
  const auto b = steps_dataset("b", 2, {{1, 0}});
  CHECK_THROWS_AS(playstyle_distance(a, b, identity_config()), NoComparableContext);
  CHECK_THROWS_AS(intersection_similarity(a, b, identity_config()), NoComparableContext);
  const auto pc = one_encoder({}, 2);
  CHECK_FALSE(distance_from(pc, identity_config()).comparable);
  CHECK(similarity_from(pc, identity_config(), 1.0).value == 0.0);
}

TEST_CASE("perceptual kernel") {
  CHECK(perceptual_kernel(0.0) == 1.0);
  CHECK(perceptual_kernel(1.0) == doctest::Approx(0.36788).epsilon(1e-5));
  CHECK(perceptual_kernel(10.0) == doctest::Approx(4.54e-5).epsilon(1e-3));
  CHECK(perceptual_kernel(2.0) < perceptual_kernel(1.0));
  CHECK_THROWS_AS(perceptual_kernel(-0.1), InvalidArgument);
}

TEST_CASE("intersection similarity examples") {
  auto cfg = identity_config();
  cfg.fixed_scale = 1.0;
  CHECK(intersection_from(one_encoder({{"s", 0.0, 1, 1}, {"t", 0.0, 2, 1}}, 2), cfg, 1.0).value ==
        1.0);
  CHECK(intersection_from(one_encoder({{"s", 1.0, 1, 1}}, 1), cfg, 1.0).value ==
        doctest::Approx(std::exp(-1.0)));
  CHECK(intersection_from(one_encoder({{"s", 0.0, 1, 1}, {"t", 2.0, 1, 1}}, 3), cfg, 1.0).value ==
        doctest::Approx((1.0 + std::exp(-2.0)) / 2.0));
  // The scale divides every local distance.
  cfg.fixed_scale.reset();
  CHECK(intersection_from(one_encoder({{"s", 4.0, 1, 1}}, 1), cfg, 2.0).value ==
        doctest::Approx(std::exp(-2.0)));
  // BC values pass through, BD goes through the kernel unscaled.
  cfg.metric = DistanceMetric::bc;
  CHECK(intersection_from(one_encoder({{"s", 0.3, 1, 1}}, 1), cfg, 5.0).value ==
        doctest::Approx(0.3));
  cfg.metric = DistanceMetric::bd;
  CHECK(intersection_from(one_encoder({{"s", 0.3, 1, 1}}, 1), cfg, 5.0).value ==
        doctest::Approx(std::exp(-0.3)));
}

TEST_CASE("batch scale pools every state of every pair") {
  const std::vector<PairComparison> batch{one_encoder({{"s", 1.0, 1, 1}, {"t", 2.0, 1, 1}}, 2),
                                          one_encoder({{"u", 3.0, 1, 1}}, 1)};
  CHECK(batch_scale(batch, DistanceMetric::w2) == doctest::Approx(2.0));
  CHECK(batch_scale(batch, DistanceMetric::bd) == 1.0);
  const std::vector<PairComparison> zeros{one_encoder({{"s", 0.0, 1, 1}}, 1)};
  CHECK(batch_scale(zeros, DistanceMetric::w2) == 1.0);
}

TEST_CASE("jaccard examples") {
  const auto cfg = identity_config();
  const auto a = steps_dataset("a", 2, {{0, 0}, {1, 0}, {2, 1}});
  const auto b = steps_dataset("b", 2, {{0, 1}, {1, 1}, {3, 0}});
  CHECK(jaccard_index(a, a, cfg).value == 1.0);
  CHECK(jaccard_index(a, b, cfg).value == doctest::Approx(0.5));
  const auto pc = one_encoder({}, 4);
  CHECK(jaccard_from(pc, cfg).value == 0.0);
  CHECK_THROWS_AS(jaccard_from(one_encoder({}, 0), cfg), InvalidArgument);
}

TEST_CASE("playstyle similarity examples") {
  auto cfg = identity_config();
  const auto a = steps_dataset("a", 2, {{0, 0}, {1, 1}, {2, 1}});
  CHECK(playstyle_similarity(a, a, cfg).value == doctest::Approx(1.0));
  cfg.fixed_scale = 1.0;
  CHECK(similarity_from(one_encoder({{"s", 0.0, 1, 1}, {"t", 0.0, 1, 1}}, 4), cfg, 1.0).value ==
        doctest::Approx(0.5));
  const auto c = steps_dataset("c", 2, {{7, 0}});
  const auto pc = one_encoder({}, 4);
  CHECK(similarity_from(pc, cfg, 1.0).value == 0.0);
  CHECK(measure_pair(Measure::jaccard, a, c, cfg).value == 0.0);
}

TEST_CASE("details carry per-state weights summing to 1") {
  auto cfg = identity_config();
  cfg.keep_details = true;
  const auto pc = one_encoder({{"s0", 0.0, 1, 3}, {"s1", 1.0, 2, 1}}, 2);
  const auto r = distance_from(pc, cfg);
  REQUIRE(r.details.size() == 2);
  double sum = 0.0;
  double value = 0.0;
  for (const auto& d : r.details) {
    sum += d.weight;
    value += d.weight * d.local;
  }
  CHECK(sum == doctest::Approx(1.0));
  CHECK(value == doctest::Approx(r.value));
}

TEST_CASE("BC cannot be a distance") {
  auto cfg = identity_config();
  cfg.metric = DistanceMetric::bc;
  const auto a = steps_dataset("a", 2, {{0, 0}});
  CHECK_THROWS_AS(playstyle_distance(a, a, cfg), InvalidArgument);
  CHECK(playstyle_similarity(a, a, cfg).value == doctest::Approx(1.0));
}

TEST_CASE("config validation") {
  auto cfg = identity_config();
  cfg.threshold = 0;
  CHECK_THROWS_AS(cfg.validate(), InvalidArgument);
  cfg = identity_config();
  cfg.fixed_scale = 0.0;
  CHECK_THROWS_AS(cfg.validate(), InvalidArgument);
  cfg.encoders.clear();
  CHECK_THROWS_AS(cfg.validate(), InvalidArgument);
  CHECK(parse_measure("psim") == Measure::similarity);
  CHECK(parse_measure("inter") == Measure::intersection);
  CHECK_THROWS_AS(parse_measure("cosine"), InvalidArgument);
}

TEST_CASE("spectrum consistency on values") {
  const std::vector<double> ok{0.9, 0.7, 0.3};
  CHECK_FALSE(spectrum_consistency(ok, true).has_value());
  const std::vector<double> bump{0.9, 0.95, 0.3};
  CHECK(spectrum_consistency(bump, true) == std::optional<std::size_t>{1});
  const std::vector<double> tie{0.0, 0.2, 0.2};
  CHECK(spectrum_consistency(tie, false) == std::optional<std::size_t>{2});
  const std::vector<double> one{0.5};
  CHECK_THROWS_AS(spectrum_consistency(one, true), InvalidArgument);
}

TEST_CASE("spectrum consistency on datasets") {
  const auto cfg = identity_config();
  const auto query = steps_dataset("q", 2, {{0, 0}, {1, 0}, {2, 0}, {3, 0}});
  const std::vector<TrajectoryDataset> ordered{
      steps_dataset("c0", 2, {{0, 0}, {1, 0}, {2, 0}, {3, 0}}),
      steps_dataset("c1", 2, {{0, 0}, {1, 0}, {2, 0}, {3, 1}}),
      steps_dataset("c2", 2, {{0, 0}, {1, 1}, {2, 1}, {3, 1}})};
  CHECK_FALSE(spectrum_consistency(query, ordered, Measure::similarity, cfg).has_value());
  CHECK_FALSE(spectrum_consistency(query, ordered, Measure::distance, cfg).has_value());
  const std::vector<TrajectoryDataset> reversed{ordered[2], ordered[1], ordered[0]};
  CHECK(spectrum_consistency(query, reversed, Measure::similarity, cfg) ==
        std::optional<std::size_t>{1});
}

TEST_CASE("property: measure axioms on the styled world") {
  Rng rng(31);
  const auto spec = separated_styles(5);
  MeasureConfig cfg;
  cfg.encoders = styled_encoders();
  for (int round = 0; round < 200; ++round) {
    const std::size_t sa = rng.below(spec.style_count());
    const std::size_t sb = rng.below(spec.style_count());
    const auto a = gen_styled_dataset(spec, sa, 8 + rng.below(300), rng.next(), "a");
    const auto b = gen_styled_dataset(spec, sb, 8 + rng.below(300), rng.next(), "b");
    cfg.metric = rng.bernoulli(0.5) ? DistanceMetric::w2 : DistanceMetric::w1;
    cfg.averaging = rng.bernoulli(0.5) ? Averaging::expected : Averaging::uniform;

    for (auto m : {Measure::distance, Measure::intersection, Measure::jaccard, Measure::similarity}) {
      const double ab = measure_pair(m, a, b, cfg).value;
      const double ba = measure_pair(m, b, a, cfg).value;
      CHECK(std::abs(ab - ba) <= 1e-12);
      if (m != Measure::distance) {
        CHECK(ab >= 0.0);
        CHECK(ab <= 1.0);
      }
    }
    CHECK(measure_pair(Measure::distance, a, a, cfg).value == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(measure_pair(Measure::similarity, a, a, cfg).value == doctest::Approx(1.0).epsilon(1e-12));

    const double ps = playstyle_similarity(a, b, cfg).value;
    const double j = jaccard_index(a, b, cfg).value;
    const double inter = intersection_similarity(a, b, cfg).value;
    CHECK(std::abs(ps - j * inter) <= 1e-12);

    auto bc = cfg;
    bc.metric = DistanceMetric::bc;
    const double bcv = intersection_similarity(a, b, bc).value;
    CHECK(bcv >= 0.0);
    CHECK(bcv <= 1.0);
    auto bd = cfg;
    bd.metric = DistanceMetric::bd;
    const auto bdr = playstyle_distance(a, b, bd);
    CHECK(bdr.value <= kBhattacharyyaClip);
  }
}

TEST_CASE("opposite deterministic styles on shared states have W2 distance 1") {
  StyledPolicySpec spec;
  spec.states = 4;
  spec.actions = 2;
  spec.style_bias.assign(2, std::vector<std::vector<double>>(4, std::vector<double>(2, 0.0)));
  for (std::size_t s = 0; s < 4; ++s) {
    spec.style_bias[0][s][0] = 60.0;
    spec.style_bias[1][s][1] = 60.0;
  }
  spec.jump = 1.0;
  const auto a = gen_styled_dataset(spec, 0, 400, 1, "a");
  const auto b = gen_styled_dataset(spec, 1, 400, 2, "b");
  MeasureConfig cfg;
  cfg.encoders = {StateEncoder::identity()};
  CHECK(playstyle_distance(a, b, cfg).value == doctest::Approx(1.0).epsilon(1e-12));
}
