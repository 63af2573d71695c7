#include <doctest.h>

#include "stylemetric/common.hpp"
#include "stylemetric/kernels.hpp"
#include "stylemetric/synthetic.hpp"

using namespace stylemetric;

namespace {

std::vector<TrajectoryDataset> styled_batch(std::uint64_t seed, std::size_t count) {
  const auto spec = separated_styles(5);
  Rng rng(seed);
  std::vector<TrajectoryDataset> out;
  for (std::size_t i = 0; i < count; ++i) {
    out.push_back(gen_styled_dataset(spec, i % spec.style_count(), 16 + rng.below(400), rng.next(),
                                     "d" + std::to_string(i)));
  }
  return out;
}

void check_same(const PairComparison& x, const PairComparison& y) {
  REQUIRE(x.encoders.size() == y.encoders.size());
  for (std::size_t e = 0; e < x.encoders.size(); ++e) {
    const auto& ex = x.encoders[e];
    const auto& ey = y.encoders[e];
    CHECK(ex.encoder_id == ey.encoder_id);
    CHECK(ex.intersected == ey.intersected);
    CHECK(ex.union_count == ey.union_count);
    REQUIRE(ex.states.size() == ey.states.size());
    for (std::size_t s = 0; s < ex.states.size(); ++s) {
      CHECK(ex.states[s].key == ey.states[s].key);
      CHECK(ex.states[s].value == ey.states[s].value);
      CHECK(ex.states[s].visits_a == ey.states[s].visits_a);
      CHECK(ex.states[s].visits_b == ey.states[s].visits_b);
    }
  }
}

struct WorkerGuard {
  int saved = worker_count();
  explicit WorkerGuard(int n) { set_worker_count(n); }
  ~WorkerGuard() { set_worker_count(saved); }
};

}  // namespace

TEST_CASE("parallel index construction matches the serial reference") {
  WorkerGuard guard(4);
  const auto data = styled_batch(41, 13);
  const auto serial = build_indices_serial(data, styled_encoders());
  const auto parallel = build_indices_parallel(data, styled_encoders());
  REQUIRE(serial.size() == parallel.size());
  for (std::size_t i = 0; i < serial.size(); ++i) {
    REQUIRE(serial[i].size() == parallel[i].size());
    for (std::size_t k = 0; k < serial[i].size(); ++k) CHECK(serial[i][k] == parallel[i][k]);
  }
}

TEST_CASE("parallel pair comparison matches the serial reference") {
  WorkerGuard guard(4);
  const auto data = styled_batch(42, 9);
  const auto items = build_indices_serial(data, styled_encoders());
  std::vector<IndexPair> pairs;
  for (std::size_t i = 0; i < items.size(); ++i) {
    for (std::size_t j = 0; j < items.size(); ++j) pairs.push_back({i, j});
  }
  for (auto metric : {DistanceMetric::w2, DistanceMetric::bc, DistanceMetric::kl}) {
    for (std::size_t t : {1, 3}) {
      const auto serial = compare_pairs_serial(items, pairs, metric, t);
      const auto parallel = compare_pairs_parallel(items, pairs, metric, t);
      REQUIRE(serial.size() == pairs.size());
      REQUIRE(parallel.size() == pairs.size());
      for (std::size_t p = 0; p < pairs.size(); ++p) check_same(serial[p], parallel[p]);
    }
  }
}

TEST_CASE("parallel label agreement matches the serial reference") {
  WorkerGuard guard(3);
  Rng rng(43);
  std::vector<PairObservation> pairs;
  for (std::size_t i = 0; i < 5000; ++i) {
    pairs.push_back({rng.below(50), rng.below(50), rng.uniform(), 1});
  }
  const WinFunction predict = [](std::size_t a, std::size_t b) {
    return a == b ? 0.5 : (a * 7 + b * 3) % 11 / 10.0;
  };
  const std::size_t serial = count_label_agreement_serial(pairs, predict);
  CHECK(serial == count_label_agreement_parallel(pairs, predict));
  CHECK(serial == count_label_agreement(pairs, predict, Execution::serial));
  const WinFunction truth = [&](std::size_t, std::size_t) { return 0.5; };
  std::size_t equal = 0;
  for (const auto& p : pairs) equal += strength_label(p.mean) == StrengthLabel::equal ? 1 : 0;
  CHECK(count_label_agreement_parallel(pairs, truth) == equal);
}

TEST_CASE("strength labels") {
  CHECK(strength_label(0.502) == StrengthLabel::stronger);
  CHECK(strength_label(0.501) == StrengthLabel::equal);
  CHECK(strength_label(0.5) == StrengthLabel::equal);
  CHECK(strength_label(0.499) == StrengthLabel::equal);
  CHECK(strength_label(0.4989) == StrengthLabel::weaker);
}

TEST_CASE("out-of-range pair indices are rejected") {
  const auto data = styled_batch(44, 2);
  const auto items = build_indices_serial(data, styled_encoders());
  const std::vector<IndexPair> bad{{0, 5}};
  CHECK_THROWS_AS(compare_pairs(items, bad, DistanceMetric::w2, 1), InvalidArgument);
}
