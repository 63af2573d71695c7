#include <doctest.h>

#include "stylemetric/common.hpp"
#include "stylemetric/trajectory.hpp"
#include "support.hpp"

using namespace stylemetric;
using stylemetric::testing::random_dataset;
using stylemetric::testing::steps_dataset;

TEST_CASE("singleton encoder maps every observation to one key") {
  const auto enc = StateEncoder::singleton();
  CHECK(encode_observation(enc, VectorObs{{1.0, 2.0}}) ==
        encode_observation(enc, VectorObs{{-4.0}}));
  CHECK(encode_observation(enc, ImageObs{2, 1, {0.0, 1.0}}) ==
        encode_observation(enc, VectorObs{{3.0}}));
}

TEST_CASE("identity encoder is exact-match") {
  const auto enc = StateEncoder::identity();
  CHECK(encode_observation(enc, VectorObs{{1.0, 2.0}}) ==
        encode_observation(enc, VectorObs{{1.0, 2.0}}));
  CHECK(encode_observation(enc, VectorObs{{1.0, 2.0}}) !=
        encode_observation(enc, VectorObs{{1.0, 2.5}}));
  CHECK(encode_observation(enc, VectorObs{{0.0}}) == encode_observation(enc, VectorObs{{-0.0}}));
  CHECK_THROWS_AS(encode_observation(enc, PrecomputedStates{{{"x", "1"}}}), InvalidArgument);
}

TEST_CASE("low-res encoder quantizes an 84x84 frame to an 8x8 grid of 16 levels") {
  ImageObs frame{84, 84, std::vector<double>(84 * 84)};
  for (std::size_t y = 0; y < 84; ++y) {
    for (std::size_t x = 0; x < 84; ++x) frame.data[y * 84 + x] = static_cast<double>(x);
  }
  std::size_t w = 0;
  std::size_t h = 0;
  const auto cells = low_res_cells(frame, {}, &w, &h);
  CHECK(w == 8);
  CHECK(h == 8);
  REQUIRE(cells.size() == 64);
  // Columns rise monotonically from level 0 to level 15; rows repeat.
  CHECK(cells[0] == 0);
  CHECK(cells[7] == 15);
  for (std::size_t x = 1; x < 8; ++x) CHECK(cells[x] >= cells[x - 1]);
  for (std::size_t y = 1; y < 8; ++y) CHECK(cells[y * 8 + 3] == cells[3]);

  const auto key = encode_observation(StateEncoder::low_resolution(), frame);
  CHECK(key.rfind("q8x8:", 0) == 0);
  CHECK(key.size() == 5 + 64);

  // Any affine brightness change keeps the key.
  ImageObs brighter = frame;
  for (double& v : brighter.data) v = 3.0 * v + 10.0;
  CHECK(encode_observation(StateEncoder::low_resolution(), brighter) == key);
}

TEST_CASE("low-res quantization rounds half up") {
  // Block means 0, 1, 2 over [0, 2] map to levels 0, 7.5 -> 8, 15.
  ImageObs frame{3, 1, {0.0, 1.0, 2.0}};
  const auto cells = low_res_cells(frame, {8, 8, 16});
  REQUIRE(cells.size() == 3);
  CHECK(cells[0] == 0);
  CHECK(cells[1] == 8);
  CHECK(cells[2] == 15);
}

TEST_CASE("external encoder reads precomputed states") {
  const auto enc = StateEncoder::external("hsd");
  CHECK(encode_observation(enc, PrecomputedStates{{{"hsd", "k7"}}}) == "k7");
  CHECK_THROWS_AS(encode_observation(enc, PrecomputedStates{{{"other", "k7"}}}), InvalidArgument);
  CHECK_THROWS_AS(encode_observation(enc, VectorObs{{1.0}}), InvalidArgument);
}

TEST_CASE("encoder sets parse and reject duplicates") {
  const auto set = parse_encoder_set("singleton,identity,lowres,ext:hsd");
  REQUIRE(set.size() == 4);
  CHECK(set[2].kind == EncoderKind::low_res);
  CHECK(set[3].id == "hsd");
  CHECK_THROWS_AS(parse_encoder_set("identity,identity"), InvalidArgument);
  CHECK_THROWS_AS(parse_encoder_set("voxels"), InvalidArgument);
  CHECK_THROWS_AS(validate_encoder_set({}), InvalidArgument);
}

TEST_CASE("state index examples") {
  SUBCASE("ten pairs in one state") {
    std::vector<std::pair<int, int>> steps(10, {0, 1});
    const auto idx = build_state_index(steps_dataset("a", 2, steps), StateEncoder::singleton());
    CHECK(idx.state_count() == 1);
    CHECK(idx.total_visits() == 10);
  }
  SUBCASE("four pairs over two states keep their action order") {
    const auto ds = steps_dataset("a", 3, {{0, 2}, {1, 0}, {0, 1}, {1, 1}});
    const auto idx = build_state_index(ds, StateEncoder::identity());
    REQUIRE(idx.state_count() == 2);
    const auto key0 = encode_observation(StateEncoder::identity(), VectorObs{{0.0}});
    const auto* e = idx.find(key0);
    REQUIRE(e != nullptr);
    REQUIRE(e->visits() == 2);
    CHECK(e->actions[0].index == 2);
    CHECK(e->actions[1].index == 1);
  }
  SUBCASE("empty dataset") {
    TrajectoryDataset ds;
    ds.action_space = ActionSpace::discrete(2);
    CHECK_THROWS_AS(build_state_index(ds, StateEncoder::identity()), InvalidArgument);
  }
}

TEST_CASE("filtered intersection examples") {
  const auto enc = StateEncoder::identity();
  // State 0: (3, 1) visits, state 1: (3, 2), state 2 only in a, state 3 only in b.
  const auto a = build_state_index(
      steps_dataset("a", 2, {{0, 0}, {0, 0}, {0, 0}, {1, 0}, {1, 0}, {1, 0}, {2, 0}}), enc);
  const auto b = build_state_index(steps_dataset("b", 2, {{0, 1}, {1, 1}, {1, 1}, {3, 0}}), enc);
  CHECK(filtered_intersection(a, b, 1).size() == 2);
  const auto t2 = filtered_intersection(a, b, 2);
  REQUIRE(t2.size() == 1);
  CHECK(t2[0] == encode_observation(enc, VectorObs{{1.0}}));
  CHECK(filtered_intersection(a, a, 1).size() == a.state_count());
  const auto disjoint = build_state_index(steps_dataset("c", 2, {{9, 0}}), enc);
  CHECK(filtered_intersection(a, disjoint, 1).empty());
  const auto other = build_state_index(steps_dataset("a", 2, {{0, 0}}), StateEncoder::singleton());
  CHECK_THROWS_AS(filtered_intersection(a, other, 1), InvalidArgument);
  CHECK_THROWS_AS(filtered_intersection(a, b, 0), InvalidArgument);
}

TEST_CASE("multiscale union states are namespaced") {
  const EncoderSet set{StateEncoder::identity("fine"), StateEncoder::identity("coarse")};
  SUBCASE("intersections of sizes 2 and 3 give 5") {
    // Give the two encoders different views by building each index separately.
    const auto fa = build_state_index(steps_dataset("a", 2, {{0, 0}, {1, 0}, {5, 0}}), set[0]);
    const auto fb = build_state_index(steps_dataset("b", 2, {{0, 0}, {1, 0}, {6, 0}}), set[0]);
    const auto ca = build_state_index(steps_dataset("a", 2, {{0, 0}, {1, 0}, {2, 0}}), set[1]);
    const auto cb = build_state_index(steps_dataset("b", 2, {{0, 0}, {1, 0}, {2, 0}}), set[1]);
    const MultiscaleIndex a{fa, ca};
    const MultiscaleIndex b{fb, cb};
    CHECK(multiscale_union_states(a, b, SetMode::intersection).size() == 5);
    CHECK(multiscale_union_states(a, b, SetMode::union_).size() == 7);
  }
  SUBCASE("disjoint at every scale") {
    const auto a = build_multiscale_index(steps_dataset("a", 2, {{0, 0}, {1, 0}}), set);
    const auto b = build_multiscale_index(steps_dataset("b", 2, {{2, 0}}), set);
    CHECK(multiscale_union_states(a, b, SetMode::intersection).empty());
    CHECK(multiscale_union_states(a, b, SetMode::union_).size() == 6);
  }
  SUBCASE("raw key collisions across encoders stay distinct") {
    const auto a = build_multiscale_index(steps_dataset("a", 2, {{0, 0}}), set);
    const auto u = multiscale_union_states(a, a, SetMode::union_);
    CHECK(u.size() == 2);
  }
  SUBCASE("encoder set mismatch") {
    const auto a = build_multiscale_index(steps_dataset("a", 2, {{0, 0}}), set);
    const auto b = build_multiscale_index(steps_dataset("a", 2, {{0, 0}}), {set[0]});
    CHECK_THROWS_AS(multiscale_union_states(a, b, SetMode::union_), InvalidArgument);
  }
}

TEST_CASE("dataset validation") {
  auto ds = steps_dataset("a", 2, {{0, 0}, {1, 1}});
  CHECK_NOTHROW(ds.validate());
  ds.episodes[0].steps.push_back({VectorObs{{0.0}}, ActionValue::discrete(2)});
  CHECK_THROWS_AS(ds.validate(), InvalidArgument);
  ds.episodes[0].steps.back().action = ActionValue::continuous({1.0});
  CHECK_THROWS_AS(ds.validate(), InvalidArgument);
}

TEST_CASE("property: index construction is deterministic and conserves visits") {
  Rng rng(11);
  const EncoderSet set{StateEncoder::singleton(), StateEncoder::identity()};
  for (int round = 0; round < 50; ++round) {
    const std::size_t pairs = 1 + rng.below(200);
    const auto ds = random_dataset(rng, "r", 1 + rng.below(12), 2 + rng.below(4), pairs);
    const auto first = build_multiscale_index(ds, set);
    const auto second = build_multiscale_index(ds, set);
    REQUIRE(first.size() == 2);
    for (std::size_t k = 0; k < 2; ++k) {
      CHECK(first[k] == second[k]);
      CHECK(first[k].total_visits() == pairs);
      std::size_t sum = 0;
      for (const auto& [key, e] : first[k].entries()) sum += e.visits();
      CHECK(sum == pairs);
    }
  }
}

TEST_CASE("property: filtered intersection shrinks as the threshold grows") {
  Rng rng(12);
  const auto enc = StateEncoder::identity();
  for (int round = 0; round < 50; ++round) {
    const auto a = build_state_index(random_dataset(rng, "a", 10, 3, 1 + rng.below(60)), enc);
    const auto b = build_state_index(random_dataset(rng, "b", 10, 3, 1 + rng.below(60)), enc);
    std::size_t last = filtered_intersection(a, b, 1).size();
    for (std::size_t t = 2; t < 10; ++t) {
      const std::size_t now = filtered_intersection(a, b, t).size();
      CHECK(now <= last);
      last = now;
    }
  }
}
