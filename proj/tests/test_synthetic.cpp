#include <doctest.h>

#include <cmath>
#include <sstream>

#include "stylemetric/common.hpp"
#include "stylemetric/io.hpp"
#include "stylemetric/measures.hpp"
#include "stylemetric/synthetic.hpp"

using namespace stylemetric;

namespace {

std::string dump(const std::vector<MatchRecord>& m) {
  std::ostringstream out;
  write_matches(out, m);
  return out.str();
}

}  // namespace

TEST_CASE("rock-paper-scissors rules") {
  CHECK(rps_outcome(0, 2) == 1.0);
  CHECK(rps_outcome(2, 1) == 1.0);
  CHECK(rps_outcome(1, 0) == 1.0);
  CHECK(rps_outcome(2, 0) == 0.0);
  CHECK(rps_outcome(0, 0) == 0.5);
  CHECK_THROWS_AS(rps_outcome(3, 0), InvalidArgument);
}

TEST_CASE("generated rps outcomes follow the table exactly") {
  const auto m = gen_rps(5000, 1);
  REQUIRE(m.size() == 5000);
  std::size_t mirrors = 0;
  for (const auto& r : m) {
    std::size_t a = 0;
    std::size_t b = 0;
    while (kRpsNames[a] != r.a.id) ++a;
    while (kRpsNames[b] != r.b.id) ++b;
    CHECK(r.w == rps_outcome(a, b));
    mirrors += a == b ? 1 : 0;
  }
  // Mirrors are included: about a third of all draws.
  CHECK(mirrors > 1400);
  CHECK(mirrors < 1950);
  CHECK_THROWS_AS(gen_rps(0, 1), InvalidArgument);
}

TEST_CASE("combination scores and win probabilities") {
  CHECK(team_score({18, 19, 20}) == 57);
  CHECK(combination_win_probability(57, 6, false) == doctest::Approx(3249.0 / 3285.0));
  CHECK(combination_win_probability(57, 6, false) == doctest::Approx(0.9890).epsilon(1e-4));
  CHECK(combination_win_probability(56, 57, false) == doctest::Approx(0.4912).epsilon(1e-4));
  CHECK(score_type(57) == 0);
  CHECK(score_type(58) == 1);
  CHECK(type_beats(1, 0));
  CHECK(type_beats(2, 1));
  CHECK(type_beats(0, 2));
  CHECK(combination_win_probability(57, 58, true) ==
        doctest::Approx(57.0 * 57.0 / (57.0 * 57.0 + 118.0 * 118.0)));
  CHECK(combination_win_probability(57, 58, true) == doctest::Approx(0.1892).epsilon(1e-4));
  // Equal types: no bonus either way.
  CHECK(combination_win_probability(57, 54, true) == combination_win_probability(57, 54, false));
  CHECK(element_id(7) == "e07");
  CHECK(team_composition({20, 1, 7}).id == "e01+e07+e20");
}

TEST_CASE("team enumeration") {
  const auto teams = enumerate_teams(20, 3);
  CHECK(teams.size() == 1140);
  CHECK(teams.front() == std::vector<int>{1, 2, 3});
  CHECK(teams.back() == std::vector<int>{18, 19, 20});
  CHECK(enumerate_teams(5, 1).size() == 5);
  CHECK(enumerate_teams(3, 4).empty());
}

TEST_CASE("combination generators") {
  CombinationGameSpec spec;
  spec.match_count = 2000;
  spec.seed = 5;
  const auto simple = gen_simple_combination(spec);
  REQUIRE(simple.size() == 2000);
  for (const auto& r : simple) {
    CHECK_FALSE(r.a == r.b);
    CHECK(r.a.elements.size() == 3);
    CHECK((r.w == 0.0 || r.w == 1.0));
  }
  CHECK(dump(gen_advanced_combination(spec)) != dump(simple));
  spec.team_size = 25;
  CHECK_THROWS_AS(gen_simple_combination(spec), InvalidArgument);
}

TEST_CASE("the advanced game is intransitive and the simple game is not") {
  CombinationGameSpec spec;
  spec.rps_bonus = true;
  const auto triple = find_intransitive_triple(spec);
  REQUIRE(triple.has_value());
  const auto& [a, b, c] = *triple;
  const auto win = [](const std::vector<int>& x, const std::vector<int>& y) {
    return combination_win_probability(team_score(x), team_score(y), true);
  };
  CHECK(win(a, b) > 0.5);
  CHECK(win(b, c) > 0.5);
  CHECK(win(c, a) > 0.5);
  spec.rps_bonus = false;
  CHECK_FALSE(find_intransitive_triple(spec).has_value());
}

TEST_CASE("styled world") {
  const auto spec = spectrum_styles(5);
  for (std::size_t k = 0; k < 5; ++k) {
    for (std::size_t s = 0; s < spec.states; ++s) {
      double total = 0.0;
      for (double p : spec.policy(k, s)) total += p;
      CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
    }
  }
  for (std::size_t k = 1; k < 4; ++k) {
    CHECK(style_proximity(spec, 0, k) < style_proximity(spec, 0, k + 1));
  }
  CHECK(style_proximity(spec, 2, 2) == 0.0);

  auto world_spec = separated_styles(3);
  world_spec.seed = 4;
  const auto w = gen_styled_policies(world_spec, 300, 100);
  REQUIRE(w.candidates.size() == 3);
  CHECK(w.candidates[1].id == "style1");
  CHECK(w.queries[2].id == "query2");
  CHECK(w.proximity[0] == 0.0);
  CHECK(w.proximity[1] == w.proximity[3]);
  std::size_t steps = 0;
  for (const auto& ep : w.queries[0].episodes) steps += ep.steps.size();
  CHECK(steps == 100);
  CHECK_NOTHROW(w.candidates[0].validate());

  StyledPolicySpec empty;
  CHECK_THROWS_AS(empty.validate(), InvalidArgument);
  CHECK_THROWS_AS(gen_styled_dataset(world_spec, 7, 10, 1, "x"), InvalidArgument);
}

TEST_CASE("identical styles grow more similar with more data") {
  auto spec = separated_styles(1);
  MeasureConfig cfg;
  cfg.encoders = styled_encoders();
  cfg.metric = DistanceMetric::w1;
  cfg.fixed_scale = 1.0;
  double last = 0.0;
  for (std::size_t n : {32, 512, 8192}) {
    const auto a = gen_styled_dataset(spec, 0, n, 1, "a");
    const auto b = gen_styled_dataset(spec, 0, n, 2, "b");
    const double v = playstyle_similarity(a, b, cfg).value;
    CHECK(v > last);
    last = v;
  }
  CHECK(last > 0.9);
}

TEST_CASE("property: generators are seed deterministic") {
  CHECK(dump(gen_rps(1000, 7)) == dump(gen_rps(1000, 7)));
  CHECK(dump(gen_rps(1000, 7)) != dump(gen_rps(1000, 8)));
  CombinationGameSpec spec;
  spec.match_count = 1000;
  spec.seed = 3;
  CHECK(dump(gen_advanced_combination(spec)) == dump(gen_advanced_combination(spec)));
  const auto s = separated_styles(2);
  std::ostringstream x;
  std::ostringstream y;
  write_trajectories(x, gen_styled_dataset(s, 1, 500, 9, "a"));
  write_trajectories(y, gen_styled_dataset(s, 1, 500, 9, "a"));
  CHECK(x.str() == y.str());
}

TEST_CASE("property: empirical win rates converge to the analytic probability") {
  // Repeated fixed matchups drawn through the generator's Bernoulli rule.
  const std::vector<std::pair<int, int>> pairs{{57, 6}, {56, 57}, {30, 45}};
  Rng rng(81);
  for (auto [sa, sb] : pairs) {
    const double p = combination_win_probability(sa, sb, false);
    const std::size_t n = 100000;
    std::size_t wins = 0;
    for (std::size_t i = 0; i < n; ++i) wins += rng.bernoulli(p) ? 1 : 0;
    const double se = std::sqrt(p * (1.0 - p) / static_cast<double>(n));
    CHECK(std::abs(static_cast<double>(wins) / static_cast<double>(n) - p) <= 3.0 * se);
  }

  // And through the generator: the per-score-gap mean outcome of the full
  // simple game tracks the pooled analytic probability.
  CombinationGameSpec spec;
  spec.seed = 2;
  const auto matches = gen_simple_combination(spec);
  double observed = 0.0;
  double expected = 0.0;
  double var = 0.0;
  std::size_t n = 0;
  for (const auto& m : matches) {
    int sa = 0;
    int sb = 0;
    for (const auto& e : m.a.elements) sa += std::stoi(e.substr(1));
    for (const auto& e : m.b.elements) sb += std::stoi(e.substr(1));
    if (sa <= sb) continue;
    const double p = combination_win_probability(sa, sb, false);
    observed += m.w;
    expected += p;
    var += p * (1.0 - p);
    ++n;
  }
  REQUIRE(n > 40000);
  CHECK(std::abs(observed - expected) <= 3.0 * std::sqrt(var));
}
