#include "stylemetric/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>

#include "stylemetric/common.hpp"

namespace stylemetric {

double rps_outcome(std::size_t a, std::size_t b) {
  if (a > 2 || b > 2) throw InvalidArgument("rps strategy out of range");
  if (a == b) return 0.5;
  return (a + 3 - b) % 3 == 1 ? 1.0 : 0.0;
}

std::vector<MatchRecord> gen_rps(std::size_t match_count, std::uint64_t seed) {
  if (match_count < 1) throw InvalidArgument("match count must be >= 1");
  std::array<Composition, 3> comps;
  for (std::size_t k = 0; k < 3; ++k) comps[k] = Composition::from_elements({kRpsNames[k]});
  Rng rng(derive_seed(seed, "rps"));
  std::vector<MatchRecord> out;
  out.reserve(match_count);
  for (std::size_t i = 0; i < match_count; ++i) {
    const std::size_t a = rng.below(3);
    const std::size_t b = rng.below(3);
    out.push_back({comps[a], comps[b], rps_outcome(a, b)});
  }
  return out;
}

void CombinationGameSpec::validate() const {
  if (elements < 1 || team_size < 1 || team_size > elements) {
    throw InvalidArgument("combination game needs 1 <= team size <= element count");
  }
  if (elements > 99) throw InvalidArgument("combination game supports at most 99 elements");
  if (match_count < 1) throw InvalidArgument("match count must be >= 1");
  if (!(bonus >= 0.0)) throw InvalidArgument("bonus must be non-negative");
}

std::string element_id(int score) {
  char buf[8];
  std::snprintf(buf, sizeof buf, "e%02d", score);
  return buf;
}

std::vector<std::vector<int>> enumerate_teams(std::size_t elements, std::size_t team_size) {
  std::vector<std::vector<int>> out;
  if (team_size == 0 || team_size > elements) return out;
  std::vector<int> cur(team_size);
  for (std::size_t i = 0; i < team_size; ++i) cur[i] = static_cast<int>(i) + 1;
  const int n = static_cast<int>(elements);
  const int k = static_cast<int>(team_size);
  while (true) {
    out.push_back(cur);
    int i = k - 1;
    while (i >= 0 && cur[i] == n - k + i + 1) --i;
    if (i < 0) break;
    ++cur[i];
    for (int j = i + 1; j < k; ++j) cur[j] = cur[j - 1] + 1;
  }
  return out;
}

Composition team_composition(const std::vector<int>& team) {
  std::vector<std::string> ids;
  ids.reserve(team.size());
  for (int s : team) ids.push_back(element_id(s));
  return Composition::from_elements(std::move(ids));
}

int team_score(const std::vector<int>& team) {
  int s = 0;
  for (int v : team) s += v;
  return s;
}

int score_type(int score) { return ((score % 3) + 3) % 3; }

bool type_beats(int x, int y) { return ((x - y) % 3 + 3) % 3 == 1; }

double combination_win_probability(int sa, int sb, bool rps_bonus, double bonus) {
  double ea = sa;
  double eb = sb;
  if (rps_bonus) {
    const int ta = score_type(sa);
    const int tb = score_type(sb);
    if (type_beats(ta, tb)) ea += bonus;
    if (type_beats(tb, ta)) eb += bonus;
  }
  const double a2 = ea * ea;
  const double b2 = eb * eb;
  return a2 / (a2 + b2);
}

std::vector<MatchRecord> gen_combination(const CombinationGameSpec& spec) {
  spec.validate();
  const auto teams = enumerate_teams(spec.elements, spec.team_size);
  if (teams.size() < 2) throw InvalidArgument("combination game needs at least two teams");
  std::vector<Composition> comps;
  std::vector<int> scores;
  comps.reserve(teams.size());
  for (const auto& t : teams) {
    comps.push_back(team_composition(t));
    scores.push_back(team_score(t));
  }
  Rng rng(derive_seed(spec.seed, spec.rps_bonus ? "advanced" : "simple"));
  std::vector<MatchRecord> out;
  out.reserve(spec.match_count);
  for (std::size_t i = 0; i < spec.match_count; ++i) {
    const std::size_t a = rng.below(teams.size());
    std::size_t b = rng.below(teams.size());
    while (b == a) b = rng.below(teams.size());
    const double p = combination_win_probability(scores[a], scores[b], spec.rps_bonus, spec.bonus);
    out.push_back({comps[a], comps[b], rng.bernoulli(p) ? 1.0 : 0.0});
  }
  return out;
}

std::vector<MatchRecord> gen_simple_combination(CombinationGameSpec spec) {
  spec.rps_bonus = false;
  return gen_combination(spec);
}

std::vector<MatchRecord> gen_advanced_combination(CombinationGameSpec spec) {
  spec.rps_bonus = true;
  return gen_combination(spec);
}

std::optional<std::array<std::vector<int>, 3>> find_intransitive_triple(
    const CombinationGameSpec& spec) {
  spec.validate();
  // Win values depend on the base score only, so search one team per score.
  std::map<int, std::vector<int>> by_score;
  for (const auto& t : enumerate_teams(spec.elements, spec.team_size)) {
    by_score.try_emplace(team_score(t), t);
  }
  std::vector<int> scores;
  for (const auto& [s, t] : by_score) scores.push_back(s);
  const auto win = [&](int x, int y) {
    return combination_win_probability(x, y, spec.rps_bonus, spec.bonus);
  };
  for (int a : scores) {
    for (int b : scores) {
      if (b == a || !(win(a, b) > 0.5)) continue;
      for (int c : scores) {
        if (c == a || c == b) continue;
        if (win(b, c) > 0.5 && win(c, a) > 0.5) {
          return std::array<std::vector<int>, 3>{by_score[a], by_score[b], by_score[c]};
        }
      }
    }
  }
  return std::nullopt;
}

void StyledPolicySpec::validate() const {
  if (states == 0 || actions == 0) throw InvalidArgument("styled world needs states and actions");
  if (style_bias.empty()) throw InvalidArgument("styled world needs at least one style");
  for (const auto& style : style_bias) {
    if (style.size() != states) throw InvalidArgument("style bias must cover every state");
    for (const auto& row : style) {
      if (row.size() != actions) throw InvalidArgument("style bias must cover every action");
      for (double v : row) {
        if (!std::isfinite(v)) throw InvalidArgument("style bias must be finite");
      }
    }
  }
  if (episode_length == 0) throw InvalidArgument("episode length must be >= 1");
  if (!(jump >= 0.0 && jump <= 1.0)) throw InvalidArgument("jump probability must lie in [0, 1]");
}

std::vector<double> StyledPolicySpec::policy(std::size_t style, std::size_t state) const {
  const auto& logits = style_bias.at(style).at(state);
  const double top = *std::max_element(logits.begin(), logits.end());
  std::vector<double> p(logits.size());
  double total = 0.0;
  for (std::size_t a = 0; a < logits.size(); ++a) {
    p[a] = std::exp(logits[a] - top);
    total += p[a];
  }
  for (double& v : p) v /= total;
  return p;
}

StyledPolicySpec separated_styles(std::size_t styles, std::size_t states, std::size_t actions,
                                  double strength) {
  StyledPolicySpec spec;
  spec.states = states;
  spec.actions = actions;
  spec.style_bias.assign(styles, std::vector<std::vector<double>>(
                                     states, std::vector<double>(actions, 0.0)));
  for (std::size_t k = 0; k < styles; ++k) {
    for (std::size_t s = 0; s < states; ++s) spec.style_bias[k][s][(s + k) % actions] = strength;
  }
  return spec;
}

StyledPolicySpec spectrum_styles(std::size_t styles, std::size_t states, std::size_t actions,
                                 double strength) {
  if (actions < 2) throw InvalidArgument("a spectrum needs at least two actions");
  StyledPolicySpec spec;
  spec.states = states;
  spec.actions = actions;
  spec.style_bias.assign(styles, std::vector<std::vector<double>>(
                                     states, std::vector<double>(actions, 0.0)));
  for (std::size_t k = 0; k < styles; ++k) {
    const double mix = styles > 1 ? static_cast<double>(k) / static_cast<double>(styles - 1) : 0.0;
    for (std::size_t s = 0; s < states; ++s) {
      spec.style_bias[k][s][0] = strength * (1.0 - mix);
      spec.style_bias[k][s][1] = strength * mix;
    }
  }
  return spec;
}

double style_proximity(const StyledPolicySpec& spec, std::size_t a, std::size_t b) {
  double d = 0.0;
  for (std::size_t s = 0; s < spec.states; ++s) {
    for (std::size_t x = 0; x < spec.actions; ++x) {
      d += std::abs(spec.style_bias.at(a)[s][x] - spec.style_bias.at(b)[s][x]);
    }
  }
  return d;
}

TrajectoryDataset gen_styled_dataset(const StyledPolicySpec& spec, std::size_t style,
                                     std::size_t pairs, std::uint64_t seed,
                                     const std::string& id) {
  spec.validate();
  if (style >= spec.style_count()) throw InvalidArgument("style index out of range");
  if (pairs == 0) throw InvalidArgument("a styled dataset needs at least one pair");
  std::vector<std::vector<double>> cumulative(spec.states);
  for (std::size_t s = 0; s < spec.states; ++s) {
    const auto p = spec.policy(style, s);
    double acc = 0.0;
    for (double v : p) cumulative[s].push_back(acc += v);
  }
  Rng rng(seed);
  TrajectoryDataset ds;
  ds.id = id;
  ds.action_space = ActionSpace::discrete(spec.actions);
  std::size_t produced = 0;
  std::int64_t episode = 0;
  while (produced < pairs) {
    Episode ep;
    ep.id = episode++;
    std::size_t s = rng.below(spec.states);
    for (std::size_t t = 0; t < spec.episode_length && produced < pairs; ++t, ++produced) {
      const double u = rng.uniform();
      const auto& cum = cumulative[s];
      std::size_t a = static_cast<std::size_t>(std::upper_bound(cum.begin(), cum.end(), u) -
                                               cum.begin());
      a = std::min(a, spec.actions - 1);
      ep.steps.push_back({VectorObs{{static_cast<double>(s)}}, ActionValue::discrete(a)});
      s = rng.bernoulli(spec.jump) ? rng.below(spec.states) : (s + 1 + a) % spec.states;
    }
    ds.episodes.push_back(std::move(ep));
  }
  return ds;
}

StyledWorld gen_styled_policies(const StyledPolicySpec& spec, std::size_t candidate_pairs,
                                std::size_t query_pairs) {
  spec.validate();
  StyledWorld w;
  const std::size_t k = spec.style_count();
  for (std::size_t i = 0; i < k; ++i) {
    const std::string tag = std::to_string(i);
    w.candidates.push_back(gen_styled_dataset(spec, i, candidate_pairs,
                                              derive_seed(spec.seed, "candidate:" + tag),
                                              "style" + tag));
    w.queries.push_back(gen_styled_dataset(spec, i, query_pairs,
                                           derive_seed(spec.seed, "query:" + tag),
                                           "query" + tag));
  }
  w.proximity.resize(k * k);
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = 0; j < k; ++j) w.proximity[i * k + j] = style_proximity(spec, i, j);
  }
  return w;
}

EncoderSet styled_encoders() {
  return {StateEncoder::singleton(), StateEncoder::identity()};
}

}  // namespace stylemetric
