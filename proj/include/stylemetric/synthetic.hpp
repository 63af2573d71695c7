#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "stylemetric/rating.hpp"
#include "stylemetric/trajectory.hpp"

namespace stylemetric {

// Rock-paper-scissors. Strategies 0, 1, 2 are rock, paper, scissors.
inline constexpr std::array<const char*, 3> kRpsNames{"rock", "paper", "scissors"};

// Outcome for the first strategy: 1 win, 0.5 mirror, 0 loss.
double rps_outcome(std::size_t a, std::size_t b);
std::vector<MatchRecord> gen_rps(std::size_t match_count, std::uint64_t seed);

struct CombinationGameSpec {
  std::size_t elements = 20;
  std::size_t team_size = 3;
  bool rps_bonus = false;
  double bonus = 60.0;
  std::size_t match_count = 100000;
  std::uint64_t seed = 0;

  void validate() const;
};

// Element scores are 1..elements; ids are "e01", "e02", ...
std::string element_id(int score);

// All teams as ascending score lists, in lexicographic order.
std::vector<std::vector<int>> enumerate_teams(std::size_t elements, std::size_t team_size);

Composition team_composition(const std::vector<int>& team);
int team_score(const std::vector<int>& team);

// Type of a base score: score mod 3, with 0 rock, 1 paper, 2 scissors.
int score_type(int score);
bool type_beats(int x, int y);

// Probability that a side with base score sa beats one with sb. With the bonus
// the side whose type wins adds `bonus` before squaring.
double combination_win_probability(int sa, int sb, bool rps_bonus, double bonus = 60.0);

std::vector<MatchRecord> gen_combination(const CombinationGameSpec& spec);
std::vector<MatchRecord> gen_simple_combination(CombinationGameSpec spec);
std::vector<MatchRecord> gen_advanced_combination(CombinationGameSpec spec);

// Three teams with analytic Win(a,b), Win(b,c), Win(c,a) all above 0.5.
std::optional<std::array<std::vector<int>, 3>> find_intransitive_triple(
    const CombinationGameSpec& spec);

// A small Markov world in which each style is a per-state softmax policy.
// Taking action a in state s leads to (s + 1 + a) mod S, or with probability
// `jump` to a uniformly drawn state. Observations are the state index.
struct StyledPolicySpec {
  std::size_t states = 12;
  std::size_t actions = 5;
  // style x state x action logits
  std::vector<std::vector<std::vector<double>>> style_bias;
  std::size_t episode_length = 64;
  double jump = 0.1;
  std::uint64_t seed = 0;

  std::size_t style_count() const { return style_bias.size(); }
  void validate() const;
  std::vector<double> policy(std::size_t style, std::size_t state) const;
};

// Style k strongly prefers action (s + k) mod A in state s.
StyledPolicySpec separated_styles(std::size_t styles, std::size_t states = 12,
                                  std::size_t actions = 5, double strength = 2.0);

// Styles interpolate between preferring action 0 and action 1 in every state,
// with equally spaced mixing weights.
StyledPolicySpec spectrum_styles(std::size_t styles, std::size_t states = 12,
                                 std::size_t actions = 5, double strength = 3.0);

// L1 distance between the flattened logits of two styles.
double style_proximity(const StyledPolicySpec& spec, std::size_t a, std::size_t b);

// One dataset of `pairs` observation-action pairs for a style.
TrajectoryDataset gen_styled_dataset(const StyledPolicySpec& spec, std::size_t style,
                                     std::size_t pairs, std::uint64_t seed,
                                     const std::string& id);

struct StyledWorld {
  std::vector<TrajectoryDataset> candidates;  // one per style
  std::vector<TrajectoryDataset> queries;     // one per style, independent draws
  std::vector<double> proximity;              // styles x styles, row-major
};

StyledWorld gen_styled_policies(const StyledPolicySpec& spec, std::size_t candidate_pairs,
                                std::size_t query_pairs);

// Encoders that fit the styled world's vector observations.
EncoderSet styled_encoders();

}  // namespace stylemetric
