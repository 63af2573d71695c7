#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "stylemetric/common.hpp"
#include "stylemetric/kernels.hpp"
#include "stylemetric/rating.hpp"

namespace stylemetric {

// How a composition's category is chosen when predicting.
// map: argmax of C, lowest index on ties. sample: one draw from C, seeded by
// the state seed and the pair. expected: C_a^T T C_b.
enum class CategoryRule { map, sample, expected };

CategoryRule parse_category_rule(std::string_view name);
std::string_view category_rule_name(CategoryRule rule);

struct EloRccOptions {
  std::size_t categories = 81;
  double eta_r = 0.1;
  double eta_t = 0.00025;
  double eta_c = 0.01;
  double initial_rating = 1500.0;
  std::uint64_t seed = 0;

  void validate() const;
};

struct RccComposition {
  std::string id;
  double rating = 0.0;
  std::vector<double> category;  // probability vector over M
  std::vector<double> residual;  // expected residual against each category
  std::size_t games = 0;
  bool operator==(const RccComposition&) const = default;
};

// Elo rating plus residual counter categories, learned online one match at a
// time. Single writer; const members are safe for concurrent readers.
class EloRcc {
 public:
  explicit EloRcc(EloRccOptions opts = {});

  const EloRccOptions& options() const { return opts_; }
  std::size_t categories() const { return opts_.categories; }
  std::size_t size() const { return comps_.size(); }
  const RccComposition& composition(std::size_t i) const { return comps_.at(i); }
  std::optional<std::size_t> find(std::string_view id) const;

  // Counter table, row-major M x M, antisymmetric with a zero diagonal.
  const std::vector<double>& table() const { return table_; }
  double table_at(std::size_t x, std::size_t y) const { return table_[x * opts_.categories + y]; }

  // Fresh compositions start at the initial rating, uniform C and zero E.
  std::size_t register_composition(const std::string& id);

  void update(std::size_t i, std::size_t j, double outcome);
  void update(const std::string& a, const std::string& b, double outcome);

  // Multi-epoch replay in a shuffled order drawn from the state seed.
  void fit(std::span<const MatchRecord> matches, std::size_t epochs);
  // Indexed replay; `ids` are registered first, in order, so state indices
  // equal match indices.
  void fit(std::span<const IndexedMatch> matches, std::span<const std::string> ids,
           std::size_t epochs);

  std::size_t category_of(std::size_t i) const;
  std::size_t utilized_categories() const;

  double predict(std::size_t a, std::size_t b, CategoryRule rule = CategoryRule::map) const;
  // Unregistered or never-played compositions predict 0.5; `flagged` reports it.
  double predict(std::string_view a, std::string_view b, CategoryRule rule = CategoryRule::map,
                 bool* flagged = nullptr) const;
  WinFunction win_function(CategoryRule rule = CategoryRule::map) const;

  std::string rng_state() const { return rng_.state(); }

  // Rebuilds a state from its parts, e.g. a loaded snapshot.
  static EloRcc restore(EloRccOptions opts, std::vector<double> table,
                        std::vector<RccComposition> comps, const std::string& rng_state);

  bool operator==(const EloRcc& other) const;

 private:
  std::size_t sample_category(const std::vector<double>& probs, Rng& rng) const;
  void refine_category(RccComposition& comp);

  EloRccOptions opts_;
  std::vector<double> table_;
  std::vector<RccComposition> comps_;
  std::unordered_map<std::string, std::size_t> index_;
  Rng rng_;
};

// Strength on the Bradley-Terry scale for an Elo rating, normalized so the
// largest rating maps to 1.
std::vector<double> elo_to_strength(std::span<const double> elo);

// Number of compositions c with R(c)/(R(c)+R(top)) + gap >= 0.5.
std::size_t top_d(std::span<const double> ratings, double gap);

struct BalanceInputs {
  std::vector<std::string> ids;
  std::vector<double> ratings;        // positive strengths
  std::vector<std::size_t> category;  // per composition
  std::size_t categories = 0;
  std::vector<double> table;  // M x M residuals, row-major

  void validate() const;
};

struct TopBResult {
  std::size_t balance = 0;
  std::vector<std::size_t> tops;           // top-rated composition per used category
  std::vector<std::size_t> non_dominated;  // subset of tops
};

// Contextual win value: rating ratio plus the category residual, unclamped.
double contextual_win(const BalanceInputs& in, std::size_t a, std::size_t b);

TopBResult top_b(const BalanceInputs& in);

BalanceInputs balance_inputs(const EloRcc& state);

}  // namespace stylemetric
