#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "stylemetric/kernels.hpp"

namespace stylemetric {

// A selectable entity: one element or a team of elements. The id is the
// sorted, deduplicated element list joined by '+'.
struct Composition {
  std::string id;
  std::vector<std::string> elements;

  static Composition from_elements(std::vector<std::string> elements);
  static Composition from_id(std::string_view id);
  bool operator==(const Composition& other) const { return id == other.id; }
};

struct MatchRecord {
  Composition a;
  Composition b;
  double w = 0.5;  // outcome from a's side: 1, 0.5 or 0
};

void validate_outcome(double w);

class CompositionRegistry {
 public:
  std::size_t intern(const Composition& comp);
  std::optional<std::size_t> find(std::string_view id) const;
  const Composition& at(std::size_t index) const { return comps_.at(index); }
  std::size_t size() const { return comps_.size(); }

 private:
  std::vector<Composition> comps_;
  std::unordered_map<std::string, std::size_t> index_;
};

struct IndexedMatch {
  std::size_t a = 0;
  std::size_t b = 0;
  double w = 0.5;
};

struct IndexedLog {
  CompositionRegistry registry;
  std::vector<IndexedMatch> matches;
};

IndexedLog index_matches(std::span<const MatchRecord> matches);

enum class RatingMethod { winvalue, pairwin, elo, bt, melo2 };

RatingMethod parse_rating_method(std::string_view name);
std::string_view rating_method_name(RatingMethod method);

struct RatingOptions {
  double elo_k = 16.0;
  double elo_initial = 1500.0;
  std::size_t bt_epochs = 30;
  double bt_learning_rate = 0.05;
  double melo_eta_r = 1.0;
  double melo_eta_c = 0.1;
  std::size_t melo_epochs = 1;
  std::uint64_t seed = 0;
};

// Running sum of outcomes for an unordered pair, oriented from the lower
// index. Mirror matches add both w and 1 - w.
struct PairStat {
  double sum = 0.0;
  std::size_t count = 0;
  bool operator==(const PairStat&) const = default;
};

// Win table over compositions with dense indices in [0, size()).
struct RatingTable {
  RatingMethod method = RatingMethod::bt;
  std::vector<std::string> ids;
  std::vector<double> rating;                // win value, R, lambda or r
  std::vector<std::array<double, 2>> cyclic;  // mElo2 only
  std::vector<bool> seen;
  std::map<std::pair<std::size_t, std::size_t>, PairStat> pairs;  // pairwin only
  double unseen_rating = 0.0;

  std::size_t size() const { return ids.size(); }
  double predict(std::size_t a, std::size_t b) const;
  WinFunction win_function() const;
  bool operator==(const RatingTable&) const = default;
};

inline constexpr double kEloScale = 400.0;

// 1 / (1 + 10^((rb - ra) / 400)).
double elo_expected(double ra, double rb);

// Online Elo step; the two deltas cancel exactly.
void elo_update(double& ra, double& rb, double outcome, double k);

// Logistic of x, evaluated on the non-negative side and mirrored, so that
// logistic_pair(x) + logistic_pair(-x) == 1 exactly.
double logistic_pair(double x);

// Fits on `matches`; indices refer to a registry of `ids.size()` entries.
RatingTable fit_winvalue(std::span<const IndexedMatch> matches, std::vector<std::string> ids);
RatingTable fit_pairwin(std::span<const IndexedMatch> matches, std::vector<std::string> ids);
RatingTable fit_elo(std::span<const IndexedMatch> matches, std::vector<std::string> ids,
                    const RatingOptions& opts = {});
RatingTable fit_bt(std::span<const IndexedMatch> matches, std::vector<std::string> ids,
                   const RatingOptions& opts = {});
RatingTable fit_melo2(std::span<const IndexedMatch> matches, std::vector<std::string> ids,
                      const RatingOptions& opts = {});
RatingTable fit_rating(RatingMethod method, std::span<const IndexedMatch> matches,
                       std::vector<std::string> ids, const RatingOptions& opts = {});

std::vector<std::string> registry_ids(const CompositionRegistry& registry);

// Ordered pairs with their mean observed win value. Each observed unordered
// pair yields both orientations; a mirror pair yields one entry.
std::vector<PairObservation> pair_observations(std::span<const IndexedMatch> matches,
                                               std::size_t comp_count);

// Percentage of pairs whose predicted three-way label equals the observed one.
double strength_relation_accuracy(const WinFunction& predict,
                                  std::span<const PairObservation> pairs,
                                  Execution exec = Execution::parallel);

}  // namespace stylemetric
