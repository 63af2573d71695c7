#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "stylemetric/counter.hpp"
#include "stylemetric/measures.hpp"
#include "stylemetric/rating.hpp"
#include "stylemetric/trajectory.hpp"

namespace stylemetric {

struct MeanStd {
  double mean = 0.0;
  double std = 0.0;  // sample standard deviation; 0 for a single value
};

MeanStd mean_std(std::span<const double> values);

// Uniform sample of `pairs` steps without replacement, as one episode. The
// whole dataset is returned when it is not larger than `pairs`.
TrajectoryDataset subsample_pairs(const TrajectoryDataset& dataset, std::size_t pairs,
                                  std::uint64_t seed);

struct RetrievalTask {
  std::vector<TrajectoryDataset> candidates;
  std::vector<std::string> candidate_labels;
  std::vector<TrajectoryDataset> queries;
  std::vector<std::string> query_labels;
  std::vector<Measure> measures{Measure::similarity};
  MeasureConfig config;
  std::size_t sample_pairs = 512;  // drawn from every query and candidate per round
  std::size_t rounds = 10;
  std::uint64_t seed = 0;

  void validate() const;
};

struct RetrievalScore {
  Measure measure = Measure::similarity;
  double accuracy = 0.0;  // percent, mean over rounds
  double std = 0.0;       // across rounds
  std::size_t flagged = 0;  // queries with no comparable candidate
};

// Each query picks the candidate with the highest similarity (lowest
// distance); ties are broken uniformly at random from the task seed.
std::vector<RetrievalScore> retrieval_accuracy(const RetrievalTask& task,
                                               Execution exec = Execution::parallel);

enum class CrossvalMethod { winvalue, pairwin, elo, bt, melo2, elo_rcc };

CrossvalMethod parse_crossval_method(std::string_view name);
std::string_view crossval_method_name(CrossvalMethod method);

struct CrossvalConfig {
  CrossvalMethod method = CrossvalMethod::bt;
  std::size_t folds = 5;
  std::uint64_t seed = 0;
  RatingOptions rating;
  EloRccOptions rcc;
  std::size_t rcc_epochs = 5;
  CategoryRule rule = CategoryRule::map;
};

struct FoldScore {
  double train = 0.0;
  double test = 0.0;
  std::size_t train_pairs = 0;
  std::size_t test_pairs = 0;
};

struct CrossvalResult {
  std::vector<FoldScore> folds;
  MeanStd train;
  MeanStd test;
};

// Fold index for every match; a shuffled round-robin split that partitions
// the log exactly.
std::vector<std::size_t> fold_assignment(std::size_t match_count, std::size_t folds,
                                         std::uint64_t seed);

CrossvalResult crossval_rating(std::span<const MatchRecord> matches, const CrossvalConfig& cfg,
                               Execution exec = Execution::parallel);

}  // namespace stylemetric
