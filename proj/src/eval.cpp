#include "stylemetric/eval.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "stylemetric/common.hpp"

namespace stylemetric {

MeanStd mean_std(std::span<const double> values) {
  MeanStd r;
  if (values.empty()) return r;
  const double n = static_cast<double>(values.size());
  for (double v : values) r.mean += v;
  r.mean /= n;
  if (values.size() > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - r.mean) * (v - r.mean);
    r.std = std::sqrt(ss / (n - 1.0));
  }
  return r;
}

TrajectoryDataset subsample_pairs(const TrajectoryDataset& dataset, std::size_t pairs,
                                  std::uint64_t seed) {
  if (pairs == 0) throw InvalidArgument("sample size must be >= 1");
  if (dataset.size() <= pairs) return dataset;
  std::vector<const Step*> steps;
  steps.reserve(dataset.size());
  for (const auto& ep : dataset.episodes) {
    for (const auto& st : ep.steps) steps.push_back(&st);
  }
  // Partial Fisher-Yates: the first `pairs` slots hold the sample.
  Rng rng(seed);
  for (std::size_t i = 0; i < pairs; ++i) {
    const std::size_t j = i + rng.below(steps.size() - i);
    std::swap(steps[i], steps[j]);
  }
  TrajectoryDataset out;
  out.id = dataset.id;
  out.action_space = dataset.action_space;
  Episode ep;
  ep.steps.reserve(pairs);
  for (std::size_t i = 0; i < pairs; ++i) ep.steps.push_back(*steps[i]);
  out.episodes.push_back(std::move(ep));
  return out;
}

void RetrievalTask::validate() const {
  if (candidates.empty() || queries.empty()) {
    throw InvalidArgument("retrieval needs candidates and queries");
  }
  if (candidate_labels.size() != candidates.size() || query_labels.size() != queries.size()) {
    throw InvalidArgument("retrieval labels must match the datasets one to one");
  }
  for (const auto& q : query_labels) {
    if (std::find(candidate_labels.begin(), candidate_labels.end(), q) == candidate_labels.end()) {
      throw InvalidArgument("query label '" + q + "' has no candidate");
    }
  }
  if (measures.empty()) throw InvalidArgument("retrieval needs at least one measure");
  if (sample_pairs == 0 || rounds == 0) {
    throw InvalidArgument("sample size and rounds must be >= 1");
  }
  config.validate();
}

std::vector<RetrievalScore> retrieval_accuracy(const RetrievalTask& task, Execution exec) {
  task.validate();
  const std::size_t nc = task.candidates.size();
  const std::size_t nq = task.queries.size();
  std::vector<std::vector<double>> per_round(task.measures.size());
  std::vector<RetrievalScore> scores(task.measures.size());
  for (std::size_t m = 0; m < task.measures.size(); ++m) scores[m].measure = task.measures[m];

  for (std::size_t round = 0; round < task.rounds; ++round) {
    const std::string rtag = "round:" + std::to_string(round);
    std::vector<TrajectoryDataset> sampled;
    sampled.reserve(nc + nq);
    for (std::size_t c = 0; c < nc; ++c) {
      sampled.push_back(subsample_pairs(task.candidates[c], task.sample_pairs,
                                        derive_seed(task.seed, rtag + ":cand:" + std::to_string(c))));
    }
    for (std::size_t q = 0; q < nq; ++q) {
      sampled.push_back(subsample_pairs(task.queries[q], task.sample_pairs,
                                        derive_seed(task.seed, rtag + ":query:" + std::to_string(q))));
    }
    const auto items = build_indices(sampled, task.config.encoders, exec);

    std::vector<std::size_t> correct(task.measures.size(), 0);
    for (std::size_t q = 0; q < nq; ++q) {
      std::vector<IndexPair> pairs;
      for (std::size_t c = 0; c < nc; ++c) pairs.push_back({nc + q, c});
      Rng ties(derive_seed(task.seed, rtag + ":ties:" + std::to_string(q)));
      for (std::size_t m = 0; m < task.measures.size(); ++m) {
        const Measure measure = task.measures[m];
        const auto results = evaluate_batch(items, pairs, measure, task.config, exec);
        std::vector<std::size_t> best;
        double best_value = 0.0;
        for (std::size_t c = 0; c < nc; ++c) {
          if (!results[c].comparable) continue;
          const double v = higher_is_closer(measure) ? results[c].value : -results[c].value;
          if (best.empty() || v > best_value) {
            best.assign(1, c);
            best_value = v;
          } else if (v == best_value) {
            best.push_back(c);
          }
        }
        if (best.empty()) {
          ++scores[m].flagged;
          continue;
        }
        const std::size_t pick = best[best.size() == 1 ? 0 : ties.below(best.size())];
        if (task.candidate_labels[pick] == task.query_labels[q]) ++correct[m];
      }
    }
    for (std::size_t m = 0; m < task.measures.size(); ++m) {
      per_round[m].push_back(100.0 * static_cast<double>(correct[m]) / static_cast<double>(nq));
    }
  }
  for (std::size_t m = 0; m < task.measures.size(); ++m) {
    const MeanStd s = mean_std(per_round[m]);
    scores[m].accuracy = s.mean;
    scores[m].std = s.std;
  }
  return scores;
}

CrossvalMethod parse_crossval_method(std::string_view name) {
  if (name == "elo-rcc" || name == "elorcc" || name == "elo_rcc") return CrossvalMethod::elo_rcc;
  switch (parse_rating_method(name)) {
    case RatingMethod::winvalue: return CrossvalMethod::winvalue;
    case RatingMethod::pairwin: return CrossvalMethod::pairwin;
    case RatingMethod::elo: return CrossvalMethod::elo;
    case RatingMethod::bt: return CrossvalMethod::bt;
    case RatingMethod::melo2: return CrossvalMethod::melo2;
  }
  throw InvalidArgument("unknown method");
}

std::string_view crossval_method_name(CrossvalMethod method) {
  switch (method) {
    case CrossvalMethod::winvalue: return "winvalue";
    case CrossvalMethod::pairwin: return "pairwin";
    case CrossvalMethod::elo: return "elo";
    case CrossvalMethod::bt: return "bt";
    case CrossvalMethod::melo2: return "melo2";
    case CrossvalMethod::elo_rcc: return "elo-rcc";
  }
  return "?";
}

std::vector<std::size_t> fold_assignment(std::size_t match_count, std::size_t folds,
                                         std::uint64_t seed) {
  if (folds < 2) throw InvalidArgument("cross-validation needs at least 2 folds");
  if (match_count < folds) throw InvalidArgument("fewer matches than folds");
  std::vector<std::size_t> order(match_count);
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(derive_seed(seed, "folds"));
  rng.shuffle(order);
  std::vector<std::size_t> fold(match_count);
  for (std::size_t r = 0; r < match_count; ++r) fold[order[r]] = r % folds;
  return fold;
}

namespace {

RatingMethod as_rating_method(CrossvalMethod m) {
  switch (m) {
    case CrossvalMethod::winvalue: return RatingMethod::winvalue;
    case CrossvalMethod::pairwin: return RatingMethod::pairwin;
    case CrossvalMethod::elo: return RatingMethod::elo;
    case CrossvalMethod::bt: return RatingMethod::bt;
    case CrossvalMethod::melo2: return RatingMethod::melo2;
    case CrossvalMethod::elo_rcc: break;
  }
  throw InvalidArgument("not a table rating method");
}

}  // namespace

CrossvalResult crossval_rating(std::span<const MatchRecord> matches, const CrossvalConfig& cfg,
                               Execution exec) {
  const IndexedLog log = index_matches(matches);
  const auto ids = registry_ids(log.registry);
  const auto fold = fold_assignment(log.matches.size(), cfg.folds, cfg.seed);
  CrossvalResult result;
  std::vector<double> train_acc;
  std::vector<double> test_acc;
  for (std::size_t k = 0; k < cfg.folds; ++k) {
    std::vector<IndexedMatch> train;
    std::vector<IndexedMatch> test;
    for (std::size_t i = 0; i < log.matches.size(); ++i) {
      (fold[i] == k ? test : train).push_back(log.matches[i]);
    }
    const auto train_pairs = pair_observations(train, ids.size());
    const auto test_pairs = pair_observations(test, ids.size());
    if (train_pairs.empty() || test_pairs.empty()) {
      throw InvalidArgument("fold " + std::to_string(k) + " has no labelable pairs");
    }
    const std::string ftag = "fold:" + std::to_string(k);
    FoldScore score;
    score.train_pairs = train_pairs.size();
    score.test_pairs = test_pairs.size();
    if (cfg.method == CrossvalMethod::elo_rcc) {
      EloRccOptions opts = cfg.rcc;
      opts.seed = derive_seed(cfg.seed, ftag + ":elo-rcc");
      EloRcc state(opts);
      state.fit(train, ids, cfg.rcc_epochs);
      const WinFunction f = state.win_function(cfg.rule);
      score.train = strength_relation_accuracy(f, train_pairs, exec);
      score.test = strength_relation_accuracy(f, test_pairs, exec);
    } else {
      RatingOptions opts = cfg.rating;
      opts.seed = derive_seed(cfg.seed, ftag + ":rating");
      const RatingTable table = fit_rating(as_rating_method(cfg.method), train, ids, opts);
      const WinFunction f = table.win_function();
      score.train = strength_relation_accuracy(f, train_pairs, exec);
      score.test = strength_relation_accuracy(f, test_pairs, exec);
    }
    train_acc.push_back(score.train);
    test_acc.push_back(score.test);
    result.folds.push_back(score);
  }
  result.train = mean_std(train_acc);
  result.test = mean_std(test_acc);
  return result;
}

}  // namespace stylemetric
