#include "stylemetric/rating.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "stylemetric/common.hpp"

namespace stylemetric {

Composition Composition::from_elements(std::vector<std::string> elements) {
  if (elements.empty()) throw InvalidArgument("composition has no elements");
  for (const auto& e : elements) {
    if (e.empty() || e.find('+') != std::string::npos) {
      throw InvalidArgument("invalid element id '" + e + "'");
    }
  }
  std::sort(elements.begin(), elements.end());
  elements.erase(std::unique(elements.begin(), elements.end()), elements.end());
  Composition c;
  for (std::size_t i = 0; i < elements.size(); ++i) {
    if (i) c.id += '+';
    c.id += elements[i];
  }
  c.elements = std::move(elements);
  return c;
}

Composition Composition::from_id(std::string_view id) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  while (true) {
    const auto plus = id.find('+', start);
    parts.emplace_back(id.substr(start, plus == std::string_view::npos ? id.npos : plus - start));
    if (plus == std::string_view::npos) break;
    start = plus + 1;
  }
  return from_elements(std::move(parts));
}

void validate_outcome(double w) {
  if (w != 0.0 && w != 0.5 && w != 1.0) {
    throw InvalidArgument("match outcome must be 0, 0.5 or 1");
  }
}

std::size_t CompositionRegistry::intern(const Composition& comp) {
  const auto it = index_.find(comp.id);
  if (it != index_.end()) return it->second;
  const std::size_t i = comps_.size();
  comps_.push_back(comp);
  index_.emplace(comp.id, i);
  return i;
}

std::optional<std::size_t> CompositionRegistry::find(std::string_view id) const {
  const auto it = index_.find(std::string(id));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

IndexedLog index_matches(std::span<const MatchRecord> matches) {
  IndexedLog log;
  log.matches.reserve(matches.size());
  for (const auto& m : matches) {
    validate_outcome(m.w);
    const std::size_t a = log.registry.intern(m.a);
    const std::size_t b = log.registry.intern(m.b);
    log.matches.push_back({a, b, m.w});
  }
  return log;
}

std::vector<std::string> registry_ids(const CompositionRegistry& registry) {
  std::vector<std::string> ids;
  ids.reserve(registry.size());
  for (std::size_t i = 0; i < registry.size(); ++i) ids.push_back(registry.at(i).id);
  return ids;
}

RatingMethod parse_rating_method(std::string_view name) {
  if (name == "winvalue") return RatingMethod::winvalue;
  if (name == "pairwin") return RatingMethod::pairwin;
  if (name == "elo") return RatingMethod::elo;
  if (name == "bt") return RatingMethod::bt;
  if (name == "melo2") return RatingMethod::melo2;
  throw InvalidArgument("unknown rating method '" + std::string(name) + "'");
}

std::string_view rating_method_name(RatingMethod method) {
  switch (method) {
    case RatingMethod::winvalue: return "winvalue";
    case RatingMethod::pairwin: return "pairwin";
    case RatingMethod::elo: return "elo";
    case RatingMethod::bt: return "bt";
    case RatingMethod::melo2: return "melo2";
  }
  return "?";
}

double elo_expected(double ra, double rb) {
  return 1.0 / (1.0 + std::pow(10.0, (rb - ra) / kEloScale));
}

void elo_update(double& ra, double& rb, double outcome, double k) {
  if (!(k > 0.0)) throw InvalidArgument("Elo K must be positive");
  const double delta = k * (outcome - elo_expected(ra, rb));
  ra += delta;
  rb -= delta;
}

double logistic_pair(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  return 1.0 - 1.0 / (1.0 + std::exp(x));
}

namespace {

double elo_pair(double ra, double rb) {
  const double d = ra - rb;
  if (d >= 0.0) return 1.0 / (1.0 + std::pow(10.0, -d / kEloScale));
  return 1.0 - 1.0 / (1.0 + std::pow(10.0, d / kEloScale));
}

RatingTable empty_table(RatingMethod method, std::vector<std::string> ids) {
  RatingTable t;
  t.method = method;
  t.rating.assign(ids.size(), 0.0);
  t.seen.assign(ids.size(), false);
  t.ids = std::move(ids);
  return t;
}

void check_matches(std::span<const IndexedMatch> matches, std::size_t n) {
  if (matches.empty()) throw InvalidArgument("no matches to fit");
  for (const auto& m : matches) {
    if (m.a >= n || m.b >= n) throw InvalidArgument("match references an unknown composition");
    validate_outcome(m.w);
  }
}

void mark_seen(RatingTable& t, std::span<const IndexedMatch> matches) {
  for (const auto& m : matches) {
    t.seen[m.a] = true;
    t.seen[m.b] = true;
  }
}

std::map<std::pair<std::size_t, std::size_t>, PairStat> accumulate_pairs(
    std::span<const IndexedMatch> matches) {
  std::map<std::pair<std::size_t, std::size_t>, PairStat> pairs;
  for (const auto& m : matches) {
    if (m.a == m.b) {
      auto& s = pairs[{m.a, m.a}];
      s.sum += m.w + (1.0 - m.w);
      s.count += 2;
    } else if (m.a < m.b) {
      auto& s = pairs[{m.a, m.b}];
      s.sum += m.w;
      s.count += 1;
    } else {
      auto& s = pairs[{m.b, m.a}];
      s.sum += 1.0 - m.w;
      s.count += 1;
    }
  }
  return pairs;
}

double oriented_mean(const PairStat& s, bool flipped) {
  const double m = s.sum / static_cast<double>(s.count);
  return flipped ? 1.0 - m : m;
}

}  // namespace

double RatingTable::predict(std::size_t a, std::size_t b) const {
  if (a >= size() || b >= size()) throw InvalidArgument("predict: composition index out of range");
  switch (method) {
    case RatingMethod::winvalue: {
      if (!seen[a] || !seen[b]) return 0.5;
      return std::clamp(0.5 + (rating[a] - rating[b]), 0.0, 1.0);
    }
    case RatingMethod::pairwin: {
      const auto it = pairs.find({std::min(a, b), std::max(a, b)});
      if (it == pairs.end()) return 0.5;
      return oriented_mean(it->second, a > b);
    }
    case RatingMethod::elo: {
      const double ra = seen[a] ? rating[a] : unseen_rating;
      const double rb = seen[b] ? rating[b] : unseen_rating;
      return elo_pair(ra, rb);
    }
    case RatingMethod::bt: {
      const double la = seen[a] ? rating[a] : unseen_rating;
      const double lb = seen[b] ? rating[b] : unseen_rating;
      return logistic_pair(la - lb);
    }
    case RatingMethod::melo2: {
      if (!seen[a] || !seen[b]) return 0.5;
      const auto& ca = cyclic[a];
      const auto& cb = cyclic[b];
      // r_a - r_b + c_a^T Omega c_b changes sign exactly when a and b swap.
      const double x = (rating[a] - rating[b]) + (ca[0] * cb[1] - ca[1] * cb[0]);
      return logistic_pair(x);
    }
  }
  return 0.5;
}

WinFunction RatingTable::win_function() const {
  return [this](std::size_t a, std::size_t b) { return predict(a, b); };
}

RatingTable fit_winvalue(std::span<const IndexedMatch> matches, std::vector<std::string> ids) {
  RatingTable t = empty_table(RatingMethod::winvalue, std::move(ids));
  check_matches(matches, t.size());
  std::vector<double> sum(t.size(), 0.0);
  std::vector<std::size_t> count(t.size(), 0);
  for (const auto& m : matches) {
    sum[m.a] += m.w;
    ++count[m.a];
    sum[m.b] += 1.0 - m.w;
    ++count[m.b];
  }
  for (std::size_t i = 0; i < t.size(); ++i) {
    t.seen[i] = count[i] > 0;
    t.rating[i] = count[i] ? sum[i] / static_cast<double>(count[i]) : 0.5;
  }
  t.unseen_rating = 0.5;
  return t;
}

RatingTable fit_pairwin(std::span<const IndexedMatch> matches, std::vector<std::string> ids) {
  RatingTable t = empty_table(RatingMethod::pairwin, std::move(ids));
  check_matches(matches, t.size());
  mark_seen(t, matches);
  t.pairs = accumulate_pairs(matches);
  t.unseen_rating = 0.5;
  return t;
}

RatingTable fit_elo(std::span<const IndexedMatch> matches, std::vector<std::string> ids,
                    const RatingOptions& opts) {
  RatingTable t = empty_table(RatingMethod::elo, std::move(ids));
  check_matches(matches, t.size());
  mark_seen(t, matches);
  std::fill(t.rating.begin(), t.rating.end(), opts.elo_initial);
  for (const auto& m : matches) {
    if (m.a == m.b) continue;
    elo_update(t.rating[m.a], t.rating[m.b], m.w, opts.elo_k);
  }
  t.unseen_rating = opts.elo_initial;
  return t;
}

RatingTable fit_bt(std::span<const IndexedMatch> matches, std::vector<std::string> ids,
                   const RatingOptions& opts) {
  RatingTable t = empty_table(RatingMethod::bt, std::move(ids));
  check_matches(matches, t.size());
  if (!(opts.bt_learning_rate > 0.0)) throw InvalidArgument("BT learning rate must be positive");
  mark_seen(t, matches);
  std::vector<std::size_t> order(matches.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(derive_seed(opts.seed, "bt"));
  auto& lambda = t.rating;
  for (std::size_t epoch = 0; epoch < opts.bt_epochs; ++epoch) {
    rng.shuffle(order);
    for (const std::size_t i : order) {
      const auto& m = matches[i];
      if (m.a == m.b) continue;
      const double p = logistic_pair(lambda[m.a] - lambda[m.b]);
      // d/d lambda_a of (w - p)^2 is -2 (w - p) p (1 - p).
      const double step = opts.bt_learning_rate * 2.0 * (m.w - p) * p * (1.0 - p);
      lambda[m.a] += step;
      lambda[m.b] -= step;
    }
  }
  double sum = 0.0;
  std::size_t n = 0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (t.seen[i]) {
      sum += lambda[i];
      ++n;
    }
  }
  t.unseen_rating = n ? sum / static_cast<double>(n) : 0.0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (!t.seen[i]) lambda[i] = t.unseen_rating;
  }
  return t;
}

RatingTable fit_melo2(std::span<const IndexedMatch> matches, std::vector<std::string> ids,
                      const RatingOptions& opts) {
  RatingTable t = empty_table(RatingMethod::melo2, std::move(ids));
  check_matches(matches, t.size());
  mark_seen(t, matches);
  Rng rng(derive_seed(opts.seed, "melo2"));
  t.cyclic.resize(t.size());
  for (auto& c : t.cyclic) {
    c[0] = 0.1 * rng.normal();
    c[1] = 0.1 * rng.normal();
  }
  auto& r = t.rating;
  for (std::size_t epoch = 0; epoch < opts.melo_epochs; ++epoch) {
    for (const auto& m : matches) {
      if (m.a == m.b) continue;
      auto& ca = t.cyclic[m.a];
      auto& cb = t.cyclic[m.b];
      const double p = logistic_pair((r[m.a] - r[m.b]) + (ca[0] * cb[1] - ca[1] * cb[0]));
      const double delta = m.w - p;
      r[m.a] += opts.melo_eta_r * delta;
      r[m.b] -= opts.melo_eta_r * delta;
      // Omega c = (c1, -c0).
      const std::array<double, 2> ga{cb[1], -cb[0]};
      const std::array<double, 2> gb{ca[1], -ca[0]};
      for (int k = 0; k < 2; ++k) {
        ca[k] += opts.melo_eta_c * delta * ga[k];
        cb[k] -= opts.melo_eta_c * delta * gb[k];
      }
    }
  }
  t.unseen_rating = 0.0;
  return t;
}

RatingTable fit_rating(RatingMethod method, std::span<const IndexedMatch> matches,
                       std::vector<std::string> ids, const RatingOptions& opts) {
  switch (method) {
    case RatingMethod::winvalue: return fit_winvalue(matches, std::move(ids));
    case RatingMethod::pairwin: return fit_pairwin(matches, std::move(ids));
    case RatingMethod::elo: return fit_elo(matches, std::move(ids), opts);
    case RatingMethod::bt: return fit_bt(matches, std::move(ids), opts);
    case RatingMethod::melo2: return fit_melo2(matches, std::move(ids), opts);
  }
  throw InvalidArgument("unknown rating method");
}

std::vector<PairObservation> pair_observations(std::span<const IndexedMatch> matches,
                                               std::size_t comp_count) {
  for (const auto& m : matches) {
    if (m.a >= comp_count || m.b >= comp_count) {
      throw InvalidArgument("match references an unknown composition");
    }
  }
  const auto pairs = accumulate_pairs(matches);
  std::vector<PairObservation> out;
  out.reserve(2 * pairs.size());
  for (const auto& [key, stat] : pairs) {
    const auto [lo, hi] = key;
    if (lo == hi) {
      out.push_back({lo, hi, oriented_mean(stat, false), stat.count / 2});
    } else {
      out.push_back({lo, hi, oriented_mean(stat, false), stat.count});
      out.push_back({hi, lo, oriented_mean(stat, true), stat.count});
    }
  }
  return out;
}

double strength_relation_accuracy(const WinFunction& predict,
                                  std::span<const PairObservation> pairs, Execution exec) {
  if (pairs.empty()) throw InvalidArgument("no labeled pairs to evaluate");
  const std::size_t correct = count_label_agreement(pairs, predict, exec);
  return 100.0 * static_cast<double>(correct) / static_cast<double>(pairs.size());
}

}  // namespace stylemetric
