#include "stylemetric/counter.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <string>

namespace stylemetric {

CategoryRule parse_category_rule(std::string_view name) {
  if (name == "map") return CategoryRule::map;
  if (name == "sample") return CategoryRule::sample;
  if (name == "expected") return CategoryRule::expected;
  throw InvalidArgument("unknown category rule '" + std::string(name) + "'");
}

std::string_view category_rule_name(CategoryRule rule) {
  switch (rule) {
    case CategoryRule::map: return "map";
    case CategoryRule::sample: return "sample";
    case CategoryRule::expected: return "expected";
  }
  return "?";
}

void EloRccOptions::validate() const {
  if (categories < 1) throw InvalidArgument("category count M must be >= 1");
  if (!(eta_r >= 0.0) || !(eta_t >= 0.0) || !(eta_c >= 0.0 && eta_c <= 1.0)) {
    throw InvalidArgument("learning rates must be >= 0 and eta_c <= 1");
  }
  if (!std::isfinite(initial_rating)) throw InvalidArgument("initial rating must be finite");
}

EloRcc::EloRcc(EloRccOptions opts)
    : opts_(opts), rng_(derive_seed(opts.seed, "elo-rcc")) {
  opts_.validate();
  table_.assign(opts_.categories * opts_.categories, 0.0);
}

std::optional<std::size_t> EloRcc::find(std::string_view id) const {
  const auto it = index_.find(std::string(id));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::size_t EloRcc::register_composition(const std::string& id) {
  if (const auto it = index_.find(id); it != index_.end()) return it->second;
  const std::size_t m = opts_.categories;
  RccComposition c;
  c.id = id;
  c.rating = opts_.initial_rating;
  c.category.assign(m, 1.0 / static_cast<double>(m));
  c.residual.assign(m, 0.0);
  comps_.push_back(std::move(c));
  index_.emplace(id, comps_.size() - 1);
  return comps_.size() - 1;
}

std::size_t EloRcc::sample_category(const std::vector<double>& probs, Rng& rng) const {
  const double u = rng.uniform();
  double acc = 0.0;
  std::size_t last = 0;
  for (std::size_t c = 0; c < probs.size(); ++c) {
    if (probs[c] <= 0.0) continue;
    acc += probs[c];
    last = c;
    if (u < acc) return c;
  }
  return last;
}

void EloRcc::refine_category(RccComposition& comp) {
  const std::size_t m = opts_.categories;
  // D[c] = sum_c' |T[c,c'] - E[c']|. With T antisymmetric this equals
  // sum_c' |T[c',c] + E[c']|, which walks T row by row.
  std::vector<double> dist(m, 0.0);
  for (std::size_t cp = 0; cp < m; ++cp) {
    const double e = comp.residual[cp];
    const double* row = table_.data() + cp * m;
    for (std::size_t c = 0; c < m; ++c) dist[c] += std::abs(row[c] + e);
  }
  const std::size_t best =
      static_cast<std::size_t>(std::min_element(dist.begin(), dist.end()) - dist.begin());
  double total = 0.0;
  for (std::size_t c = 0; c < m; ++c) {
    comp.category[c] = (1.0 - opts_.eta_c) * comp.category[c] + (c == best ? opts_.eta_c : 0.0);
    total += comp.category[c];
  }
  for (double& p : comp.category) p /= total;
}

void EloRcc::update(std::size_t i, std::size_t j, double outcome) {
  validate_outcome(outcome);
  if (i >= comps_.size() || j >= comps_.size()) {
    throw InvalidArgument("elo-rcc update: composition index out of range");
  }
  RccComposition& a = comps_[i];
  RccComposition& b = comps_[j];
  const std::size_t m = opts_.categories;

  const double p = elo_expected(a.rating, b.rating);
  const double delta_a = opts_.eta_r * (outcome - p);
  const double delta_b = opts_.eta_r * ((1.0 - outcome) - (1.0 - p));
  a.rating += delta_a;
  b.rating += delta_b;

  const std::size_t ci = sample_category(a.category, rng_);
  const std::size_t cj = sample_category(b.category, rng_);
  const double residual = outcome - p;

  // The diagonal stays 0: a category has no residual against itself.
  if (ci != cj) {
    double& t = table_[ci * m + cj];
    t += opts_.eta_t * (residual - t);
    table_[cj * m + ci] = -t;
  }
  a.residual[cj] += opts_.eta_t * (residual - a.residual[cj]);
  b.residual[ci] += opts_.eta_t * (-residual - b.residual[ci]);

  ++a.games;
  ++b.games;
  refine_category(a);
  if (i != j) refine_category(b);
}

void EloRcc::update(const std::string& a, const std::string& b, double outcome) {
  const std::size_t i = register_composition(a);
  const std::size_t j = register_composition(b);
  update(i, j, outcome);
}

void EloRcc::fit(std::span<const MatchRecord> matches, std::size_t epochs) {
  std::vector<IndexedMatch> indexed;
  indexed.reserve(matches.size());
  for (const auto& mr : matches) {
    validate_outcome(mr.w);
    indexed.push_back({register_composition(mr.a.id), register_composition(mr.b.id), mr.w});
  }
  std::vector<std::size_t> order(indexed.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng shuffle(derive_seed(opts_.seed, "elo-rcc-replay"));
  for (std::size_t e = 0; e < epochs; ++e) {
    shuffle.shuffle(order);
    for (const std::size_t k : order) update(indexed[k].a, indexed[k].b, indexed[k].w);
  }
}

void EloRcc::fit(std::span<const IndexedMatch> matches, std::span<const std::string> ids,
                 std::size_t epochs) {
  for (std::size_t k = 0; k < ids.size(); ++k) {
    if (register_composition(ids[k]) != k) {
      throw InvalidArgument("elo-rcc fit: ids must be registered in index order");
    }
  }
  for (const auto& mt : matches) {
    if (mt.a >= ids.size() || mt.b >= ids.size()) {
      throw InvalidArgument("match references an unknown composition");
    }
  }
  std::vector<std::size_t> order(matches.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng shuffle(derive_seed(opts_.seed, "elo-rcc-replay"));
  for (std::size_t e = 0; e < epochs; ++e) {
    shuffle.shuffle(order);
    for (const std::size_t k : order) update(matches[k].a, matches[k].b, matches[k].w);
  }
}

std::size_t EloRcc::category_of(std::size_t i) const {
  const auto& c = comps_.at(i).category;
  return static_cast<std::size_t>(std::max_element(c.begin(), c.end()) - c.begin());
}

std::size_t EloRcc::utilized_categories() const {
  std::vector<bool> used(opts_.categories, false);
  for (std::size_t i = 0; i < comps_.size(); ++i) used[category_of(i)] = true;
  return static_cast<std::size_t>(std::count(used.begin(), used.end(), true));
}

double EloRcc::predict(std::size_t a, std::size_t b, CategoryRule rule) const {
  if (a >= comps_.size() || b >= comps_.size()) {
    throw InvalidArgument("elo-rcc predict: composition index out of range");
  }
  const RccComposition& ca = comps_[a];
  const RccComposition& cb = comps_[b];
  if (ca.games == 0 || cb.games == 0) return 0.5;
  if (a == b) return 0.5;
  const double elo = elo_expected(ca.rating, cb.rating);
  double residual = 0.0;
  switch (rule) {
    case CategoryRule::map:
      residual = table_at(category_of(a), category_of(b));
      break;
    case CategoryRule::sample: {
      const std::size_t lo = std::min(a, b);
      const std::size_t hi = std::max(a, b);
      Rng r(derive_seed(opts_.seed, "predict:" + std::to_string(lo) + ":" + std::to_string(hi)));
      const std::size_t x = sample_category(comps_[lo].category, r);
      const std::size_t y = sample_category(comps_[hi].category, r);
      residual = a == lo ? table_at(x, y) : table_at(y, x);
      break;
    }
    case CategoryRule::expected: {
      const std::size_t m = opts_.categories;
      for (std::size_t x = 0; x < m; ++x) {
        double row = 0.0;
        for (std::size_t y = 0; y < m; ++y) row += table_[x * m + y] * cb.category[y];
        residual += ca.category[x] * row;
      }
      break;
    }
  }
  return std::clamp(elo + residual, 0.0, 1.0);
}

double EloRcc::predict(std::string_view a, std::string_view b, CategoryRule rule,
                       bool* flagged) const {
  const auto ia = find(a);
  const auto ib = find(b);
  const bool unknown =
      !ia || !ib || comps_[*ia].games == 0 || comps_[*ib].games == 0;
  if (flagged) *flagged = unknown;
  if (unknown) return 0.5;
  return predict(*ia, *ib, rule);
}

WinFunction EloRcc::win_function(CategoryRule rule) const {
  return [this, rule](std::size_t a, std::size_t b) { return predict(a, b, rule); };
}

EloRcc EloRcc::restore(EloRccOptions opts, std::vector<double> table,
                       std::vector<RccComposition> comps, const std::string& rng_state) {
  EloRcc s(opts);
  const std::size_t m = s.opts_.categories;
  if (table.size() != m * m) throw InvalidArgument("snapshot table must be M x M");
  for (std::size_t x = 0; x < m; ++x) {
    if (table[x * m + x] != 0.0) throw InvalidArgument("snapshot table diagonal must be 0");
    for (std::size_t y = x + 1; y < m; ++y) {
      if (table[x * m + y] != -table[y * m + x]) {
        throw InvalidArgument("snapshot table must be antisymmetric");
      }
    }
  }
  s.table_ = std::move(table);
  for (auto& c : comps) {
    if (c.category.size() != m || c.residual.size() != m) {
      throw InvalidArgument("snapshot composition '" + c.id + "' has vectors of the wrong size");
    }
    double total = 0.0;
    for (double p : c.category) {
      if (!(p >= 0.0)) throw InvalidArgument("category probabilities must be non-negative");
      total += p;
    }
    if (std::abs(total - 1.0) > 1e-9) {
      throw InvalidArgument("category probabilities of '" + c.id + "' must sum to 1");
    }
    if (s.index_.count(c.id)) throw InvalidArgument("duplicate composition '" + c.id + "'");
    s.index_.emplace(c.id, s.comps_.size());
    s.comps_.push_back(std::move(c));
  }
  s.rng_.restore(rng_state);
  return s;
}

bool EloRcc::operator==(const EloRcc& other) const {
  return opts_.categories == other.opts_.categories && opts_.eta_r == other.opts_.eta_r &&
         opts_.eta_t == other.opts_.eta_t && opts_.eta_c == other.opts_.eta_c &&
         opts_.initial_rating == other.opts_.initial_rating && opts_.seed == other.opts_.seed &&
         table_ == other.table_ && comps_ == other.comps_ && rng_.state() == other.rng_.state();
}

std::vector<double> elo_to_strength(std::span<const double> elo) {
  if (elo.empty()) return {};
  const double top = *std::max_element(elo.begin(), elo.end());
  std::vector<double> out;
  out.reserve(elo.size());
  for (double r : elo) {
    const double s = std::exp((r - top) * std::numbers::ln10 / kEloScale);
    out.push_back(std::max(s, std::numeric_limits<double>::min()));
  }
  return out;
}

std::size_t top_d(std::span<const double> ratings, double gap) {
  if (ratings.empty()) throw InvalidArgument("top_d: no ratings");
  if (!(gap >= 0.0 && gap <= 0.5)) throw InvalidArgument("top_d: gap must lie in [0, 0.5]");
  for (double r : ratings) {
    if (!(r > 0.0) || !std::isfinite(r)) throw InvalidArgument("top_d: ratings must be positive");
  }
  const double top = *std::max_element(ratings.begin(), ratings.end());
  std::size_t d = 0;
  for (double r : ratings) {
    if (r / (r + top) + gap >= 0.5) ++d;
  }
  return d;
}

void BalanceInputs::validate() const {
  const std::size_t n = ids.size();
  if (ratings.size() != n || category.size() != n) {
    throw InvalidArgument("balance inputs: ids, ratings and categories differ in length");
  }
  if (categories < 1 || table.size() != categories * categories) {
    throw InvalidArgument("balance inputs: counter table must be M x M");
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (!(ratings[i] > 0.0) || !std::isfinite(ratings[i])) {
      throw InvalidArgument("balance inputs: ratings must be positive");
    }
    if (category[i] >= categories) throw InvalidArgument("balance inputs: category out of range");
  }
}

double contextual_win(const BalanceInputs& in, std::size_t a, std::size_t b) {
  const double ra = in.ratings[a];
  const double rb = in.ratings[b];
  return ra / (ra + rb) + in.table[in.category[a] * in.categories + in.category[b]];
}

TopBResult top_b(const BalanceInputs& in) {
  in.validate();
  if (in.ids.empty()) throw InvalidArgument("top_b: no categories utilized");
  // Highest rating per category; the lowest index wins rating ties.
  std::vector<std::optional<std::size_t>> best(in.categories);
  for (std::size_t i = 0; i < in.ids.size(); ++i) {
    auto& slot = best[in.category[i]];
    if (!slot || in.ratings[i] > in.ratings[*slot]) slot = i;
  }
  TopBResult r;
  for (const auto& s : best) {
    if (s) r.tops.push_back(*s);
  }
  for (const std::size_t c : r.tops) {
    bool dominated = false;
    for (const std::size_t cp : r.tops) {
      if (cp == c) continue;
      bool dominates = true;
      for (const std::size_t cpp : r.tops) {
        if (contextual_win(in, cp, cpp) <= contextual_win(in, c, cpp)) {
          dominates = false;
          break;
        }
      }
      if (dominates) {
        dominated = true;
        break;
      }
    }
    if (!dominated) r.non_dominated.push_back(c);
  }
  r.balance = r.non_dominated.size();
  return r;
}

BalanceInputs balance_inputs(const EloRcc& state) {
  BalanceInputs in;
  in.categories = state.categories();
  in.table = state.table();
  std::vector<double> elo;
  for (std::size_t i = 0; i < state.size(); ++i) {
    in.ids.push_back(state.composition(i).id);
    in.category.push_back(state.category_of(i));
    elo.push_back(state.composition(i).rating);
  }
  in.ratings = elo_to_strength(elo);
  return in;
}

}  // namespace stylemetric
