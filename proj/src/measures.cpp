#include "stylemetric/measures.hpp"

#include <cmath>
#include <string>

#include "stylemetric/common.hpp"

namespace stylemetric {

Measure parse_measure(std::string_view name) {
  if (name == "distance") return Measure::distance;
  if (name == "inter" || name == "intersection") return Measure::intersection;
  if (name == "jaccard") return Measure::jaccard;
  if (name == "psim" || name == "similarity") return Measure::similarity;
  throw InvalidArgument("unknown measure '" + std::string(name) + "'");
}

std::string_view measure_name(Measure measure) {
  switch (measure) {
    case Measure::distance: return "distance";
    case Measure::intersection: return "inter";
    case Measure::jaccard: return "jaccard";
    case Measure::similarity: return "psim";
  }
  return "?";
}

Averaging parse_averaging(std::string_view name) {
  if (name == "uniform") return Averaging::uniform;
  if (name == "expected") return Averaging::expected;
  throw InvalidArgument("unknown averaging '" + std::string(name) + "'");
}

std::string_view averaging_name(Averaging averaging) {
  return averaging == Averaging::uniform ? "uniform" : "expected";
}

void MeasureConfig::validate() const {
  validate_encoder_set(encoders);
  if (threshold < 1 || similarity_threshold < 1) {
    throw InvalidArgument("visit thresholds must be >= 1");
  }
  if (fixed_scale && !(*fixed_scale > 0.0 && std::isfinite(*fixed_scale))) {
    throw InvalidArgument("fixed kernel scale must be positive");
  }
}

double perceptual_kernel(double d) {
  if (!(d >= 0.0)) throw InvalidArgument("perceptual_kernel: distance must be non-negative");
  return std::exp(-d);
}

double kernel_value(DistanceMetric metric, double local, double scale) {
  switch (metric) {
    case DistanceMetric::bc: return local;
    case DistanceMetric::bd: return perceptual_kernel(local);
    default: return perceptual_kernel(local / scale);
  }
}

double batch_scale(std::span<const PairComparison> batch, DistanceMetric metric) {
  if (metric == DistanceMetric::bc || metric == DistanceMetric::bd) return 1.0;
  double sum = 0.0;
  std::size_t n = 0;
  for (const auto& pc : batch) {
    for (const auto& enc : pc.encoders) {
      for (const auto& s : enc.states) {
        sum += s.value;
        ++n;
      }
    }
  }
  if (n == 0) return 1.0;
  const double mean = sum / static_cast<double>(n);
  return mean > 0.0 ? mean : 1.0;
}

namespace {

void fill_counts(ComparisonResult& r, const PairComparison& pc) {
  r.intersected = pc.intersected();
  r.union_count = pc.union_count();
}

double resolve_scale(const MeasureConfig& cfg, double scale) {
  if (cfg.fixed_scale) return *cfg.fixed_scale;
  if (!(scale > 0.0)) throw InvalidArgument("kernel scale must be positive");
  return scale;
}

// Sum of kernel values over the compared states, with optional details
// weighted by 1/denominator.
double kernel_sum(const PairComparison& pc, const MeasureConfig& cfg, double scale,
                  double denominator, std::vector<StateDetail>* details) {
  double sum = 0.0;
  for (const auto& enc : pc.encoders) {
    for (const auto& s : enc.states) {
      sum += kernel_value(cfg.metric, s.value, scale);
      if (details) details->push_back({enc.encoder_id, s.key, s.value, 1.0 / denominator});
    }
  }
  return sum;
}

}  // namespace

ComparisonResult distance_from(const PairComparison& pc, const MeasureConfig& cfg) {
  if (cfg.metric == DistanceMetric::bc) {
    throw InvalidArgument("the Bhattacharyya coefficient is a similarity, not a distance");
  }
  ComparisonResult r;
  fill_counts(r, pc);
  double sum_ab = 0.0;
  double sum_ba = 0.0;
  std::size_t used = 0;
  for (const auto& enc : pc.encoders) {
    if (enc.states.empty()) continue;
    ++used;
    if (cfg.averaging == Averaging::uniform) {
      double s = 0.0;
      for (const auto& st : enc.states) s += st.value;
      const double d = s / static_cast<double>(enc.states.size());
      sum_ab += d;
      sum_ba += d;
    } else {
      double mass_a = 0.0;
      double mass_b = 0.0;
      double wa = 0.0;
      double wb = 0.0;
      for (const auto& st : enc.states) {
        const double va = static_cast<double>(st.visits_a);
        const double vb = static_cast<double>(st.visits_b);
        mass_a += va;
        mass_b += vb;
        wa += st.value * va;
        wb += st.value * vb;
      }
      // d(A|B) weights by B's visits, d(B|A) by A's.
      sum_ab += wb / mass_b;
      sum_ba += wa / mass_a;
    }
  }
  if (used == 0) {
    r.comparable = false;
    r.value = std::nan("");
    return r;
  }
  const double n = static_cast<double>(used);
  r.value = 0.5 * (sum_ab / n + sum_ba / n);
  if (cfg.keep_details) {
    for (const auto& enc : pc.encoders) {
      if (enc.states.empty()) continue;
      double mass_a = 0.0;
      double mass_b = 0.0;
      for (const auto& st : enc.states) {
        mass_a += static_cast<double>(st.visits_a);
        mass_b += static_cast<double>(st.visits_b);
      }
      for (const auto& st : enc.states) {
        const double w = cfg.averaging == Averaging::uniform
                             ? 1.0 / static_cast<double>(enc.states.size())
                             : 0.5 * (static_cast<double>(st.visits_b) / mass_b +
                                      static_cast<double>(st.visits_a) / mass_a);
        r.details.push_back({enc.encoder_id, st.key, st.value, w / n});
      }
    }
  }
  return r;
}

ComparisonResult intersection_from(const PairComparison& pc, const MeasureConfig& cfg,
                                   double scale) {
  ComparisonResult r;
  fill_counts(r, pc);
  const std::size_t n = pc.compared_states();
  if (n == 0) {
    r.comparable = false;
    r.value = std::nan("");
    return r;
  }
  const double denom = static_cast<double>(n);
  const double sum = kernel_sum(pc, cfg, resolve_scale(cfg, scale), denom,
                                cfg.keep_details ? &r.details : nullptr);
  r.value = sum / denom;
  return r;
}

ComparisonResult jaccard_from(const PairComparison& pc, const MeasureConfig& cfg) {
  ComparisonResult r;
  fill_counts(r, pc);
  if (r.union_count == 0) throw InvalidArgument("jaccard_index: both state sets are empty");
  r.value = static_cast<double>(r.intersected) / static_cast<double>(r.union_count);
  (void)cfg;
  return r;
}

ComparisonResult similarity_from(const PairComparison& pc, const MeasureConfig& cfg,
                                 double scale) {
  ComparisonResult r;
  fill_counts(r, pc);
  if (r.union_count == 0) throw InvalidArgument("playstyle_similarity: both state sets are empty");
  const double denom = static_cast<double>(r.union_count);
  const double sum = kernel_sum(pc, cfg, resolve_scale(cfg, scale), denom,
                                cfg.keep_details ? &r.details : nullptr);
  r.value = sum / denom;
  return r;
}

ComparisonResult evaluate(Measure measure, const PairComparison& pc, const MeasureConfig& cfg,
                          double scale) {
  switch (measure) {
    case Measure::distance: return distance_from(pc, cfg);
    case Measure::intersection: return intersection_from(pc, cfg, scale);
    case Measure::jaccard: return jaccard_from(pc, cfg);
    case Measure::similarity: return similarity_from(pc, cfg, scale);
  }
  throw InvalidArgument("unknown measure");
}

std::vector<ComparisonResult> evaluate_batch(std::span<const MultiscaleIndex> items,
                                             std::span<const IndexPair> pairs, Measure measure,
                                             const MeasureConfig& cfg, Execution exec) {
  cfg.validate();
  if (measure == Measure::distance && cfg.metric == DistanceMetric::bc) {
    throw InvalidArgument("the Bhattacharyya coefficient is a similarity, not a distance");
  }
  const auto comparisons =
      compare_pairs(items, pairs, cfg.metric, cfg.threshold_for(measure), exec);
  const double scale = cfg.fixed_scale ? *cfg.fixed_scale : batch_scale(comparisons, cfg.metric);
  std::vector<ComparisonResult> out;
  out.reserve(comparisons.size());
  for (const auto& pc : comparisons) out.push_back(evaluate(measure, pc, cfg, scale));
  return out;
}

ComparisonResult measure_pair(Measure measure, const TrajectoryDataset& a,
                              const TrajectoryDataset& b, const MeasureConfig& cfg) {
  cfg.validate();
  const std::vector<MultiscaleIndex> items{build_multiscale_index(a, cfg.encoders),
                                           build_multiscale_index(b, cfg.encoders)};
  const IndexPair pair{0, 1};
  auto results = evaluate_batch(items, std::span(&pair, 1), measure, cfg, Execution::serial);
  ComparisonResult r = std::move(results.front());
  if (!r.comparable) {
    throw NoComparableContext("datasets '" + a.id + "' and '" + b.id +
                              "' share no state at any scale under the visit threshold");
  }
  return r;
}

ComparisonResult playstyle_distance(const TrajectoryDataset& a, const TrajectoryDataset& b,
                                    const MeasureConfig& cfg) {
  return measure_pair(Measure::distance, a, b, cfg);
}

ComparisonResult intersection_similarity(const TrajectoryDataset& a, const TrajectoryDataset& b,
                                         const MeasureConfig& cfg) {
  return measure_pair(Measure::intersection, a, b, cfg);
}

ComparisonResult jaccard_index(const TrajectoryDataset& a, const TrajectoryDataset& b,
                               const MeasureConfig& cfg) {
  return measure_pair(Measure::jaccard, a, b, cfg);
}

ComparisonResult playstyle_similarity(const TrajectoryDataset& a, const TrajectoryDataset& b,
                                      const MeasureConfig& cfg) {
  return measure_pair(Measure::similarity, a, b, cfg);
}

std::optional<std::size_t> spectrum_consistency(std::span<const double> values,
                                                bool higher_is_closer) {
  if (values.size() < 2) throw InvalidArgument("spectrum_consistency needs at least 2 candidates");
  for (std::size_t i = 1; i < values.size(); ++i) {
    const bool ok = higher_is_closer ? values[i] < values[i - 1] : values[i] > values[i - 1];
    if (!ok) return i;
  }
  return std::nullopt;
}

std::optional<std::size_t> spectrum_consistency(const TrajectoryDataset& query,
                                                std::span<const TrajectoryDataset> ordered,
                                                Measure measure, const MeasureConfig& cfg) {
  if (ordered.size() < 2) throw InvalidArgument("spectrum_consistency needs at least 2 candidates");
  cfg.validate();
  std::vector<MultiscaleIndex> items{build_multiscale_index(query, cfg.encoders)};
  for (auto& idx : build_indices(ordered, cfg.encoders)) items.push_back(std::move(idx));
  std::vector<IndexPair> pairs;
  for (std::size_t i = 1; i < items.size(); ++i) pairs.push_back({0, i});
  const auto results = evaluate_batch(items, pairs, measure, cfg);
  std::vector<double> values;
  for (std::size_t i = 0; i < results.size(); ++i) {
    if (!results[i].comparable) return i;
    values.push_back(results[i].value);
  }
  return spectrum_consistency(values, higher_is_closer(measure));
}

}  // namespace stylemetric
