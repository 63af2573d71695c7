#include "stylemetric/comparison.hpp"

#include "stylemetric/common.hpp"

namespace stylemetric {

std::size_t PairComparison::compared_states() const {
  std::size_t n = 0;
  for (const auto& e : encoders) n += e.states.size();
  return n;
}

std::size_t PairComparison::intersected() const {
  std::size_t n = 0;
  for (const auto& e : encoders) n += e.intersected;
  return n;
}

std::size_t PairComparison::union_count() const {
  std::size_t n = 0;
  for (const auto& e : encoders) n += e.union_count;
  return n;
}

PairComparison compare_pair(const MultiscaleIndex& a, const MultiscaleIndex& b,
                            DistanceMetric metric, std::size_t threshold) {
  if (a.size() != b.size()) throw InvalidArgument("compare_pair: encoder sets differ");
  if (threshold < 1) throw InvalidArgument("compare_pair: threshold must be >= 1");
  PairComparison out;
  out.encoders.reserve(a.size());
  for (std::size_t e = 0; e < a.size(); ++e) {
    const ScaledStateIndex& ia = a[e];
    const ScaledStateIndex& ib = b[e];
    if (ia.encoder_id() != ib.encoder_id()) {
      throw InvalidArgument("compare_pair: encoder ids differ at position " + std::to_string(e));
    }
    if (!(ia.action_space() == ib.action_space())) {
      throw InvalidArgument("compare_pair: datasets declare different action spaces");
    }
    EncoderComparison enc;
    enc.encoder_id = ia.encoder_id();
    auto pa = ia.entries().begin();
    auto pb = ib.entries().begin();
    const auto ea = ia.entries().end();
    const auto eb = ib.entries().end();
    std::size_t only = 0;
    while (pa != ea || pb != eb) {
      if (pb == eb || (pa != ea && pa->first < pb->first)) {
        ++only;
        ++pa;
      } else if (pa == ea || pb->first < pa->first) {
        ++only;
        ++pb;
      } else {
        ++enc.intersected;
        const std::size_t va = pa->second.visits();
        const std::size_t vb = pb->second.visits();
        if (va >= threshold && vb >= threshold) {
          const auto pol_a = empirical_policy(pa->second.actions, ia.action_space());
          const auto pol_b = empirical_policy(pb->second.actions, ib.action_space());
          enc.states.push_back({pa->first, action_distance(metric, pol_a, pol_b), va, vb});
        }
        ++pa;
        ++pb;
      }
    }
    enc.union_count = enc.intersected + only;
    out.encoders.push_back(std::move(enc));
  }
  return out;
}

}  // namespace stylemetric
