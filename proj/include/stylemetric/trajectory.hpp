#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <map>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace stylemetric {

enum class ActionKind { discrete, continuous };

// Declared action space: a category count for discrete actions or a vector
// dimension for continuous ones.
struct ActionSpace {
  ActionKind kind = ActionKind::discrete;
  std::size_t size = 0;

  static ActionSpace discrete(std::size_t count) {
    return {ActionKind::discrete, count};
  }
  static ActionSpace continuous(std::size_t dim) {
    return {ActionKind::continuous, dim};
  }
  bool operator==(const ActionSpace&) const = default;
};

struct ActionValue {
  ActionKind kind = ActionKind::discrete;
  std::size_t index = 0;           // discrete
  std::vector<double> components;  // continuous

  static ActionValue discrete(std::size_t i) { return {ActionKind::discrete, i, {}}; }
  static ActionValue continuous(std::vector<double> v) {
    return {ActionKind::continuous, 0, std::move(v)};
  }
  bool conforms_to(const ActionSpace& space) const;
  bool operator==(const ActionValue&) const = default;
};

struct VectorObs {
  std::vector<double> values;
  bool operator==(const VectorObs&) const = default;
};

struct ImageObs {
  std::size_t width = 0;
  std::size_t height = 0;
  std::vector<double> data;  // row-major, height x width
  bool operator==(const ImageObs&) const = default;
};

// States already discretized upstream, keyed by encoder id.
struct PrecomputedStates {
  std::map<std::string, std::string> states;
  bool operator==(const PrecomputedStates&) const = default;
};

using Observation = std::variant<VectorObs, ImageObs, PrecomputedStates>;

struct Step {
  Observation obs;
  ActionValue action;
};

struct Episode {
  std::int64_t id = 0;
  std::vector<Step> steps;
};

struct TrajectoryDataset {
  std::string id;
  ActionSpace action_space;
  std::vector<Episode> episodes;

  std::size_t size() const;
  bool empty() const { return size() == 0; }
  // Throws InvalidArgument when empty or when any action or observation
  // disagrees with the dataset-level declaration.
  void validate() const;
};

enum class EncoderKind { singleton, identity, low_res, external };

struct LowResParams {
  std::size_t grid_width = 8;
  std::size_t grid_height = 8;
  std::size_t levels = 16;
};

struct StateEncoder {
  std::string id;
  EncoderKind kind = EncoderKind::identity;
  LowResParams low_res;

  static StateEncoder singleton(std::string id = "singleton") {
    return {std::move(id), EncoderKind::singleton, {}};
  }
  static StateEncoder identity(std::string id = "identity") {
    return {std::move(id), EncoderKind::identity, {}};
  }
  static StateEncoder low_resolution(std::string id = "lowres", LowResParams p = {}) {
    return {std::move(id), EncoderKind::low_res, p};
  }
  static StateEncoder external(std::string id) {
    return {std::move(id), EncoderKind::external, {}};
  }
};

using EncoderSet = std::vector<StateEncoder>;

// Parses "singleton,identity,lowres,ext:<id>". Ids must be unique.
EncoderSet parse_encoder_set(std::string_view text);
void validate_encoder_set(const EncoderSet& encoders);

// Deterministic state key for one observation.
std::string encode_observation(const StateEncoder& encoder, const Observation& obs);

// Block-mean resample to the grid, then uniform quantization over the frame
// min/max with half-up rounding. Returns the quantized cells, row-major.
std::vector<std::uint8_t> low_res_cells(const ImageObs& image, const LowResParams& params,
                                        std::size_t* out_width = nullptr,
                                        std::size_t* out_height = nullptr);

struct StateEntry {
  std::vector<ActionValue> actions;  // in dataset order
  std::size_t visits() const { return actions.size(); }
};

class ScaledStateIndex {
 public:
  ScaledStateIndex(std::string encoder_id, ActionSpace space)
      : encoder_id_(std::move(encoder_id)), space_(space) {}

  const std::string& encoder_id() const { return encoder_id_; }
  const ActionSpace& action_space() const { return space_; }
  const std::map<std::string, StateEntry>& entries() const { return entries_; }
  std::size_t total_visits() const { return total_; }
  std::size_t state_count() const { return entries_.size(); }
  std::size_t visits(const std::string& key) const;
  const StateEntry* find(const std::string& key) const;

  void add(std::string key, ActionValue action);

  bool operator==(const ScaledStateIndex&) const;

 private:
  std::string encoder_id_;
  ActionSpace space_;
  std::map<std::string, StateEntry> entries_;
  std::size_t total_ = 0;
};

ScaledStateIndex build_state_index(const TrajectoryDataset& dataset,
                                   const StateEncoder& encoder);

// One index per encoder, in encoder-set order.
using MultiscaleIndex = std::vector<ScaledStateIndex>;
MultiscaleIndex build_multiscale_index(const TrajectoryDataset& dataset,
                                       const EncoderSet& encoders);

// Keys present in both with at least `threshold` visits on each side, sorted.
std::vector<std::string> filtered_intersection(const ScaledStateIndex& a,
                                               const ScaledStateIndex& b,
                                               std::size_t threshold);

struct NamespacedState {
  std::string encoder_id;
  std::string key;
  auto operator<=>(const NamespacedState&) const = default;
};

enum class SetMode { intersection, union_ };

std::set<NamespacedState> multiscale_union_states(std::span<const ScaledStateIndex> a,
                                                  std::span<const ScaledStateIndex> b,
                                                  SetMode mode);

}  // namespace stylemetric
