#include "stylemetric/trajectory.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <unordered_set>

#include "stylemetric/common.hpp"

namespace stylemetric {

bool ActionValue::conforms_to(const ActionSpace& space) const {
  if (kind != space.kind) return false;
  if (kind == ActionKind::discrete) return index < space.size;
  return components.size() == space.size;
}

std::size_t TrajectoryDataset::size() const {
  std::size_t n = 0;
  for (const auto& ep : episodes) n += ep.steps.size();
  return n;
}

namespace {

struct ObsShape {
  std::size_t variant = 0;
  std::size_t width = 0;
  std::size_t height = 0;
  bool operator==(const ObsShape&) const = default;
};

ObsShape shape_of(const Observation& obs) {
  ObsShape shape{obs.index(), 0, 0};
  if (const auto* v = std::get_if<VectorObs>(&obs)) {
    shape.width = v->values.size();
  } else if (const auto* img = std::get_if<ImageObs>(&obs)) {
    shape.width = img->width;
    shape.height = img->height;
  }
  return shape;
}

}  // namespace

void TrajectoryDataset::validate() const {
  if (empty()) throw InvalidArgument("dataset '" + id + "' is empty");
  if (action_space.size == 0) {
    throw InvalidArgument("dataset '" + id + "' declares an empty action space");
  }
  bool first = true;
  ObsShape expected;
  for (const auto& ep : episodes) {
    for (const auto& step : ep.steps) {
      if (!step.action.conforms_to(action_space)) {
        throw InvalidArgument("dataset '" + id + "' episode " + std::to_string(ep.id) +
                              ": action does not conform to the action space");
      }
      if (const auto* img = std::get_if<ImageObs>(&step.obs)) {
        if (img->data.size() != img->width * img->height || img->data.empty()) {
          throw InvalidArgument("dataset '" + id + "': image data does not match w*h");
        }
      }
      const ObsShape shape = shape_of(step.obs);
      if (first) {
        expected = shape;
        first = false;
      } else if (!(shape == expected)) {
        throw InvalidArgument("dataset '" + id + "' episode " + std::to_string(ep.id) +
                              ": observation shape differs from the dataset's");
      }
    }
  }
}

void validate_encoder_set(const EncoderSet& encoders) {
  if (encoders.empty()) throw InvalidArgument("encoder set is empty");
  std::unordered_set<std::string> seen;
  for (const auto& enc : encoders) {
    if (enc.id.empty()) throw InvalidArgument("encoder id is empty");
    if (!seen.insert(enc.id).second) {
      throw InvalidArgument("duplicate encoder id '" + enc.id + "'");
    }
    if (enc.kind == EncoderKind::low_res &&
        (enc.low_res.grid_width == 0 || enc.low_res.grid_height == 0 ||
         enc.low_res.levels < 2 || enc.low_res.levels > 16)) {
      throw InvalidArgument("low-res encoder '" + enc.id +
                            "' needs a non-empty grid and 2..16 levels");
    }
  }
}

EncoderSet parse_encoder_set(std::string_view text) {
  EncoderSet out;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t comma = text.find(',', pos);
    const std::string_view item =
        text.substr(pos, comma == std::string_view::npos ? std::string_view::npos : comma - pos);
    if (item == "singleton") {
      out.push_back(StateEncoder::singleton());
    } else if (item == "identity") {
      out.push_back(StateEncoder::identity());
    } else if (item == "lowres") {
      out.push_back(StateEncoder::low_resolution());
    } else if (item.starts_with("ext:") && item.size() > 4) {
      out.push_back(StateEncoder::external(std::string(item.substr(4))));
    } else {
      throw InvalidArgument("unknown encoder '" + std::string(item) + "'");
    }
    if (comma == std::string_view::npos) break;
    pos = comma + 1;
  }
  validate_encoder_set(out);
  return out;
}

namespace {

void append_bits(std::string& key, double value) {
  if (value == 0.0) value = 0.0;  // fold -0.0
  key += hex64(std::bit_cast<std::uint64_t>(value));
}

std::string identity_key(const Observation& obs) {
  std::string key;
  if (const auto* v = std::get_if<VectorObs>(&obs)) {
    key = "v:";
    for (double x : v->values) append_bits(key, x);
  } else if (const auto* img = std::get_if<ImageObs>(&obs)) {
    key = "i" + std::to_string(img->width) + "x" + std::to_string(img->height) + ":";
    for (double x : img->data) append_bits(key, x);
  } else {
    throw InvalidArgument("identity encoder needs raw vector or image observations");
  }
  return key;
}

}  // namespace

std::vector<std::uint8_t> low_res_cells(const ImageObs& image, const LowResParams& params,
                                        std::size_t* out_width, std::size_t* out_height) {
  if (image.width == 0 || image.height == 0 || image.data.size() != image.width * image.height) {
    throw InvalidArgument("low-res encoder: malformed image");
  }
  const std::size_t gw = std::min(params.grid_width, image.width);
  const std::size_t gh = std::min(params.grid_height, image.height);
  std::vector<double> means(gw * gh, 0.0);
  for (std::size_t gy = 0; gy < gh; ++gy) {
    const std::size_t y0 = gy * image.height / gh;
    const std::size_t y1 = (gy + 1) * image.height / gh;
    for (std::size_t gx = 0; gx < gw; ++gx) {
      const std::size_t x0 = gx * image.width / gw;
      const std::size_t x1 = (gx + 1) * image.width / gw;
      double sum = 0.0;
      for (std::size_t y = y0; y < y1; ++y) {
        for (std::size_t x = x0; x < x1; ++x) sum += image.data[y * image.width + x];
      }
      means[gy * gw + gx] = sum / static_cast<double>((y1 - y0) * (x1 - x0));
    }
  }
  const auto [lo, hi] = std::minmax_element(means.begin(), means.end());
  const double low = *lo;
  const double span = *hi - low;
  const double top = static_cast<double>(params.levels - 1);
  std::vector<std::uint8_t> cells(means.size(), 0);
  if (span > 0.0) {
    for (std::size_t i = 0; i < means.size(); ++i) {
      const double level = std::floor((means[i] - low) / span * top + 0.5);
      cells[i] = static_cast<std::uint8_t>(std::clamp(level, 0.0, top));
    }
  }
  if (out_width) *out_width = gw;
  if (out_height) *out_height = gh;
  return cells;
}

std::string encode_observation(const StateEncoder& encoder, const Observation& obs) {
  switch (encoder.kind) {
    case EncoderKind::singleton:
      return "*";
    case EncoderKind::identity:
      return identity_key(obs);
    case EncoderKind::low_res: {
      ImageObs frame;
      if (const auto* img = std::get_if<ImageObs>(&obs)) {
        frame = *img;
      } else if (const auto* v = std::get_if<VectorObs>(&obs)) {
        frame = ImageObs{v->values.size(), 1, v->values};
      } else {
        throw InvalidArgument("low-res encoder needs raw vector or image observations");
      }
      std::size_t w = 0;
      std::size_t h = 0;
      const auto cells = low_res_cells(frame, encoder.low_res, &w, &h);
      static constexpr char kDigits[] = "0123456789abcdef";
      std::string key = "q" + std::to_string(w) + "x" + std::to_string(h) + ":";
      for (auto c : cells) key += kDigits[c];
      return key;
    }
    case EncoderKind::external: {
      const auto* pre = std::get_if<PrecomputedStates>(&obs);
      if (pre == nullptr) {
        throw InvalidArgument("external encoder '" + encoder.id +
                              "' needs precomputed states in the observation");
      }
      const auto it = pre->states.find(encoder.id);
      if (it == pre->states.end()) {
        throw InvalidArgument("observation has no precomputed state for encoder '" +
                              encoder.id + "'");
      }
      return it->second;
    }
  }
  throw InvalidArgument("unknown encoder kind");
}

std::size_t ScaledStateIndex::visits(const std::string& key) const {
  const auto it = entries_.find(key);
  return it == entries_.end() ? 0 : it->second.visits();
}

const StateEntry* ScaledStateIndex::find(const std::string& key) const {
  const auto it = entries_.find(key);
  return it == entries_.end() ? nullptr : &it->second;
}

void ScaledStateIndex::add(std::string key, ActionValue action) {
  if (!action.conforms_to(space_)) {
    throw InvalidArgument("action does not conform to the index action space");
  }
  entries_[std::move(key)].actions.push_back(std::move(action));
  ++total_;
}

bool ScaledStateIndex::operator==(const ScaledStateIndex& other) const {
  if (encoder_id_ != other.encoder_id_ || !(space_ == other.space_) || total_ != other.total_ ||
      entries_.size() != other.entries_.size()) {
    return false;
  }
  auto it = other.entries_.begin();
  for (const auto& [key, entry] : entries_) {
    if (key != it->first || entry.actions != it->second.actions) return false;
    ++it;
  }
  return true;
}

ScaledStateIndex build_state_index(const TrajectoryDataset& dataset, const StateEncoder& encoder) {
  if (dataset.empty()) throw InvalidArgument("dataset '" + dataset.id + "' is empty");
  ScaledStateIndex index(encoder.id, dataset.action_space);
  for (const auto& ep : dataset.episodes) {
    for (const auto& step : ep.steps) {
      index.add(encode_observation(encoder, step.obs), step.action);
    }
  }
  return index;
}

MultiscaleIndex build_multiscale_index(const TrajectoryDataset& dataset,
                                       const EncoderSet& encoders) {
  validate_encoder_set(encoders);
  MultiscaleIndex out;
  out.reserve(encoders.size());
  for (const auto& enc : encoders) out.push_back(build_state_index(dataset, enc));
  return out;
}

std::vector<std::string> filtered_intersection(const ScaledStateIndex& a,
                                               const ScaledStateIndex& b,
                                               std::size_t threshold) {
  if (a.encoder_id() != b.encoder_id()) {
    throw InvalidArgument("filtered_intersection: encoder ids differ ('" + a.encoder_id() +
                          "' vs '" + b.encoder_id() + "')");
  }
  if (threshold < 1) throw InvalidArgument("filtered_intersection: threshold must be >= 1");
  std::vector<std::string> keys;
  auto ia = a.entries().begin();
  auto ib = b.entries().begin();
  while (ia != a.entries().end() && ib != b.entries().end()) {
    if (ia->first < ib->first) {
      ++ia;
    } else if (ib->first < ia->first) {
      ++ib;
    } else {
      if (ia->second.visits() >= threshold && ib->second.visits() >= threshold) {
        keys.push_back(ia->first);
      }
      ++ia;
      ++ib;
    }
  }
  return keys;
}

std::set<NamespacedState> multiscale_union_states(std::span<const ScaledStateIndex> a,
                                                  std::span<const ScaledStateIndex> b,
                                                  SetMode mode) {
  if (a.size() != b.size()) throw InvalidArgument("encoder sets differ in size");
  std::set<NamespacedState> out;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].encoder_id() != b[i].encoder_id()) {
      throw InvalidArgument("encoder sets differ at position " + std::to_string(i));
    }
    const std::string& enc = a[i].encoder_id();
    if (mode == SetMode::intersection) {
      for (auto& key : filtered_intersection(a[i], b[i], 1)) out.insert({enc, std::move(key)});
    } else {
      for (const auto& [key, _] : a[i].entries()) out.insert({enc, key});
      for (const auto& [key, _] : b[i].entries()) out.insert({enc, key});
    }
  }
  return out;
}

}  // namespace stylemetric
