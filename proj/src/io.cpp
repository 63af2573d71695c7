#include "stylemetric/io.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <set>
#include <sstream>

#include "stylemetric/common.hpp"

namespace stylemetric {

namespace {

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidArgument("cannot open '" + path.string() + "'");
  return in;
}

std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw InvalidArgument("cannot write '" + path.string() + "'");
  return out;
}

bool blank(std::string_view line) {
  return std::all_of(line.begin(), line.end(),
                     [](char c) { return c == ' ' || c == '\t' || c == '\r'; });
}

Json parse_line(const std::string& line, std::size_t lineno) {
  try {
    Json doc = Json::parse(line);
    if (!doc.is_object()) throw ParseError(lineno, "record must be a JSON object");
    return doc;
  } catch (const Json::parse_error& e) {
    throw ParseError(lineno, std::string("malformed JSON: ") + e.what());
  }
}

const Json& field(const Json& doc, const char* name, std::size_t lineno) {
  auto it = doc.find(name);
  if (it == doc.end()) throw ParseError(lineno, std::string("missing field \"") + name + "\"");
  return *it;
}

std::vector<double> number_array(const Json& v, const char* what, std::size_t lineno) {
  if (!v.is_array()) throw ParseError(lineno, std::string(what) + " must be an array");
  std::vector<double> out;
  out.reserve(v.size());
  for (const auto& x : v) {
    if (!x.is_number()) throw ParseError(lineno, std::string(what) + " must hold numbers");
    const double d = x.get<double>();
    if (!std::isfinite(d)) throw ParseError(lineno, std::string(what) + " must be finite");
    out.push_back(d);
  }
  return out;
}

std::int64_t integer(const Json& v, const char* what, std::size_t lineno) {
  if (!v.is_number_integer()) throw ParseError(lineno, std::string(what) + " must be an integer");
  return v.get<std::int64_t>();
}

enum class ObsKind { vec, img, states };

struct ObsShape {
  ObsKind kind = ObsKind::vec;
  std::size_t a = 0;  // vector length or image width
  std::size_t b = 0;  // image height
};

Observation parse_observation(const Json& obs, std::size_t lineno, ObsShape& shape) {
  if (!obs.is_object() || obs.size() != 1) {
    throw ParseError(lineno, "obs must hold exactly one of vec, img, states");
  }
  if (auto it = obs.find("vec"); it != obs.end()) {
    VectorObs v{number_array(*it, "obs.vec", lineno)};
    shape = {ObsKind::vec, v.values.size(), 0};
    return v;
  }
  if (auto it = obs.find("img"); it != obs.end()) {
    const Json& img = *it;
    if (!img.is_object()) throw ParseError(lineno, "obs.img must be an object");
    const auto w = integer(field(img, "w", lineno), "obs.img.w", lineno);
    const auto h = integer(field(img, "h", lineno), "obs.img.h", lineno);
    if (w < 1 || h < 1) throw ParseError(lineno, "image dimensions must be >= 1");
    ImageObs im;
    im.width = static_cast<std::size_t>(w);
    im.height = static_cast<std::size_t>(h);
    im.data = number_array(field(img, "data", lineno), "obs.img.data", lineno);
    if (im.data.size() != im.width * im.height) {
      throw ParseError(lineno, "image data length " + std::to_string(im.data.size()) +
                                   " does not equal w*h = " +
                                   std::to_string(im.width * im.height));
    }
    shape = {ObsKind::img, im.width, im.height};
    return im;
  }
  if (auto it = obs.find("states"); it != obs.end()) {
    if (!it->is_object() || it->empty()) {
      throw ParseError(lineno, "obs.states must be a non-empty object");
    }
    PrecomputedStates ps;
    for (const auto& [enc, key] : it->items()) {
      if (!key.is_string()) throw ParseError(lineno, "state key for '" + enc + "' must be a string");
      ps.states.emplace(enc, key.get<std::string>());
    }
    shape = {ObsKind::states, 0, 0};
    return ps;
  }
  throw ParseError(lineno, "obs must hold exactly one of vec, img, states");
}

ActionValue parse_action(const Json& action, std::size_t lineno) {
  if (!action.is_object() || action.size() != 1) {
    throw ParseError(lineno, "action must hold exactly one of d, c");
  }
  if (auto it = action.find("d"); it != action.end()) {
    const auto d = integer(*it, "action.d", lineno);
    if (d < 0) throw ParseError(lineno, "action.d must be non-negative");
    return ActionValue::discrete(static_cast<std::size_t>(d));
  }
  if (auto it = action.find("c"); it != action.end()) {
    auto c = number_array(*it, "action.c", lineno);
    if (c.empty()) throw ParseError(lineno, "action.c must not be empty");
    return ActionValue::continuous(std::move(c));
  }
  throw ParseError(lineno, "action must hold exactly one of d, c");
}

struct DatasetBuilder {
  TrajectoryDataset dataset;
  std::map<std::int64_t, std::size_t> episode_slot;
  std::map<std::int64_t, std::int64_t> last_step;
  std::optional<ObsShape> shape;
  std::optional<ActionKind> kind;
  std::size_t dim = 0;
  std::size_t max_index = 0;
};

Json composition_json(const Composition& c) { return c.id; }

Composition parse_composition(const Json& v, const char* what, std::size_t lineno) {
  if (v.is_string()) {
    const auto s = v.get<std::string>();
    if (s.empty()) throw ParseError(lineno, std::string(what) + " must not be empty");
    try {
      return Composition::from_id(s);
    } catch (const InvalidArgument& e) {
      throw ParseError(lineno, e.what());
    }
  }
  if (v.is_array()) {
    std::vector<std::string> elems;
    for (const auto& x : v) {
      if (!x.is_string() || x.get<std::string>().empty()) {
        throw ParseError(lineno, std::string(what) + " elements must be non-empty strings");
      }
      elems.push_back(x.get<std::string>());
    }
    if (elems.empty()) throw ParseError(lineno, std::string(what) + " must not be empty");
    try {
      return Composition::from_elements(std::move(elems));
    } catch (const InvalidArgument& e) {
      throw ParseError(lineno, e.what());
    }
  }
  throw ParseError(lineno, std::string(what) + " must be a string or an array of strings");
}

Json number_vector(std::span<const double> v) {
  Json arr = Json::array();
  for (double x : v) arr.push_back(x);
  return arr;
}

std::vector<double> read_numbers(const Json& v, const char* what) {
  if (!v.is_array()) throw InvalidArgument(std::string(what) + " must be an array");
  std::vector<double> out;
  out.reserve(v.size());
  for (const auto& x : v) {
    if (!x.is_number()) throw InvalidArgument(std::string(what) + " must hold numbers");
    out.push_back(x.get<double>());
  }
  return out;
}

const Json& member(const Json& doc, const char* name) {
  if (!doc.is_object()) throw InvalidArgument("expected a JSON object");
  auto it = doc.find(name);
  if (it == doc.end()) throw InvalidArgument(std::string("missing field \"") + name + "\"");
  return *it;
}

std::string xml_escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace

std::vector<TrajectoryDataset> read_trajectories(std::istream& in,
                                                 const TrajectoryLoadOptions& opts) {
  std::set<std::string> externals;
  for (const auto& e : opts.encoders) {
    if (e.kind == EncoderKind::external) externals.insert(e.id);
  }
  std::vector<DatasetBuilder> builders;
  std::map<std::string, std::size_t> slot;
  std::optional<ActionKind> file_kind;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (blank(line)) continue;
    const Json doc = parse_line(line, lineno);
    const Json& id_field = field(doc, "dataset", lineno);
    if (!id_field.is_string()) throw ParseError(lineno, "dataset must be a string");
    const std::string id = id_field.get<std::string>();
    const std::int64_t episode = integer(field(doc, "episode", lineno), "episode", lineno);

    ObsShape shape;
    Observation obs = parse_observation(field(doc, "obs", lineno), lineno, shape);
    ActionValue action = parse_action(field(doc, "action", lineno), lineno);

    if (file_kind && *file_kind != action.kind) {
      throw ParseError(lineno, "mixed discrete and continuous actions");
    }
    file_kind = action.kind;
    if (opts.action_space) {
      const ActionSpace& space = *opts.action_space;
      if (space.kind != action.kind) {
        throw ParseError(lineno, "action kind disagrees with the declared action space");
      }
      if (!action.conforms_to(space)) {
        throw ParseError(lineno, action.kind == ActionKind::discrete
                                     ? "action " + std::to_string(action.index) +
                                           " outside declared count " + std::to_string(space.size)
                                     : "action dimension " +
                                           std::to_string(action.components.size()) +
                                           " differs from declared " + std::to_string(space.size));
      }
    }
    if (!externals.empty()) {
      if (const auto* ps = std::get_if<PrecomputedStates>(&obs)) {
        for (const auto& [enc, key] : ps->states) {
          if (!externals.count(enc)) {
            throw ParseError(lineno, "unknown encoder id '" + enc + "' in precomputed states");
          }
        }
      }
    }

    auto [it, fresh] = slot.try_emplace(id, builders.size());
    if (fresh) {
      builders.emplace_back();
      builders.back().dataset.id = id;
    }
    DatasetBuilder& b = builders[it->second];
    if (b.shape) {
      if (b.shape->kind != shape.kind) {
        throw ParseError(lineno, "observation kind differs from earlier records of '" + id + "'");
      }
      if (b.shape->a != shape.a || b.shape->b != shape.b) {
        throw ParseError(lineno, "observation shape differs from earlier records of '" + id + "'");
      }
    }
    b.shape = shape;
    if (action.kind == ActionKind::continuous) {
      if (b.dim != 0 && b.dim != action.components.size()) {
        throw ParseError(lineno, "continuous action dimension differs from earlier records");
      }
      b.dim = action.components.size();
    } else {
      b.max_index = std::max(b.max_index, action.index);
    }
    b.kind = action.kind;

    if (auto step = doc.find("step"); step != doc.end()) {
      const std::int64_t s = integer(*step, "step", lineno);
      auto [last, first_step] = b.last_step.try_emplace(episode, s);
      if (!first_step) {
        if (s <= last->second) throw ParseError(lineno, "step indices must increase within an episode");
        last->second = s;
      }
    }
    auto [ep, new_ep] = b.episode_slot.try_emplace(episode, b.dataset.episodes.size());
    if (new_ep) {
      b.dataset.episodes.emplace_back();
      b.dataset.episodes.back().id = episode;
    }
    b.dataset.episodes[ep->second].steps.push_back({std::move(obs), std::move(action)});
  }
  if (builders.empty()) throw InvalidArgument("trajectory file holds no records");

  std::vector<TrajectoryDataset> out;
  out.reserve(builders.size());
  for (auto& b : builders) {
    if (opts.action_space) {
      b.dataset.action_space = *opts.action_space;
    } else if (*b.kind == ActionKind::discrete) {
      b.dataset.action_space = ActionSpace::discrete(b.max_index + 1);
    } else {
      b.dataset.action_space = ActionSpace::continuous(b.dim);
    }
    out.push_back(std::move(b.dataset));
  }
  // Datasets in one file share the action space so that they stay comparable.
  if (!opts.action_space && out.front().action_space.kind == ActionKind::discrete) {
    std::size_t count = 0;
    for (const auto& d : out) count = std::max(count, d.action_space.size);
    for (auto& d : out) d.action_space.size = count;
  }
  for (const auto& d : out) {
    if (d.action_space != out.front().action_space) {
      throw InvalidArgument("datasets in one file disagree on the action dimension");
    }
    d.validate();
  }
  return out;
}

std::vector<TrajectoryDataset> load_trajectory_file(const std::filesystem::path& path,
                                                    const TrajectoryLoadOptions& opts) {
  auto in = open_input(path);
  return read_trajectories(in, opts);
}

TrajectoryDataset load_trajectories(const std::filesystem::path& path,
                                    const TrajectoryLoadOptions& opts) {
  auto all = load_trajectory_file(path, opts);
  if (all.size() != 1) {
    throw InvalidArgument("'" + path.string() + "' holds " + std::to_string(all.size()) +
                          " datasets; expected one");
  }
  return std::move(all.front());
}

void write_trajectories(std::ostream& out, const TrajectoryDataset& dataset) {
  for (const auto& ep : dataset.episodes) {
    std::int64_t step = 0;
    for (const auto& st : ep.steps) {
      Json rec;
      rec["dataset"] = dataset.id;
      rec["episode"] = ep.id;
      rec["step"] = step++;
      Json obs;
      if (const auto* v = std::get_if<VectorObs>(&st.obs)) {
        obs["vec"] = number_vector(v->values);
      } else if (const auto* im = std::get_if<ImageObs>(&st.obs)) {
        obs["img"] = {{"w", im->width}, {"h", im->height}, {"data", number_vector(im->data)}};
      } else {
        Json states = Json::object();
        for (const auto& [enc, key] : std::get<PrecomputedStates>(st.obs).states) states[enc] = key;
        obs["states"] = states;
      }
      rec["obs"] = obs;
      if (st.action.kind == ActionKind::discrete) {
        rec["action"] = {{"d", st.action.index}};
      } else {
        rec["action"] = {{"c", number_vector(st.action.components)}};
      }
      out << rec.dump() << '\n';
    }
  }
}

std::vector<MatchRecord> read_matches(std::istream& in) {
  std::vector<MatchRecord> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (blank(line)) continue;
    const Json doc = parse_line(line, lineno);
    MatchRecord m;
    m.a = parse_composition(field(doc, "a", lineno), "a", lineno);
    m.b = parse_composition(field(doc, "b", lineno), "b", lineno);
    const Json& w = field(doc, "w", lineno);
    if (!w.is_number()) throw ParseError(lineno, "w must be a number");
    m.w = w.get<double>();
    if (m.w != 0.0 && m.w != 0.5 && m.w != 1.0) throw ParseError(lineno, "w must be 1, 0.5 or 0");
    out.push_back(std::move(m));
  }
  if (out.empty()) throw InvalidArgument("match log holds no records");
  return out;
}

std::vector<MatchRecord> load_matches(const std::filesystem::path& path) {
  auto in = open_input(path);
  return read_matches(in);
}

void write_matches(std::ostream& out, std::span<const MatchRecord> matches) {
  for (const auto& m : matches) {
    Json rec;
    rec["a"] = composition_json(m.a);
    rec["b"] = composition_json(m.b);
    rec["w"] = m.w;
    out << rec.dump() << '\n';
  }
}

Json rating_to_json(const RatingTable& table) {
  Json doc;
  doc["method"] = rating_method_name(table.method);
  doc["ids"] = table.ids;
  Json ratings = Json::object();
  for (std::size_t i = 0; i < table.size(); ++i) ratings[table.ids[i]] = table.rating[i];
  doc["ratings"] = ratings;
  if (!table.cyclic.empty()) {
    Json cyc = Json::object();
    for (std::size_t i = 0; i < table.size(); ++i) {
      cyc[table.ids[i]] = {table.cyclic[i][0], table.cyclic[i][1]};
    }
    doc["vectors"] = cyc;
  }
  Json unseen = Json::array();
  for (std::size_t i = 0; i < table.size(); ++i) {
    if (!table.seen[i]) unseen.push_back(table.ids[i]);
  }
  doc["unseen"] = unseen;
  doc["unseen_rating"] = table.unseen_rating;
  if (!table.pairs.empty()) {
    Json pairs = Json::array();
    for (const auto& [key, stat] : table.pairs) {
      pairs.push_back({{"a", table.ids[key.first]},
                       {"b", table.ids[key.second]},
                       {"sum", stat.sum},
                       {"count", stat.count}});
    }
    doc["pairs"] = pairs;
  }
  return doc;
}

RatingTable rating_from_json(const Json& doc) {
  RatingTable t;
  t.method = parse_rating_method(member(doc, "method").get<std::string>());
  t.ids = member(doc, "ids").get<std::vector<std::string>>();
  std::map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < t.ids.size(); ++i) {
    if (!index.emplace(t.ids[i], i).second) throw InvalidArgument("duplicate id '" + t.ids[i] + "'");
  }
  const auto lookup = [&](const std::string& id) {
    auto it = index.find(id);
    if (it == index.end()) throw InvalidArgument("unknown id '" + id + "'");
    return it->second;
  };
  const Json& ratings = member(doc, "ratings");
  if (!ratings.is_object() || ratings.size() != t.ids.size()) {
    throw InvalidArgument("ratings must map every id");
  }
  t.rating.assign(t.ids.size(), 0.0);
  for (const auto& [id, v] : ratings.items()) t.rating[lookup(id)] = v.get<double>();
  if (auto it = doc.find("vectors"); it != doc.end()) {
    t.cyclic.assign(t.ids.size(), {0.0, 0.0});
    for (const auto& [id, v] : it->items()) {
      const auto c = read_numbers(v, "vector");
      if (c.size() != 2) throw InvalidArgument("vectors must have two components");
      t.cyclic[lookup(id)] = {c[0], c[1]};
    }
  }
  if (t.method == RatingMethod::melo2 && t.cyclic.size() != t.ids.size()) {
    throw InvalidArgument("melo2 export needs a vector for every id");
  }
  t.seen.assign(t.ids.size(), true);
  for (const auto& id : member(doc, "unseen")) t.seen[lookup(id.get<std::string>())] = false;
  t.unseen_rating = member(doc, "unseen_rating").get<double>();
  if (auto it = doc.find("pairs"); it != doc.end()) {
    for (const auto& p : *it) {
      const std::size_t a = lookup(member(p, "a").get<std::string>());
      const std::size_t b = lookup(member(p, "b").get<std::string>());
      if (a > b) throw InvalidArgument("pair entries must be ordered by index");
      t.pairs[{a, b}] = {member(p, "sum").get<double>(), member(p, "count").get<std::size_t>()};
    }
  }
  return t;
}

std::vector<double> rating_strengths(const RatingTable& table) {
  if (table.size() == 0) throw InvalidArgument("rating table is empty");
  switch (table.method) {
    case RatingMethod::elo:
      return elo_to_strength(table.rating);
    case RatingMethod::bt:
    case RatingMethod::melo2: {
      const double top = *std::max_element(table.rating.begin(), table.rating.end());
      std::vector<double> out;
      for (double r : table.rating) {
        out.push_back(std::max(std::exp(r - top), std::numeric_limits<double>::min()));
      }
      return out;
    }
    case RatingMethod::winvalue: {
      std::vector<double> out;
      for (double r : table.rating) out.push_back(std::max(r, std::numeric_limits<double>::min()));
      return out;
    }
    case RatingMethod::pairwin:
      break;
  }
  throw InvalidArgument("pairwin tables carry no per-composition rating");
}

Json snapshot_to_json(const EloRcc& state) {
  const auto& o = state.options();
  Json doc;
  doc["format"] = "stylemetric.elo-rcc";
  doc["M"] = o.categories;
  doc["eta_r"] = o.eta_r;
  doc["eta_t"] = o.eta_t;
  doc["eta_c"] = o.eta_c;
  doc["initial_rating"] = o.initial_rating;
  doc["seed"] = o.seed;
  doc["rng"] = state.rng_state();
  const std::size_t m = o.categories;
  Json table = Json::array();
  for (std::size_t x = 0; x < m; ++x) {
    table.push_back(number_vector(std::span(state.table()).subspan(x * m, m)));
  }
  doc["T"] = table;
  Json order = Json::array();
  Json comps = Json::object();
  for (std::size_t i = 0; i < state.size(); ++i) {
    const auto& c = state.composition(i);
    order.push_back(c.id);
    comps[c.id] = {{"R", c.rating},
                   {"C", number_vector(c.category)},
                   {"E", number_vector(c.residual)},
                   {"n", c.games}};
  }
  doc["order"] = order;
  doc["comps"] = comps;
  return doc;
}

EloRcc snapshot_from_json(const Json& doc) {
  if (member(doc, "format") != "stylemetric.elo-rcc") {
    throw InvalidArgument("not an Elo-RCC snapshot");
  }
  EloRccOptions o;
  o.categories = member(doc, "M").get<std::size_t>();
  o.eta_r = member(doc, "eta_r").get<double>();
  o.eta_t = member(doc, "eta_t").get<double>();
  o.eta_c = member(doc, "eta_c").get<double>();
  o.initial_rating = member(doc, "initial_rating").get<double>();
  o.seed = member(doc, "seed").get<std::uint64_t>();
  const Json& rows = member(doc, "T");
  if (!rows.is_array() || rows.size() != o.categories) throw InvalidArgument("T must have M rows");
  std::vector<double> table;
  table.reserve(o.categories * o.categories);
  for (const auto& row : rows) {
    const auto r = read_numbers(row, "T row");
    if (r.size() != o.categories) throw InvalidArgument("T rows must have M entries");
    table.insert(table.end(), r.begin(), r.end());
  }
  const Json& by_id = member(doc, "comps");
  const Json& order = member(doc, "order");
  if (!by_id.is_object() || !order.is_array() || by_id.size() != order.size()) {
    throw InvalidArgument("order must list every composition once");
  }
  std::vector<RccComposition> comps;
  for (const auto& id : order) {
    const Json& c = member(by_id, id.get<std::string>().c_str());
    RccComposition rc;
    rc.id = id.get<std::string>();
    rc.rating = member(c, "R").get<double>();
    rc.category = read_numbers(member(c, "C"), "C");
    rc.residual = read_numbers(member(c, "E"), "E");
    rc.games = member(c, "n").get<std::size_t>();
    comps.push_back(std::move(rc));
  }
  return EloRcc::restore(o, std::move(table), std::move(comps),
                         member(doc, "rng").get<std::string>());
}

Json read_json_file(const std::filesystem::path& path) {
  auto in = open_input(path);
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw InvalidArgument("'" + path.string() + "' is not valid JSON: " + e.what());
  }
}

void write_json_file(const std::filesystem::path& path, const Json& doc) {
  auto out = open_output(path);
  out << doc.dump(2) << '\n';
  if (!out) throw Error("failed writing '" + path.string() + "'");
}

std::string format_double(double value) {
  if (std::isnan(value)) return "nan";
  std::array<char, 32> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  return std::string(buf.data(), res.ptr);
}

void CsvWriter::row(std::span<const std::string> cells) {
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) out_ << ',';
    const auto& c = cells[i];
    if (c.find_first_of(",\"\n") == std::string::npos) {
      out_ << c;
      continue;
    }
    out_ << '"';
    for (char ch : c) {
      if (ch == '"') out_ << '"';
      out_ << ch;
    }
    out_ << '"';
  }
  out_ << '\n';
}

void CsvWriter::row(std::initializer_list<std::string> cells) {
  row(std::span<const std::string>(cells.begin(), cells.size()));
}

std::string svg_heatmap(std::span<const std::string> row_labels,
                        std::span<const std::string> col_labels, std::span<const double> values,
                        std::string_view title) {
  const std::size_t rows = row_labels.size();
  const std::size_t cols = col_labels.size();
  if (values.size() != rows * cols) throw InvalidArgument("heatmap shape mismatch");
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (double v : values) {
    if (std::isfinite(v)) {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  }
  if (!std::isfinite(lo)) lo = hi = 0.0;
  constexpr int cell = 56;
  constexpr int left = 120;
  constexpr int top = 60;
  const int width = left + static_cast<int>(cols) * cell + 20;
  const int height = top + static_cast<int>(rows) * cell + 20;
  // Ramp from #f7fbff to #08306b.
  const auto ramp = [&](double v) {
    const double t = hi > lo ? (v - lo) / (hi - lo) : 0.5;
    const auto mix = [t](int a, int b) { return static_cast<int>(std::lround(a + (b - a) * t)); };
    char buf[8];
    std::snprintf(buf, sizeof buf, "#%02x%02x%02x", mix(0xf7, 0x08), mix(0xfb, 0x30),
                  mix(0xff, 0x6b));
    return std::pair<std::string, bool>(buf, t > 0.55);
  };
  std::ostringstream s;
  s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
    << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
  s << "<text x=\"" << left << "\" y=\"20\" font-size=\"14\">" << xml_escape(title)
    << "</text>\n";
  for (std::size_t c = 0; c < cols; ++c) {
    s << "<text x=\"" << left + static_cast<int>(c) * cell + cell / 2 << "\" y=\"" << top - 8
      << "\" text-anchor=\"middle\">" << xml_escape(col_labels[c]) << "</text>\n";
  }
  for (std::size_t r = 0; r < rows; ++r) {
    const int y = top + static_cast<int>(r) * cell;
    s << "<text x=\"" << left - 6 << "\" y=\"" << y + cell / 2 + 4
      << "\" text-anchor=\"end\">" << xml_escape(row_labels[r]) << "</text>\n";
    for (std::size_t c = 0; c < cols; ++c) {
      const double v = values[r * cols + c];
      const int x = left + static_cast<int>(c) * cell;
      char label[32];
      if (std::isfinite(v)) {
        std::snprintf(label, sizeof label, "%.3f", v);
      } else {
        std::snprintf(label, sizeof label, "n/a");
      }
      const auto [fill, dark] = std::isfinite(v) ? ramp(v) : std::pair<std::string, bool>("#dddddd", false);
      s << "<rect x=\"" << x << "\" y=\"" << y << "\" width=\"" << cell << "\" height=\"" << cell
        << "\" fill=\"" << fill << "\" stroke=\"#ffffff\"/>\n";
      s << "<text x=\"" << x + cell / 2 << "\" y=\"" << y + cell / 2 + 4
        << "\" text-anchor=\"middle\" fill=\"" << (dark ? "#ffffff" : "#000000") << "\">"
        << label << "</text>\n";
    }
  }
  s << "</svg>\n";
  return s.str();
}

ManifestFile digest_file(const std::filesystem::path& path) {
  auto in = open_input(path);
  std::ostringstream buf;
  buf << in.rdbuf();
  const std::string bytes = buf.str();
  return {path.string(), fnv1a64(bytes), bytes.size()};
}

void write_manifest(const std::filesystem::path& output, std::string_view subcommand,
                    const Json& config, std::uint64_t seed,
                    std::span<const std::filesystem::path> inputs,
                    std::span<const std::filesystem::path> outputs) {
  Json doc;
  doc["tool"] = "stylemetric";
  doc["version"] = kVersion;
  doc["subcommand"] = subcommand;
  doc["seed"] = seed;
  doc["config"] = config;
  const auto files = [](std::span<const std::filesystem::path> paths) {
    Json arr = Json::array();
    for (const auto& p : paths) {
      const auto f = digest_file(p);
      arr.push_back({{"path", f.path}, {"fnv1a64", hex64(f.digest)}, {"bytes", f.bytes}});
    }
    return arr;
  };
  doc["inputs"] = files(inputs);
  doc["outputs"] = files(outputs);
  std::filesystem::path m = output;
  m += ".manifest.json";
  write_json_file(m, doc);
}

Json error_record(const std::exception& e) {
  Json err;
  if (const auto* se = dynamic_cast<const Error*>(&e)) {
    err["kind"] = se->kind();
  } else {
    err["kind"] = "internal";
  }
  err["message"] = e.what();
  if (const auto* pe = dynamic_cast<const ParseError*>(&e)) err["line"] = pe->line();
  return Json{{"error", err}};
}

}  // namespace stylemetric
