#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "stylemetric/common.hpp"
#include "stylemetric/counter.hpp"
#include "stylemetric/diversity.hpp"
#include "stylemetric/eval.hpp"
#include "stylemetric/io.hpp"
#include "stylemetric/measures.hpp"
#include "stylemetric/rating.hpp"
#include "stylemetric/synthetic.hpp"

namespace fs = std::filesystem;
using namespace stylemetric;

namespace {

struct Common {
  std::uint64_t seed = 0;
  std::string out;
  std::string format;
  bool timing = false;
};

struct Report {
  std::string body;
  std::vector<fs::path> inputs;
  std::vector<fs::path> extra_outputs;
  Json config;
};

class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

void add_common(CLI::App* cmd, Common& c, std::string default_format,
                std::vector<std::string> formats) {
  c.format = std::move(default_format);
  cmd->add_option("--seed", c.seed, "Global seed");
  cmd->add_option("--out", c.out, "Output path (stdout when omitted)");
  cmd->add_option("--format", c.format, "Report format")->check(CLI::IsMember(formats));
  cmd->add_flag("--timing", c.timing, "Add a wall-clock runtime field");
}

void emit(std::string_view subcommand, const Common& c, const Report& r) {
  if (c.out.empty()) {
    std::cout << r.body;
    std::cout.flush();
    return;
  }
  {
    std::ofstream out(c.out, std::ios::binary | std::ios::trunc);
    if (!out) throw InvalidArgument("cannot write '" + c.out + "'");
    out << r.body;
  }
  std::vector<fs::path> outputs{c.out};
  outputs.insert(outputs.end(), r.extra_outputs.begin(), r.extra_outputs.end());
  write_manifest(c.out, subcommand, r.config, c.seed, r.inputs, outputs);
}

std::string csv_text(const std::vector<std::vector<std::string>>& rows) {
  std::ostringstream s;
  CsvWriter w(s);
  for (const auto& row : rows) w.row(row);
  return s.str();
}

// Datasets loaded for one run must agree on the discrete action count.
void unify_action_spaces(std::vector<TrajectoryDataset>& all) {
  if (all.empty()) return;
  const ActionKind kind = all.front().action_space.kind;
  std::size_t size = 0;
  for (const auto& d : all) {
    if (d.action_space.kind != kind) throw InvalidArgument("inputs mix discrete and continuous actions");
    size = std::max(size, d.action_space.size);
  }
  for (auto& d : all) {
    if (kind == ActionKind::continuous && d.action_space.size != size) {
      throw InvalidArgument("inputs disagree on the continuous action dimension");
    }
    d.action_space.size = size;
  }
}

struct DatasetFlags {
  std::optional<std::size_t> actions;
  std::optional<std::size_t> action_dim;
  std::string encoders = "singleton,identity";
  std::string metric = "w2";
  std::size_t t = 1;
  std::size_t sim_t = 1;
  std::string avg = "expected";
  std::optional<double> scale;

  void attach(CLI::App* cmd) {
    cmd->add_option("--actions", actions, "Declared discrete action count")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--action-dim", action_dim, "Declared continuous action dimension")
        ->check(CLI::PositiveNumber)
        ->excludes("--actions");
    cmd->add_option("--encoders", encoders, "Encoder set, e.g. singleton,identity,lowres,ext:hsd");
    cmd->add_option("--metric", metric, "w1|w2|kl|mkl|bc|bd");
    cmd->add_option("--t", t, "Visit threshold for the distance")->check(CLI::PositiveNumber);
    cmd->add_option("--sim-t", sim_t, "Visit threshold for the similarity family")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--avg", avg, "uniform|expected");
    cmd->add_option("--scale", scale, "Fixed kernel scaling constant")
        ->check(CLI::PositiveNumber);
  }

  TrajectoryLoadOptions load_options(const EncoderSet& set) const {
    TrajectoryLoadOptions o;
    if (actions) o.action_space = ActionSpace::discrete(*actions);
    if (action_dim) o.action_space = ActionSpace::continuous(*action_dim);
    o.encoders = set;
    return o;
  }

  MeasureConfig measure_config() const {
    MeasureConfig cfg;
    cfg.encoders = parse_encoder_set(encoders);
    cfg.metric = parse_metric(metric);
    cfg.threshold = t;
    cfg.similarity_threshold = sim_t;
    cfg.averaging = parse_averaging(avg);
    cfg.fixed_scale = scale;
    cfg.validate();
    return cfg;
  }

  Json echo() const {
    Json j{{"encoders", encoders}, {"metric", metric}, {"t", t}, {"sim_t", sim_t}, {"avg", avg}};
    if (actions) j["actions"] = *actions;
    if (action_dim) j["action_dim"] = *action_dim;
    if (scale) j["scale"] = *scale;
    return j;
  }
};

std::vector<fs::path> list_jsonl(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw InvalidArgument("'" + dir.string() + "' is not a directory");
  std::vector<fs::path> out;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (e.is_regular_file() && e.path().extension() == ".jsonl") out.push_back(e.path());
  }
  std::sort(out.begin(), out.end());
  if (out.empty()) throw InvalidArgument("no .jsonl files in '" + dir.string() + "'");
  return out;
}

// --- similarity ----------------------------------------------------------

struct SimilarityArgs {
  Common common;
  DatasetFlags data;
  std::string a;
  std::string b;
  std::string candidates;
  std::string measure = "psim";
  bool details = false;
};

Report run_similarity(const SimilarityArgs& args) {
  Stopwatch clock;
  MeasureConfig cfg = args.data.measure_config();
  Measure measure;
  if (args.measure == "bc") {
    measure = Measure::similarity;
    cfg.metric = DistanceMetric::bc;
  } else {
    measure = parse_measure(args.measure);
  }
  cfg.keep_details = args.details;
  cfg.validate();
  if (args.b.empty() == args.candidates.empty()) {
    throw InvalidArgument("give exactly one of --b or --candidates");
  }
  Report r;
  const auto load_opts = args.data.load_options(cfg.encoders);
  std::vector<TrajectoryDataset> all{load_trajectories(args.a, load_opts)};
  r.inputs.push_back(args.a);
  std::vector<fs::path> others =
      args.b.empty() ? list_jsonl(args.candidates) : std::vector<fs::path>{args.b};
  for (const auto& p : others) {
    for (auto& d : load_trajectory_file(p, load_opts)) all.push_back(std::move(d));
    r.inputs.push_back(p);
  }
  unify_action_spaces(all);
  const auto items = build_indices(all, cfg.encoders);

  const bool heatmap = args.common.format == "svg-heatmap";
  std::vector<IndexPair> pairs;
  if (heatmap) {
    for (std::size_t i = 0; i < all.size(); ++i) {
      for (std::size_t j = 0; j < all.size(); ++j) pairs.push_back({i, j});
    }
  } else {
    for (std::size_t j = 1; j < all.size(); ++j) pairs.push_back({0, j});
  }
  const auto results = evaluate_batch(items, pairs, measure, cfg);
  const std::string mname =
      args.measure == "bc" ? "bc" : std::string(measure_name(measure));

  r.config = args.data.echo();
  r.config["measure"] = args.measure;
  r.config["a"] = args.a;
  if (!args.b.empty()) r.config["b"] = args.b;
  if (!args.candidates.empty()) r.config["candidates"] = args.candidates;
  r.config["format"] = args.common.format;

  if (heatmap) {
    std::vector<std::string> labels;
    for (const auto& d : all) labels.push_back(d.id);
    std::vector<double> values;
    for (const auto& res : results) {
      values.push_back(res.comparable ? res.value : std::numeric_limits<double>::quiet_NaN());
    }
    r.body = svg_heatmap(labels, labels, values, mname);
    return r;
  }
  if (args.common.format == "csv") {
    std::vector<std::vector<std::string>> rows{
        {"a", "b", "measure", "value", "comparable", "intersected", "union"}};
    if (args.common.timing) rows[0].push_back("runtime_s");
    for (std::size_t k = 0; k < results.size(); ++k) {
      const auto& res = results[k];
      rows.push_back({all[0].id, all[pairs[k].second].id, mname,
                      res.comparable ? format_double(res.value) : "",
                      res.comparable ? "true" : "false", std::to_string(res.intersected),
                      std::to_string(res.union_count)});
      if (args.common.timing) rows.back().push_back(format_double(clock.seconds()));
    }
    r.body = csv_text(rows);
    return r;
  }
  Json doc;
  doc["measure"] = mname;
  doc["results"] = Json::array();
  for (std::size_t k = 0; k < results.size(); ++k) {
    const auto& res = results[k];
    Json row{{"a", all[0].id},
             {"b", all[pairs[k].second].id},
             {"value", res.comparable ? Json(res.value) : Json(nullptr)},
             {"comparable", res.comparable},
             {"intersected", res.intersected},
             {"union", res.union_count}};
    if (args.details) {
      Json det = Json::array();
      for (const auto& d : res.details) {
        det.push_back({{"encoder", d.encoder_id}, {"state", d.key}, {"local", d.local},
                       {"weight", d.weight}});
      }
      row["states"] = det;
    }
    doc["results"].push_back(row);
  }
  if (args.common.timing) doc["runtime_s"] = clock.seconds();
  r.body = doc.dump(2) + "\n";
  return r;
}

// --- diversity -----------------------------------------------------------

struct DiversityArgs {
  Common common;
  DatasetFlags data;
  std::string trajs;
  double threshold = kDefaultDiversityThreshold;
  std::string unit = "auto";
  std::optional<std::size_t> max;
};

Report run_diversity(const DiversityArgs& args) {
  Stopwatch clock;
  DiversityConfig cfg;
  cfg.threshold = args.threshold;
  cfg.measure = args.data.measure_config();
  cfg.max_trajectories = args.max;
  cfg.validate();
  auto loaded = load_trajectory_file(args.trajs, args.data.load_options(cfg.measure.encoders));
  std::vector<TrajectoryDataset> trajs;
  const bool by_episode = args.unit == "episode" || (args.unit == "auto" && loaded.size() == 1);
  if (by_episode) {
    for (const auto& d : loaded) {
      for (auto& e : split_episodes(d)) trajs.push_back(std::move(e));
    }
  } else {
    trajs = std::move(loaded);
  }
  const auto result = diverse_trajectory_count(trajs, cfg);

  Report r;
  r.inputs.push_back(args.trajs);
  r.config = args.data.echo();
  r.config["trajs"] = args.trajs;
  r.config["sim_threshold"] = args.threshold;
  r.config["unit"] = by_episode ? "episode" : "dataset";
  if (args.max) r.config["max"] = *args.max;
  r.config["format"] = args.common.format;
  if (args.common.format == "csv") {
    std::vector<std::vector<std::string>> rows{{"trajectory", "verdict"}};
    for (std::size_t i = 0; i < result.verdicts.size(); ++i) {
      rows.push_back({trajs[i].id, result.verdicts[i] ? "diverse" : "duplicate"});
    }
    rows.push_back({"d", std::to_string(result.diverse)});
    rows.push_back({"N", std::to_string(result.total)});
    if (args.common.timing) rows.push_back({"runtime_s", format_double(clock.seconds())});
    r.body = csv_text(rows);
    return r;
  }
  Json doc{{"diverse", result.diverse}, {"total", result.total}, {"threshold", args.threshold}};
  Json verdicts = Json::array();
  for (std::size_t i = 0; i < result.verdicts.size(); ++i) {
    verdicts.push_back({{"id", trajs[i].id}, {"diverse", static_cast<bool>(result.verdicts[i])}});
  }
  doc["trajectories"] = verdicts;
  if (args.common.timing) doc["runtime_s"] = clock.seconds();
  r.body = doc.dump(2) + "\n";
  return r;
}

// --- rate ----------------------------------------------------------------

struct RateArgs {
  Common common;
  std::string matches;
  std::string method = "bt";
  RatingOptions opts;
};

void attach_rating_flags(CLI::App* cmd, RatingOptions& o) {
  cmd->add_option("--k", o.elo_k, "Elo K factor")->check(CLI::PositiveNumber);
  cmd->add_option("--epochs", o.bt_epochs, "BT epochs")->check(CLI::PositiveNumber);
  cmd->add_option("--lr", o.bt_learning_rate, "BT learning rate")->check(CLI::PositiveNumber);
  cmd->add_option("--melo-eta-r", o.melo_eta_r, "mElo2 rating step")->check(CLI::PositiveNumber);
  cmd->add_option("--melo-eta-c", o.melo_eta_c, "mElo2 vector step")->check(CLI::PositiveNumber);
  cmd->add_option("--melo-epochs", o.melo_epochs, "mElo2 epochs")->check(CLI::PositiveNumber);
}

Json rating_echo(const RatingOptions& o) {
  return {{"k", o.elo_k},
          {"epochs", o.bt_epochs},
          {"lr", o.bt_learning_rate},
          {"melo_eta_r", o.melo_eta_r},
          {"melo_eta_c", o.melo_eta_c},
          {"melo_epochs", o.melo_epochs}};
}

Report run_rate(RateArgs args) {
  Stopwatch clock;
  const RatingMethod method = parse_rating_method(args.method);
  const auto matches = load_matches(args.matches);
  const IndexedLog log = index_matches(matches);
  args.opts.seed = derive_seed(args.common.seed, "rate");
  const RatingTable table = fit_rating(method, log.matches, registry_ids(log.registry), args.opts);

  Report r;
  r.inputs.push_back(args.matches);
  r.config = rating_echo(args.opts);
  r.config["matches"] = args.matches;
  r.config["method"] = rating_method_name(method);
  r.config["format"] = args.common.format;
  if (args.common.format == "csv") {
    std::vector<std::vector<std::string>> rows{{"composition", "rating", "seen"}};
    if (method == RatingMethod::melo2) {
      rows[0].push_back("c0");
      rows[0].push_back("c1");
    }
    for (std::size_t i = 0; i < table.size(); ++i) {
      rows.push_back({table.ids[i], format_double(table.rating[i]),
                      table.seen[i] ? "true" : "false"});
      if (method == RatingMethod::melo2) {
        rows.back().push_back(format_double(table.cyclic[i][0]));
        rows.back().push_back(format_double(table.cyclic[i][1]));
      }
    }
    if (args.common.timing) rows.push_back({"runtime_s", format_double(clock.seconds())});
    r.body = csv_text(rows);
    return r;
  }
  Json doc = rating_to_json(table);
  if (args.common.timing) doc["runtime_s"] = clock.seconds();
  r.body = doc.dump(2) + "\n";
  return r;
}

// --- counter -------------------------------------------------------------

struct CounterArgs {
  Common common;
  std::string matches;
  EloRccOptions opts;
  std::size_t epochs = 5;
  std::string snapshot;
};

Report run_counter(CounterArgs args) {
  Stopwatch clock;
  args.opts.seed = derive_seed(args.common.seed, "elo-rcc");
  args.opts.validate();
  const auto matches = load_matches(args.matches);
  const IndexedLog log = index_matches(matches);
  EloRcc state(args.opts);
  state.fit(log.matches, registry_ids(log.registry), args.epochs);
  write_json_file(args.snapshot, snapshot_to_json(state));

  Report r;
  r.inputs.push_back(args.matches);
  r.extra_outputs.push_back(args.snapshot);
  r.config = {{"matches", args.matches},
              {"m", args.opts.categories},
              {"epochs", args.epochs},
              {"eta_r", args.opts.eta_r},
              {"eta_t", args.opts.eta_t},
              {"eta_c", args.opts.eta_c},
              {"snapshot", args.snapshot}};
  Json doc{{"snapshot", args.snapshot},
           {"compositions", state.size()},
           {"matches", log.matches.size()},
           {"epochs", args.epochs},
           {"categories", state.categories()},
           {"utilized_categories", state.utilized_categories()}};
  if (args.common.timing) doc["runtime_s"] = clock.seconds();
  r.body = doc.dump(2) + "\n";
  return r;
}

// --- balance -------------------------------------------------------------

struct BalanceArgs {
  Common common;
  std::string snapshot;
  std::string ratings;
  bool want_top_d = false;
  double gap = 0.02;
  bool want_top_b = false;
};

Report run_balance(const BalanceArgs& args) {
  Stopwatch clock;
  if (args.snapshot.empty() == args.ratings.empty()) {
    throw InvalidArgument("give exactly one of --snapshot or --ratings");
  }
  if (!args.want_top_d && !args.want_top_b) throw InvalidArgument("ask for --top-d and/or --top-b");
  Report r;
  r.config = {{"top_d", args.want_top_d}, {"gap", args.gap}, {"top_b", args.want_top_b}};
  std::vector<std::string> ids;
  std::vector<double> strengths;
  std::optional<BalanceInputs> inputs;
  if (!args.snapshot.empty()) {
    r.inputs.push_back(args.snapshot);
    r.config["snapshot"] = args.snapshot;
    inputs = balance_inputs(snapshot_from_json(read_json_file(args.snapshot)));
    ids = inputs->ids;
    strengths = inputs->ratings;
  } else {
    if (args.want_top_b) throw InvalidArgument("--top-b needs an Elo-RCC --snapshot");
    r.inputs.push_back(args.ratings);
    r.config["ratings"] = args.ratings;
    const RatingTable table = rating_from_json(read_json_file(args.ratings));
    ids = table.ids;
    strengths = rating_strengths(table);
  }
  Json doc{{"compositions", ids.size()}};
  if (args.want_top_d) doc["top_d"] = {{"gap", args.gap}, {"value", top_d(strengths, args.gap)}};
  if (args.want_top_b) {
    const TopBResult tb = top_b(*inputs);
    Json tops = Json::array();
    Json nd = Json::array();
    for (auto i : tb.tops) tops.push_back(ids[i]);
    for (auto i : tb.non_dominated) nd.push_back(ids[i]);
    doc["top_b"] = {{"value", tb.balance}, {"tops", tops}, {"non_dominated", nd}};
  }
  if (args.common.timing) doc["runtime_s"] = clock.seconds();
  r.body = doc.dump(2) + "\n";
  return r;
}

// --- synth ---------------------------------------------------------------

struct SynthArgs {
  Common common;
  std::string game;
  std::optional<std::size_t> n;
  CombinationGameSpec combo;
  std::size_t styles = 5;
  bool spectrum = false;
  double strength = 0.0;
};

Report run_synth(const SynthArgs& args) {
  if (args.common.out.empty()) throw InvalidArgument("synth needs --out");
  std::ostringstream body;
  Report r;
  r.config = {{"game", args.game}};
  if (args.game == "rps") {
    const std::size_t n = args.n.value_or(100000);
    write_matches(body, gen_rps(n, args.common.seed));
    r.config["n"] = n;
  } else if (args.game == "simple" || args.game == "advanced") {
    CombinationGameSpec spec = args.combo;
    spec.match_count = args.n.value_or(100000);
    spec.seed = args.common.seed;
    write_matches(body, args.game == "simple" ? gen_simple_combination(spec)
                                              : gen_advanced_combination(spec));
    r.config["n"] = spec.match_count;
    r.config["elements"] = spec.elements;
    r.config["team"] = spec.team_size;
    if (args.game == "advanced") r.config["bonus"] = spec.bonus;
  } else if (args.game == "styled") {
    const std::size_t n = args.n.value_or(4096);
    const double strength = args.strength > 0.0 ? args.strength : (args.spectrum ? 3.0 : 2.0);
    StyledPolicySpec spec = args.spectrum ? spectrum_styles(args.styles, 12, 5, strength)
                                          : separated_styles(args.styles, 12, 5, strength);
    spec.seed = args.common.seed;
    StyledWorld w = gen_styled_policies(spec, n, n);
    for (auto& q : w.queries) q.id = "style" + q.id.substr(5) + "@query";
    for (const auto& d : w.candidates) write_trajectories(body, d);
    fs::path queries = args.common.out;
    queries += ".queries.jsonl";
    {
      std::ofstream qout(queries, std::ios::binary);
      if (!qout) throw InvalidArgument("cannot write '" + queries.string() + "'");
      for (const auto& d : w.queries) write_trajectories(qout, d);
    }
    r.extra_outputs.push_back(queries);
    fs::path prox = args.common.out;
    prox += ".proximity.json";
    Json labels = Json::array();
    for (const auto& d : w.candidates) labels.push_back(d.id);
    write_json_file(prox, {{"styles", labels}, {"proximity", w.proximity}});
    r.extra_outputs.push_back(prox);
    r.config["n"] = n;
    r.config["styles"] = args.styles;
    r.config["spectrum"] = args.spectrum;
    r.config["strength"] = strength;
  } else {
    throw InvalidArgument("unknown game '" + args.game + "'");
  }
  r.body = body.str();
  return r;
}

// --- eval ----------------------------------------------------------------

struct RetrievalArgs {
  Common common;
  DatasetFlags data;
  std::string candidates;
  std::string queries;
  std::string measures = "psim,jaccard";
  std::vector<std::size_t> pairs{512};
  std::size_t rounds = 10;
};

std::string label_of(const std::string& id) { return id.substr(0, id.find('@')); }

Report run_retrieval(const RetrievalArgs& args) {
  Stopwatch clock;
  RetrievalTask task;
  task.config = args.data.measure_config();
  task.measures.clear();
  std::stringstream list(args.measures);
  for (std::string m; std::getline(list, m, ',');) task.measures.push_back(parse_measure(m));
  task.rounds = args.rounds;
  task.seed = derive_seed(args.common.seed, "retrieval");
  const auto opts = args.data.load_options(task.config.encoders);
  std::vector<TrajectoryDataset> all = load_trajectory_file(args.candidates, opts);
  const std::size_t nc = all.size();
  for (auto& d : load_trajectory_file(args.queries, opts)) all.push_back(std::move(d));
  unify_action_spaces(all);
  for (std::size_t i = 0; i < all.size(); ++i) {
    (i < nc ? task.candidates : task.queries).push_back(all[i]);
    (i < nc ? task.candidate_labels : task.query_labels).push_back(label_of(all[i].id));
  }

  Report r;
  r.inputs = {args.candidates, args.queries};
  r.config = args.data.echo();
  r.config["candidates"] = args.candidates;
  r.config["queries"] = args.queries;
  r.config["measures"] = args.measures;
  r.config["pairs"] = args.pairs;
  r.config["rounds"] = args.rounds;
  r.config["format"] = args.common.format;
  std::vector<std::vector<std::string>> rows{{"pairs", "measure", "accuracy", "std", "flagged"}};
  Json results = Json::array();
  for (std::size_t n : args.pairs) {
    task.sample_pairs = n;
    for (const auto& s : retrieval_accuracy(task)) {
      rows.push_back({std::to_string(n), std::string(measure_name(s.measure)),
                      format_double(s.accuracy), format_double(s.std), std::to_string(s.flagged)});
      results.push_back({{"pairs", n},
                         {"measure", measure_name(s.measure)},
                         {"accuracy", s.accuracy},
                         {"std", s.std},
                         {"flagged", s.flagged}});
    }
  }
  if (args.common.format == "csv") {
    if (args.common.timing) {
      rows[0].push_back("runtime_s");
      for (std::size_t i = 1; i < rows.size(); ++i) rows[i].push_back(format_double(clock.seconds()));
    }
    r.body = csv_text(rows);
    return r;
  }
  Json doc{{"results", results}};
  if (args.common.timing) doc["runtime_s"] = clock.seconds();
  r.body = doc.dump(2) + "\n";
  return r;
}

struct CrossvalArgs {
  Common common;
  std::string matches;
  std::string method = "bt";
  std::size_t folds = 5;
  RatingOptions rating;
  EloRccOptions rcc;
  std::size_t rcc_epochs = 5;
  std::string rule = "map";
};

Report run_crossval(const CrossvalArgs& args) {
  Stopwatch clock;
  CrossvalConfig cfg;
  cfg.method = parse_crossval_method(args.method);
  cfg.folds = args.folds;
  cfg.seed = derive_seed(args.common.seed, "crossval");
  cfg.rating = args.rating;
  cfg.rcc = args.rcc;
  cfg.rcc.validate();
  cfg.rcc_epochs = args.rcc_epochs;
  cfg.rule = parse_category_rule(args.rule);
  const auto matches = load_matches(args.matches);
  const CrossvalResult res = crossval_rating(matches, cfg);

  Report r;
  r.inputs.push_back(args.matches);
  r.config = rating_echo(args.rating);
  r.config["matches"] = args.matches;
  r.config["method"] = crossval_method_name(cfg.method);
  r.config["folds"] = args.folds;
  if (cfg.method == CrossvalMethod::elo_rcc) {
    r.config["m"] = args.rcc.categories;
    r.config["rcc_epochs"] = args.rcc_epochs;
    r.config["eta_r"] = args.rcc.eta_r;
    r.config["eta_t"] = args.rcc.eta_t;
    r.config["eta_c"] = args.rcc.eta_c;
    r.config["rule"] = category_rule_name(cfg.rule);
  }
  r.config["format"] = args.common.format;
  if (args.common.format == "csv") {
    std::vector<std::vector<std::string>> rows{{"method", "split", "accuracy", "std"}};
    if (args.common.timing) rows[0].push_back("runtime_s");
    const std::string name(crossval_method_name(cfg.method));
    rows.push_back({name, "train", format_double(res.train.mean), format_double(res.train.std)});
    rows.push_back({name, "test", format_double(res.test.mean), format_double(res.test.std)});
    if (args.common.timing) {
      for (std::size_t i = 1; i < rows.size(); ++i) rows[i].push_back(format_double(clock.seconds()));
    }
    r.body = csv_text(rows);
    return r;
  }
  Json folds = Json::array();
  for (const auto& f : res.folds) {
    folds.push_back({{"train", f.train},
                     {"test", f.test},
                     {"train_pairs", f.train_pairs},
                     {"test_pairs", f.test_pairs}});
  }
  Json doc{{"method", crossval_method_name(cfg.method)},
           {"folds", folds},
           {"train", {{"mean", res.train.mean}, {"std", res.train.std}}},
           {"test", {{"mean", res.test.mean}, {"std", res.test.std}}}};
  if (args.common.timing) doc["runtime_s"] = clock.seconds();
  r.body = doc.dump(2) + "\n";
  return r;
}

void attach_rcc_flags(CLI::App* cmd, EloRccOptions& o) {
  cmd->add_option("--m", o.categories, "Counter category count")->check(CLI::PositiveNumber);
  cmd->add_option("--eta-r", o.eta_r, "Rating step")->check(CLI::PositiveNumber);
  cmd->add_option("--eta-t", o.eta_t, "Counter table step")->check(CLI::PositiveNumber);
  cmd->add_option("--eta-c", o.eta_c, "Category step")->check(CLI::PositiveNumber);
}

int fail(const std::exception& e, int code) {
  std::cerr << error_record(e).dump() << std::endl;
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Playstyle similarity, diversity, ratings and balance measures"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);
  std::optional<int> workers;
  app.add_option("--workers", workers, "Worker threads (overrides STYLEMETRIC_WORKERS)")
      ->check(CLI::PositiveNumber);

  SimilarityArgs sim;
  auto* sim_cmd = app.add_subcommand("similarity", "Compare trajectory datasets");
  add_common(sim_cmd, sim.common, "json", {"json", "csv", "svg-heatmap"});
  sim.data.attach(sim_cmd);
  sim_cmd->add_option("--a", sim.a, "Reference dataset")->required()->check(CLI::ExistingFile);
  sim_cmd->add_option("--b", sim.b, "Dataset to compare")->check(CLI::ExistingFile);
  sim_cmd->add_option("--candidates", sim.candidates, "Directory of candidate .jsonl files");
  sim_cmd->add_option("--measure", sim.measure, "distance|psim|inter|jaccard|bc");
  sim_cmd->add_flag("--details", sim.details, "Per-state contributions (json)");

  DiversityArgs div;
  auto* div_cmd = app.add_subcommand("diversity", "Count diverse trajectories");
  add_common(div_cmd, div.common, "json", {"json", "csv"});
  div.data.attach(div_cmd);
  div_cmd->add_option("--trajs", div.trajs, "Trajectory file")->required()->check(CLI::ExistingFile);
  div_cmd->add_option("--sim-threshold", div.threshold, "Similarity threshold t")
      ->check(CLI::NonNegativeNumber);
  div_cmd->add_option("--unit", div.unit, "dataset|episode|auto")
      ->check(CLI::IsMember({"dataset", "episode", "auto"}));
  div_cmd->add_option("--max", div.max, "Use only the first N trajectories")
      ->check(CLI::PositiveNumber);

  RateArgs rate;
  auto* rate_cmd = app.add_subcommand("rate", "Fit a rating table");
  add_common(rate_cmd, rate.common, "json", {"json", "csv"});
  rate_cmd->add_option("--matches", rate.matches, "Match log")->required()->check(CLI::ExistingFile);
  rate_cmd->add_option("--method", rate.method, "winvalue|pairwin|elo|bt|melo2");
  attach_rating_flags(rate_cmd, rate.opts);

  CounterArgs counter;
  auto* counter_cmd = app.add_subcommand("counter", "Fit Elo-RCC and write a snapshot");
  add_common(counter_cmd, counter.common, "json", {"json"});
  counter_cmd->add_option("--matches", counter.matches, "Match log")
      ->required()
      ->check(CLI::ExistingFile);
  attach_rcc_flags(counter_cmd, counter.opts);
  counter_cmd->add_option("--epochs", counter.epochs, "Replay epochs")->check(CLI::PositiveNumber);
  counter_cmd->add_option("--snapshot", counter.snapshot, "Snapshot output")->required();

  BalanceArgs bal;
  auto* bal_cmd = app.add_subcommand("balance", "Top-D and Top-B balance measures");
  add_common(bal_cmd, bal.common, "json", {"json"});
  bal_cmd->add_option("--snapshot", bal.snapshot, "Elo-RCC snapshot")->check(CLI::ExistingFile);
  bal_cmd->add_option("--ratings", bal.ratings, "Rating export")->check(CLI::ExistingFile);
  bal_cmd->add_flag("--top-d", bal.want_top_d, "Dominant compositions");
  bal_cmd->add_option("--gap", bal.gap, "Allowed gap G")->check(CLI::Range(0.0, 0.5));
  bal_cmd->add_flag("--top-b", bal.want_top_b, "Non-dominated category tops");

  SynthArgs synth;
  auto* synth_cmd = app.add_subcommand("synth", "Generate synthetic data");
  add_common(synth_cmd, synth.common, "jsonl", {"jsonl"});
  synth_cmd->add_option("--game", synth.game, "rps|simple|advanced|styled")
      ->required()
      ->check(CLI::IsMember({"rps", "simple", "advanced", "styled"}));
  synth_cmd->add_option("--n", synth.n, "Matches, or pairs per styled dataset")
      ->check(CLI::PositiveNumber);
  synth_cmd->add_option("--elements", synth.combo.elements, "Combination elements");
  synth_cmd->add_option("--team", synth.combo.team_size, "Combination team size");
  synth_cmd->add_option("--bonus", synth.combo.bonus, "Advanced type bonus");
  synth_cmd->add_option("--styles", synth.styles, "Styled world style count")
      ->check(CLI::PositiveNumber);
  synth_cmd->add_flag("--spectrum", synth.spectrum, "Styles along a 1-D spectrum");
  synth_cmd->add_option("--strength", synth.strength, "Style logit strength")
      ->check(CLI::PositiveNumber);

  auto* eval_cmd = app.add_subcommand("eval", "Evaluation harnesses");
  eval_cmd->require_subcommand(1);

  RetrievalArgs ret;
  auto* ret_cmd = eval_cmd->add_subcommand("retrieval", "Nearest-candidate style retrieval");
  add_common(ret_cmd, ret.common, "csv", {"csv", "json"});
  ret.data.attach(ret_cmd);
  ret_cmd->add_option("--candidates", ret.candidates, "Candidate datasets")
      ->required()
      ->check(CLI::ExistingFile);
  ret_cmd->add_option("--queries", ret.queries, "Query datasets; labels are ids up to '@'")
      ->required()
      ->check(CLI::ExistingFile);
  ret_cmd->add_option("--measures", ret.measures, "Comma-separated measures");
  ret_cmd->add_option("--pairs", ret.pairs, "Sampled pairs per dataset, one or more")
      ->check(CLI::PositiveNumber);
  ret_cmd->add_option("--rounds", ret.rounds, "Rounds")->check(CLI::PositiveNumber);

  CrossvalArgs cv;
  auto* cv_cmd = eval_cmd->add_subcommand("crossval", "Strength-relation cross-validation");
  add_common(cv_cmd, cv.common, "json", {"json", "csv"});
  cv_cmd->add_option("--matches", cv.matches, "Match log")->required()->check(CLI::ExistingFile);
  cv_cmd->add_option("--method", cv.method, "winvalue|pairwin|elo|bt|melo2|elo-rcc");
  cv_cmd->add_option("--folds", cv.folds, "Fold count")->check(CLI::Range(2, 1000));
  attach_rating_flags(cv_cmd, cv.rating);
  attach_rcc_flags(cv_cmd, cv.rcc);
  cv_cmd->add_option("--rcc-epochs", cv.rcc_epochs, "Elo-RCC replay epochs")
      ->check(CLI::PositiveNumber);
  cv_cmd->add_option("--rule", cv.rule, "map|sample|expected");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << Json{{"error", {{"kind", "usage"}, {"message", e.what()}}}}.dump() << std::endl;
    return 2;
  }

  try {
    if (workers) set_worker_count(*workers);
    if (sim_cmd->parsed()) emit("similarity", sim.common, run_similarity(sim));
    if (div_cmd->parsed()) emit("diversity", div.common, run_diversity(div));
    if (rate_cmd->parsed()) emit("rate", rate.common, run_rate(rate));
    if (counter_cmd->parsed()) emit("counter", counter.common, run_counter(counter));
    if (bal_cmd->parsed()) emit("balance", bal.common, run_balance(bal));
    if (synth_cmd->parsed()) emit("synth", synth.common, run_synth(synth));
    if (ret_cmd->parsed()) emit("eval retrieval", ret.common, run_retrieval(ret));
    if (cv_cmd->parsed()) emit("eval crossval", cv.common, run_crossval(cv));
  } catch (const Error& e) {
    return fail(e, 1);
  } catch (const std::exception& e) {
    return fail(e, 3);
  }
  return 0;
}
