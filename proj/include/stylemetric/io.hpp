#pragma once

#include <cstdint>
#include <exception>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "stylemetric/counter.hpp"
#include "stylemetric/rating.hpp"
#include "stylemetric/trajectory.hpp"

namespace stylemetric {

using Json = nlohmann::json;

// Trajectory JSONL, one step per line:
//   {"dataset":"id","episode":0,"step":0,"obs":{...},"action":{"d":2}}
// obs is {"vec":[...]}, {"img":{"w":..,"h":..,"data":[...]}} or
// {"states":{"<encoder-id>":"<key>"}}; action is {"d":int} or {"c":[...]}.
// Blank lines are skipped.
struct TrajectoryLoadOptions {
  // Declared action space. When unset a discrete count is max index + 1 and a
  // continuous dimension is taken from the first record.
  std::optional<ActionSpace> action_space;
  // When non-empty, precomputed states may only name external encoders from
  // this set.
  EncoderSet encoders;
};

// Datasets in order of first appearance; episodes in order of first
// appearance within each dataset.
std::vector<TrajectoryDataset> read_trajectories(std::istream& in,
                                                 const TrajectoryLoadOptions& opts = {});
std::vector<TrajectoryDataset> load_trajectory_file(const std::filesystem::path& path,
                                                    const TrajectoryLoadOptions& opts = {});
// The file must hold exactly one dataset.
TrajectoryDataset load_trajectories(const std::filesystem::path& path,
                                    const TrajectoryLoadOptions& opts = {});

void write_trajectories(std::ostream& out, const TrajectoryDataset& dataset);

// Match JSONL: {"a":["e1","e2"] | "e1+e2","b":...,"w":1|0.5|0}.
std::vector<MatchRecord> read_matches(std::istream& in);
std::vector<MatchRecord> load_matches(const std::filesystem::path& path);
void write_matches(std::ostream& out, std::span<const MatchRecord> matches);

Json rating_to_json(const RatingTable& table);
RatingTable rating_from_json(const Json& doc);

// Positive strengths for Top-D: exp of the rating relative to the largest for
// BT and mElo2, the Elo conversion for Elo, the win value for WinValue.
std::vector<double> rating_strengths(const RatingTable& table);

Json snapshot_to_json(const EloRcc& state);
EloRcc snapshot_from_json(const Json& doc);

Json read_json_file(const std::filesystem::path& path);
// Pretty-printed with a trailing newline.
void write_json_file(const std::filesystem::path& path, const Json& doc);

// Shortest decimal that reads back to the same double.
std::string format_double(double value);

class CsvWriter {
 public:
  explicit CsvWriter(std::ostream& out) : out_(out) {}
  void row(std::span<const std::string> cells);
  void row(std::initializer_list<std::string> cells);

 private:
  std::ostream& out_;
};

// Heatmap of a rows x cols matrix (row-major) with a fixed light-to-dark ramp
// and each cell annotated with its value.
std::string svg_heatmap(std::span<const std::string> row_labels,
                        std::span<const std::string> col_labels, std::span<const double> values,
                        std::string_view title);

struct ManifestFile {
  std::string path;
  std::uint64_t digest = 0;
  std::uintmax_t bytes = 0;
};

ManifestFile digest_file(const std::filesystem::path& path);

// Written to "<output>.manifest.json". Carries no timestamps so that reruns
// with the same seed are byte-identical.
void write_manifest(const std::filesystem::path& output, std::string_view subcommand,
                    const Json& config, std::uint64_t seed,
                    std::span<const std::filesystem::path> inputs,
                    std::span<const std::filesystem::path> outputs);

// {"error":{"kind":..,"message":..,"line":..}}; line only for parse errors.
Json error_record(const std::exception& e);

}  // namespace stylemetric
