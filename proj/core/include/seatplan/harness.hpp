#pragma once

// The work behind each CLI subcommand, callable without the CLI.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "seatplan/config.hpp"
#include "seatplan/generator.hpp"
#include "seatplan/model.hpp"
#include "seatplan/scoring.hpp"

namespace seatplan {

/// "1..70", "5", "1,3,10..12". Throws ParseError; levels must lie in 1..70.
std::vector<int> parse_level_spec(std::string_view spec);

std::string tool_version();

struct RunManifest {
  std::string command;
  std::vector<std::string> argv;  // enough to rerun the command
  std::string config_digest;
  std::vector<std::uint64_t> seeds;
  std::vector<std::string> inputs;
  std::vector<std::string> outputs;
  std::string tool_version;
  double wall_ms = 0.0;
};

nlohmann::json run_manifest_to_json(const RunManifest& m);
RunManifest run_manifest_from_json(const nlohmann::json& j);

std::string config_digest(const Config& cfg);

struct GenOptions {
  std::vector<int> levels;
  int per_level = 1;
  std::uint64_t seed = 0;
  std::filesystem::path out_dir;
  std::filesystem::path world_path;
  Config config;
};

/// Writes instances/<id>.json, ground_truth/<id>.json, manifest.json and
/// run_manifest.json under out_dir.
RunManifest cmd_gen(const GenOptions& opt);

struct EvalOptions {
  std::filesystem::path instance;
  std::filesystem::path answer;
  std::optional<std::filesystem::path> report_out;
  std::optional<std::filesystem::path> csv_out;
  CategoryMode mode = CategoryMode::coarse;
  Config config;
};

/// Throws AssignmentError for answers that are not bijections.
ScoreReport cmd_eval(const EvalOptions& opt);

struct SolveOptions {
  std::filesystem::path instance;
  /// exact, greedy, greedy-blind, anneal, reflect, oracle, repair
  std::string solver = "exact";
  std::uint64_t seed = 0;
  int max_iters = 10;
  PerceptionMode mode = PerceptionMode::gt_perception;
  std::filesystem::path out_dir;
  Config config;
};

struct SolveOutput {
  Assignment assignment;
  std::filesystem::path answer_path;
  std::filesystem::path trace_path;
  RunManifest manifest;
};

SolveOutput cmd_solve(const SolveOptions& opt);

/// The dataset's manifest.json, or one rebuilt from instances/ when absent.
/// An empty or missing directory gives an empty manifest.
DatasetManifest load_dataset_manifest(const std::filesystem::path& dir);

struct StatsOptions {
  std::filesystem::path dataset;
  std::filesystem::path out_dir;
  std::optional<std::filesystem::path> compare;
};

struct StatsOutput {
  std::map<std::string, long> kind_counts;
  long total_constraints = 0;
  std::optional<double> tv;  // when comparing
  std::vector<std::filesystem::path> files;
};

/// kind_counts.csv, level_histogram.csv and joint_profile.csv under out_dir;
/// tv_distance.txt too when comparing two datasets.
StatsOutput cmd_stats(const StatsOptions& opt);

void cmd_render(const std::filesystem::path& instance, const std::optional<std::filesystem::path>& answer,
                const std::filesystem::path& out, const Config& cfg = {});

}  // namespace seatplan
