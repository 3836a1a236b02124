#pragma once

#include <cstdint>
#include <filesystem>
#include <numbers>
#include <optional>

#include <nlohmann/json_fwd.hpp>

namespace seatplan {

/// Thresholds that turn named spatial predicates into decidable tests.
struct SpatialConfig {
  double near_threshold = 1.5;  // m, "near X" holds at or below
  double away_threshold = 3.0;  // m, "away from X" holds at or above
  double tv_fov = 2.0 * std::numbers::pi / 3.0;
  double observation_range = 8.0;
  double observation_fov = 2.0 * std::numbers::pi / 3.0;
  /// A neighbour closer than this on the dominant-hand side blocks elbow room.
  double elbow_distance = 1.0;
  double viewpoint_spacing = 1.0;
};

struct AnnealConfig {
  double cooling = 0.995;
  /// Unset: mean absolute score change over `calibration_swaps` random swaps.
  std::optional<double> initial_temperature;
  int calibration_swaps = 100;
  long move_budget = 5000;
};

struct SolverConfig {
  long exact_node_budget = 2'000'000;
  AnnealConfig anneal;
  int reflect_max_iters = 10;
  /// Above this many seats the oracle agent falls back to local search.
  int exact_seat_limit = 8;
};

struct Config {
  SpatialConfig spatial;
  SolverConfig solver;
};

/// Missing keys keep their defaults. Angles in the file are in degrees
/// (`tv_fov_deg`, `observation_fov_deg`).
Config config_from_json(const nlohmann::json& j);
nlohmann::json config_to_json(const Config& c);
Config load_config(const std::filesystem::path& path);

}  // namespace seatplan
