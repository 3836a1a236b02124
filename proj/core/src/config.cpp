#include "seatplan/config.hpp"

#include <cmath>
#include <fstream>

#include <nlohmann/json.hpp>

#include "seatplan/error.hpp"

namespace seatplan {

namespace {
constexpr double kDeg = std::numbers::pi / 180.0;

// Degrees rounded to 1e-9 so defaults print as whole numbers.
double to_degrees(double rad) { return std::round(rad / kDeg * 1e9) / 1e9; }
}

Config config_from_json(const nlohmann::json& j) {
  Config c;
  try {
    if (j.contains("spatial")) {
      const auto& s = j.at("spatial");
      auto& sp = c.spatial;
      sp.near_threshold = s.value("near_threshold_m", sp.near_threshold);
      sp.away_threshold = s.value("away_threshold_m", sp.away_threshold);
      sp.tv_fov = s.value("tv_fov_deg", sp.tv_fov / kDeg) * kDeg;
      sp.observation_range = s.value("observation_range_m", sp.observation_range);
      sp.observation_fov = s.value("observation_fov_deg", sp.observation_fov / kDeg) * kDeg;
      sp.elbow_distance = s.value("elbow_distance_m", sp.elbow_distance);
      sp.viewpoint_spacing = s.value("viewpoint_spacing_m", sp.viewpoint_spacing);
    }
    if (j.contains("solver")) {
      const auto& s = j.at("solver");
      auto& so = c.solver;
      so.exact_node_budget = s.value("exact_node_budget", so.exact_node_budget);
      so.reflect_max_iters = s.value("reflect_max_iters", so.reflect_max_iters);
      so.exact_seat_limit = s.value("exact_seat_limit", so.exact_seat_limit);
      if (s.contains("anneal")) {
        const auto& a = s.at("anneal");
        so.anneal.cooling = a.value("cooling", so.anneal.cooling);
        so.anneal.calibration_swaps = a.value("calibration_swaps", so.anneal.calibration_swaps);
        so.anneal.move_budget = a.value("move_budget", so.anneal.move_budget);
        if (a.contains("initial_temperature") && !a.at("initial_temperature").is_null())
          so.anneal.initial_temperature = a.at("initial_temperature").get<double>();
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("config: ") + e.what());
  }
  if (c.spatial.tv_fov <= 0.0 || c.spatial.tv_fov > 2.0 * std::numbers::pi + 1e-9)
    throw ValidationError("config: tv_fov_deg must lie in (0, 360]");
  if (c.spatial.near_threshold < 0.0 || c.spatial.away_threshold < c.spatial.near_threshold)
    throw ValidationError("config: need 0 <= near_threshold_m <= away_threshold_m");
  return c;
}

nlohmann::json config_to_json(const Config& c) {
  nlohmann::json anneal = {{"cooling", c.solver.anneal.cooling},
                           {"calibration_swaps", c.solver.anneal.calibration_swaps},
                           {"move_budget", c.solver.anneal.move_budget}};
  anneal["initial_temperature"] =
      c.solver.anneal.initial_temperature ? nlohmann::json(*c.solver.anneal.initial_temperature) : nlohmann::json();
  return {
      {"schema_version", 1},
      {"spatial",
       {{"near_threshold_m", c.spatial.near_threshold},
        {"away_threshold_m", c.spatial.away_threshold},
        {"tv_fov_deg", to_degrees(c.spatial.tv_fov)},
        {"observation_range_m", c.spatial.observation_range},
        {"observation_fov_deg", to_degrees(c.spatial.observation_fov)},
        {"elbow_distance_m", c.spatial.elbow_distance},
        {"viewpoint_spacing_m", c.spatial.viewpoint_spacing}}},
      {"solver",
       {{"exact_node_budget", c.solver.exact_node_budget},
        {"reflect_max_iters", c.solver.reflect_max_iters},
        {"exact_seat_limit", c.solver.exact_seat_limit},
        {"anneal", anneal}}},
  };
}

Config load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open config file " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError("config file " + path.string() + ": " + e.what());
  }
  return config_from_json(j);
}

}  // namespace seatplan
