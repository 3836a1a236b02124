#pragma once

// A seating puzzle: scene, party, constraints. The ground truth lives in a
// separate sidecar so that solvers never see it.

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "seatplan/constraints.hpp"
#include "seatplan/scene.hpp"
#include "seatplan/world.hpp"

namespace seatplan {

inline constexpr int kInstanceSchemaVersion = 1;

struct ScenarioInstance {
  std::string id;
  int level = 1;
  std::uint64_t seed = 0;
  std::string generator_version;
  SceneInstance scene;
  std::vector<ResidentId> party;
  /// The party's records and the relationships among them.
  World cast;
  std::vector<Preference> preferences;
  std::vector<Conflict> conflicts;

  /// Stable reference of the i-th preference / conflict ("P001", "C001").
  static std::string preference_ref(std::size_t i);
  static std::string conflict_ref(std::size_t i);

  /// What an NPC can tell: its own preferences, then conflicts it is party to,
  /// both in instance order.
  std::vector<Constraint> slots_of(const ResidentId& npc) const;
  std::size_t constraint_count() const { return preferences.size() + conflicts.size(); }
};

struct GroundTruth {
  std::string instance_id;
  Assignment assignment;
};

/// Throws AssignmentError unless `asg` maps every party member to a distinct
/// seat of the scene and nothing else.
void validate_assignment(const ScenarioInstance& inst, const Assignment& asg);

nlohmann::json instance_to_json(const ScenarioInstance& inst);
ScenarioInstance instance_from_json(const nlohmann::json& j);
nlohmann::json ground_truth_to_json(const GroundTruth& gt);
GroundTruth ground_truth_from_json(const nlohmann::json& j);

/// An answer file holds either an "assignment" or a "ground_truth" object.
nlohmann::json answer_to_json(const std::string& instance_id, const Assignment& asg);
Assignment answer_from_json(const nlohmann::json& j);

nlohmann::json read_json_file(const std::filesystem::path& path);
/// Two-space indented, trailing newline.
void write_json_file(const std::filesystem::path& path, const nlohmann::json& j);

ScenarioInstance load_instance(const std::filesystem::path& path);
GroundTruth load_ground_truth(const std::filesystem::path& path);
Assignment load_answer(const std::filesystem::path& path);

}  // namespace seatplan
