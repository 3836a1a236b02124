#pragma once

// Generation by construction: a random ground-truth arrangement is fixed first
// and only constraints it satisfies are sampled.

#include <array>
#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "seatplan/config.hpp"
#include "seatplan/scenario.hpp"

namespace seatplan {

inline constexpr int kLevelCount = 70;
inline constexpr int kLevelsPerTemplate = 14;
inline constexpr int kGenerationRetries = 200;
inline constexpr int kMaxPreferencesPerNpc = 5;
inline constexpr int kMaxConflictsPerNpc = 2;

struct DifficultyLevel {
  int level = 1;
  TemplateId template_id = TemplateId::A;
  int prefs_min = 1;  // per NPC
  int prefs_max = 1;
  int conflicts_min = 0;  // per instance
  int conflicts_max = 0;
  std::array<double, 3> strength_mix = {1.0 / 3, 1.0 / 3, 1.0 / 3};
};

/// Levels 1-14 use template A, 15-28 B, and so on. Throws
/// std::invalid_argument outside 1..70.
DifficultyLevel difficulty_level(int level);

/// "L07-042" for level 7, index 42.
std::string instance_id(int level, int index);

/// Hash identifying the generator's algorithm and ladder.
std::string generator_version();

struct Generated {
  ScenarioInstance instance;
  GroundTruth truth;
};

/// Deterministic given (level, world, seed, cfg). Throws GenerationError after
/// kGenerationRetries rejected party/arrangement draws.
Generated generate_instance(const DifficultyLevel& level, const World& world, std::uint64_t seed,
                            const Config& cfg = {}, std::string id = {});

/// Seed of the index-th instance of a level within a dataset.
std::uint64_t instance_seed(std::uint64_t base, int level, int index);

/// Frequency profile keyed "<kind>|<template>".
using KindProfile = std::map<std::string, long>;

KindProfile instance_profile(const ScenarioInstance& inst);

struct ManifestEntry {
  std::string id;
  int level = 0;
  std::uint64_t seed = 0;
  TemplateId template_id = TemplateId::A;
  int npc_count = 0;
  int preference_count = 0;
  int conflict_count = 0;
  KindProfile profile;
};

struct DatasetManifest {
  std::string generator_version;
  std::uint64_t seed = 0;
  int per_level = 0;
  std::vector<int> levels;
  std::vector<ManifestEntry> entries;

  /// Counts per constraint kind over all entries.
  std::map<std::string, long> kind_counts() const;
  KindProfile joint_profile() const;
};

/// Calls `sink` for each instance in (level, index) order. Failures propagate as
/// GenerationError carrying the level.
DatasetManifest generate_dataset(const std::vector<int>& levels, int per_level, const World& world,
                                 std::uint64_t seed, const Config& cfg = {},
                                 const std::function<void(const Generated&)>& sink = {});

nlohmann::json manifest_to_json(const DatasetManifest& m);
DatasetManifest manifest_from_json(const nlohmann::json& j);

/// Total-variation distance between two count profiles after normalization.
/// Two empty profiles are at distance 0.
double tv_distance(const KindProfile& p, const KindProfile& q);

/// k entry ids whose pooled joint profile is closest in total variation to
/// the whole manifest: greedy addition then 2-swap refinement. Deterministic.
/// Throws std::invalid_argument when k is 0 or larger than the manifest.
std::vector<std::string> select_representative_subset(const DatasetManifest& m, std::size_t k);

/// The greedy stage alone.
std::vector<std::string> select_representative_greedy(const DatasetManifest& m, std::size_t k);

KindProfile pooled_profile(const DatasetManifest& m, const std::vector<std::string>& ids);

}  // namespace seatplan
