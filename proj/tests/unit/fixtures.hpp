#pragma once

#include <filesystem>
#include <random>
#include <string>

#include "seatplan/generator.hpp"
#include "seatplan/world.hpp"

namespace seatplan::test {

inline const World& shipped_world() {
  static const World w = load_world(SEATPLAN_DATA_DIR "/world.json");
  return w;
}

inline Generated generated(int level, int index = 0, std::uint64_t seed = 5) {
  return generate_instance(difficulty_level(level), shipped_world(), instance_seed(seed, level, index), {},
                           instance_id(level, index));
}

/// Fresh empty directory under the system temp dir.
inline std::filesystem::path temp_dir(const std::string& name) {
  static std::random_device rd;
  auto p = std::filesystem::temp_directory_path() / ("seatplan-" + name + "-" + std::to_string(rd()));
  std::filesystem::remove_all(p);
  std::filesystem::create_directories(p);
  return p;
}

}  // namespace seatplan::test
