#pragma once

// Top-down SVG of an instance, optionally with an answer drawn in.

#include <string>

#include "seatplan/config.hpp"
#include "seatplan/scenario.hpp"

namespace seatplan {

/// Rooms, walls, openings, tables, seats and features. With an answer: NPC
/// labels at their seats, preference glyphs above them, relationship lines
/// between seated NPCs, and unmet constraints styled with class "violation".
std::string render_svg(const ScenarioInstance& inst, const Assignment* answer = nullptr,
                       const SpatialConfig& cfg = {});

}  // namespace seatplan
