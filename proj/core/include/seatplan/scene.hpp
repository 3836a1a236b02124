#pragma once

// Floor-plan templates, randomized scene instances, and the spatial predicates
// that ground embodied preferences.

#include <array>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "seatplan/config.hpp"
#include "seatplan/geometry.hpp"
#include "seatplan/rng.hpp"

namespace seatplan {

enum class TemplateId { A, B, C, D, E };
enum class TableShape { rectangular, circular, oval, irregular };
enum class FeatureKind { window, television, air_conditioner, kitchen_zone, exit };
enum class Tableware { chopsticks, cutlery };

inline constexpr std::size_t kTemplateCount = 5;
inline constexpr std::size_t kFeatureKindCount = 5;

std::string_view to_string(TemplateId t);
std::string_view to_string(TableShape s);
std::string_view to_string(FeatureKind k);
std::string_view to_string(Tableware t);
TemplateId template_from_string(std::string_view s);
TableShape table_shape_from_string(std::string_view s);
FeatureKind feature_kind_from_string(std::string_view s);
Tableware tableware_from_string(std::string_view s);

struct RoomSpec {
  double x0, y0, x1, y1;
};

struct TableSpec {
  TableShape shape;
  int seat_count;
  double length;  // along the table's local x axis (diameter for circular)
  double width;
};

struct FeatureSlots {
  int windows_min = 1, windows_max = 2;
  int ac_min = 1, ac_max = 2;
  int exits_min = 1, exits_max = 2;
};

struct SceneTemplate {
  TemplateId id;
  std::vector<RoomSpec> rooms;
  std::vector<TableSpec> tables;
  FeatureSlots slots;
  double viewpoint_spacing = 1.0;

  int seat_total() const;
};

/// The five fixed blueprints: A=4, B=5, C=6, D=6+4, E=5+4+4 seats.
const SceneTemplate& scene_template(TemplateId id);

struct Room {
  std::string id;
  Polygon outline;  // counter-clockwise rectangle
};

struct Table {
  std::string id;
  TableShape shape;
  Vec2 center;
  double rotation = 0.0;
  Polygon perimeter;  // counter-clockwise footprint polyline
  int room = 0;
};

struct Seat {
  std::string id;
  std::string table_id;
  Vec2 position;
  double facing = 0.0;
  int perimeter_index = 0;
  Tableware tableware = Tableware::chopsticks;
};

struct SpatialFeature {
  std::string id;
  FeatureKind kind;
  /// One point, a two-point segment, or a polygon (three or more points).
  std::vector<Vec2> geometry;
  /// Reference point used for bearings and visibility; sits just inside the
  /// room for wall-mounted features.
  Vec2 anchor;
  double orientation = 0.0;
  int room = 0;
};

/// A gap in a wall. Exits open to the outside; the rest connect rooms.
struct Opening {
  Segment span;
  bool exit = false;
};

struct Viewpoint {
  std::string id;
  Vec2 position;
  int room = 0;
};

inline constexpr int kHeadingCount = 8;
double heading_angle(int heading);

/// Immutable after construction.
struct SceneInstance {
  TemplateId template_id = TemplateId::A;
  std::vector<Room> rooms;
  std::vector<Segment> walls;  // solid wall pieces; openings already cut out
  std::vector<Opening> openings;
  std::vector<Table> tables;
  std::vector<Seat> seats;
  std::vector<SpatialFeature> features;
  std::vector<Viewpoint> viewpoints;
  int table_style = 1;  // 1..8
  int chair_style = 1;  // 1..6

  const Seat& seat(std::string_view id) const;
  std::optional<std::size_t> seat_index(std::string_view id) const;
  const SpatialFeature& feature(std::string_view id) const;
  const Table& table(std::string_view id) const;
  std::vector<const SpatialFeature*> features_of(FeatureKind k) const;
  int seats_at(std::string_view table_id) const;

  bool operator==(const SceneInstance&) const;
};

/// Deterministic given the RNG state. Throws PlacementError after 1,000
/// rejected placements.
SceneInstance instantiate_scene(const SceneTemplate& t, Rng& rng, const SpatialConfig& cfg = {});

/// Human-readable list of broken scene invariants; empty when valid.
std::vector<std::string> check_scene_invariants(const SceneInstance& s);

using Adjacency = std::map<std::string, std::set<std::string>>;

/// Seats at the same table with consecutive perimeter indices (cyclic).
Adjacency seat_adjacency(const SceneInstance& s);

/// Same relation over seat indices into `s.seats`.
std::vector<std::vector<int>> seat_neighbor_indices(const SceneInstance& s);

/// Euclidean distance to the nearest point of the feature geometry.
double distance_to(const Seat& seat, const SpatialFeature& f);

/// True when no solid wall piece touches the open segment a-b.
bool line_of_sight(const SceneInstance& s, Vec2 a, Vec2 b);

/// Bearing from seat to the feature anchor within fov/2 of the seat facing,
/// and an unobstructed line of sight.
bool in_field_of_view(const SceneInstance& s, const Seat& seat, const SpatialFeature& f, double fov);

/// Why in_field_of_view failed: "" when visible, otherwise a short reason.
std::string field_of_view_obstacle(const SceneInstance& s, const Seat& seat, const SpatialFeature& f, double fov);

struct Sighting {
  std::string id;
  double distance = 0.0;
  double bearing = 0.0;  // relative to the frame heading, (-pi, pi]
  // Attributes readable from the sighting itself.
  std::string table_id;                  // seats only
  std::optional<Tableware> tableware;    // seats only
  std::optional<FeatureKind> kind;       // features only
};

struct ObservationFrame {
  std::string viewpoint_id;
  int heading = 0;
  std::vector<Sighting> seats;
  std::vector<Sighting> features;

  std::vector<std::string> visible_seat_ids() const;
  std::vector<std::string> visible_feature_ids() const;
};

/// Throws UnknownIdError for unknown viewpoints, std::out_of_range for headings
/// outside 0..7.
ObservationFrame viewpoint_observe(const SceneInstance& s, std::string_view viewpoint_id, int heading,
                                   const SpatialConfig& cfg = {});

/// Per-seat digest sufficient to decide every embodied preference.
struct SeatDigest {
  std::string seat_id;
  std::string table_id;
  Tableware tableware = Tableware::chopsticks;
  Vec2 position;
  double facing = 0.0;
  std::vector<std::string> neighbors;
  /// Nearest distance per feature kind; unset when the scene lacks that kind.
  std::array<std::optional<double>, kFeatureKindCount> nearest{};
  std::array<std::string, kFeatureKindCount> nearest_id{};
  bool tv_visible = false;
  bool left_blocked = false;
  bool right_blocked = false;
};

struct EnvDigest {
  std::vector<SeatDigest> seats;

  const SeatDigest* find(std::string_view seat_id) const;
};

EnvDigest export_ground_truth_features(const SceneInstance& s, const SpatialConfig& cfg = {});

/// What an agent knows before exploring: room outlines, walls, openings and the
/// viewpoint set. No furniture, seats or features.
struct FloorPlan {
  std::vector<Room> rooms;
  std::vector<Segment> walls;
  std::vector<Opening> openings;
  std::vector<Viewpoint> viewpoints;
};

FloorPlan floor_plan(const SceneInstance& s);

/// Rebuilds a digest from observation frames alone. Seat facings are taken to
/// point at the centroid of the observed seats at the same table, neighbours
/// come from angular order around that centroid, and feature distances are
/// measured to the observed anchors. Seats never observed are omitted.
EnvDigest reconstruct_digest(const FloorPlan& plan, const std::vector<ObservationFrame>& frames,
                             const SpatialConfig& cfg = {});

/// Which neighbours lie within elbow distance on each side of the seat.
struct ElbowRoom {
  bool left_blocked = false;
  bool right_blocked = false;
};
ElbowRoom elbow_room(Vec2 position, double facing, const std::vector<Vec2>& neighbor_positions, double elbow);

nlohmann::json scene_to_json(const SceneInstance& s);
SceneInstance scene_from_json(const nlohmann::json& j);
nlohmann::json floor_plan_to_json(const FloorPlan& p);
FloorPlan floor_plan_from_json(const nlohmann::json& j);
nlohmann::json frame_to_json(const ObservationFrame& f);
ObservationFrame frame_from_json(const nlohmann::json& j);
nlohmann::json digest_to_json(const EnvDigest& d);
EnvDigest digest_from_json(const nlohmann::json& j);

}  // namespace seatplan
