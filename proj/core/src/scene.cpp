#include "seatplan/scene.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <numeric>

#include <nlohmann/json.hpp>

#include "seatplan/error.hpp"

namespace seatplan {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kChairOffset = 0.45;     // chair centre to table edge
constexpr double kChairSize = 0.45;
constexpr double kPathHalfWidth = 0.3;    // 0.6 m clearance corridor
constexpr double kSeatReach = 0.5;
constexpr double kAnchorInset = 0.05;
constexpr double kGridCell = 0.1;
constexpr int kPlacementAttempts = 1000;

constexpr std::array<std::string_view, kTemplateCount> kTemplateNames = {"A", "B", "C", "D", "E"};
constexpr std::array<std::string_view, 4> kShapeNames = {"rectangular", "circular", "oval", "irregular"};
constexpr std::array<std::string_view, kFeatureKindCount> kFeatureNames = {
    "window", "television", "air_conditioner", "kitchen_zone", "exit"};
constexpr std::array<std::string_view, 2> kTablewareNames = {"chopsticks", "cutlery"};

template <std::size_t N>
std::size_t lookup(const std::array<std::string_view, N>& names, std::string_view s, const char* what) {
  for (std::size_t i = 0; i < N; ++i)
    if (names[i] == s) return i;
  throw ParseError(std::string("unknown ") + what + " '" + std::string(s) + "'");
}

// Irregular table outline (local frame), counter-clockwise.
const Polygon& hexagon_outline() {
  static const Polygon hex = {{-1.0, 0.0}, {-0.5, -0.55}, {0.5, -0.55}, {1.0, 0.0}, {0.5, 0.55}, {-0.5, 0.55}};
  return hex;
}

std::vector<SceneTemplate> build_templates() {
  std::vector<SceneTemplate> t(5);
  t[0] = {TemplateId::A, {{0, 0, 6.0, 5.0}}, {{TableShape::rectangular, 4, 1.6, 0.9}}, {1, 2, 1, 2, 1, 2}, 1.0};
  t[1] = {TemplateId::B, {{0, 0, 6.0, 5.5}}, {{TableShape::irregular, 5, 2.0, 1.1}}, {1, 2, 1, 2, 1, 2}, 1.0};
  t[2] = {TemplateId::C, {{0, 0, 6.0, 6.0}}, {{TableShape::circular, 6, 1.5, 1.5}}, {1, 2, 1, 2, 1, 2}, 1.0};
  t[3] = {TemplateId::D,
          {{0, 0, 9.0, 6.5}},
          {{TableShape::rectangular, 6, 2.2, 0.9}, {TableShape::circular, 4, 1.1, 1.1}},
          {1, 3, 1, 2, 1, 2},
          1.0};
  t[4] = {TemplateId::E,
          {{0, 0, 6.0, 6.0}, {6.0, 0, 11.0, 6.0}, {11.0, 0, 16.0, 6.0}},
          {{TableShape::rectangular, 5, 1.8, 0.9}, {TableShape::circular, 4, 1.1, 1.1}, {TableShape::oval, 4, 1.6, 1.0}},
          {2, 4, 1, 3, 1, 2},
          1.0};
  return t;
}

Vec2 inward_normal(const Segment& edge) {
  const Vec2 d = edge.b - edge.a;
  const double len = d.norm();
  return {-d.y / len, d.x / len};
}

struct SeatPose {
  Vec2 position;
  double facing;
};

// Seat poses in CCW perimeter order, in the table's local frame.
std::vector<SeatPose> local_seat_poses(const TableSpec& spec, double phase) {
  std::vector<SeatPose> out;
  const int n = spec.seat_count;
  switch (spec.shape) {
    case TableShape::rectangular: {
      const double L = spec.length, W = spec.width;
      // Seats per side: bottom, right head, top, left head.
      std::array<int, 4> per_side{};
      if (n == 5) per_side = {2, 1, 2, 0};
      else per_side = {n / 2 + n % 2, 0, n / 2, 0};
      for (int i = 0; i < per_side[0]; ++i)
        out.push_back({{-L / 2 + L * (i + 0.5) / per_side[0], -W / 2 - kChairOffset}, kPi / 2});
      for (int i = 0; i < per_side[1]; ++i)
        out.push_back({{L / 2 + kChairOffset, -W / 2 + W * (i + 0.5) / per_side[1]}, kPi});
      for (int i = 0; i < per_side[2]; ++i)
        out.push_back({{L / 2 - L * (i + 0.5) / per_side[2], W / 2 + kChairOffset}, -kPi / 2});
      for (int i = 0; i < per_side[3]; ++i)
        out.push_back({{-L / 2 - kChairOffset, W / 2 - W * (i + 0.5) / per_side[3]}, 0.0});
      break;
    }
    case TableShape::circular: {
      const double r = spec.length / 2 + kChairOffset;
      for (int i = 0; i < n; ++i) {
        const double a = phase + 2 * kPi * i / n;
        out.push_back({from_angle(a) * r, wrap_angle(a + kPi)});
      }
      break;
    }
    case TableShape::oval: {
      const double rx = spec.length / 2 + kChairOffset, ry = spec.width / 2 + kChairOffset;
      for (int i = 0; i < n; ++i) {
        const double t = phase + 2 * kPi * i / n;
        const Vec2 p{rx * std::cos(t), ry * std::sin(t)};
        out.push_back({p, std::atan2(-p.y, -p.x)});
      }
      break;
    }
    case TableShape::irregular: {
      const auto& hex = hexagon_outline();
      for (int i = 0; i < n; ++i) {
        const Segment e{hex[i], hex[(i + 1) % hex.size()]};
        const Vec2 in = inward_normal(e);
        out.push_back({e.midpoint() - in * kChairOffset, std::atan2(in.y, in.x)});
      }
      break;
    }
  }
  return out;
}

Polygon local_table_outline(const TableSpec& spec) {
  switch (spec.shape) {
    case TableShape::rectangular: return oriented_rect({0, 0}, spec.length, spec.width, 0.0);
    case TableShape::circular: return ellipse_polygon({0, 0}, spec.length / 2, spec.length / 2, 0.0, 32);
    case TableShape::oval: return ellipse_polygon({0, 0}, spec.length / 2, spec.width / 2, 0.0, 32);
    case TableShape::irregular: return hexagon_outline();
  }
  return {};
}

Polygon transform(const Polygon& p, Vec2 center, double theta) {
  Polygon out;
  out.reserve(p.size());
  for (const auto& v : p) out.push_back(center + rotate(v, theta));
  return out;
}

bool rect_contains(const RoomSpec& r, const Polygon& poly, double margin) {
  return std::all_of(poly.begin(), poly.end(), [&](Vec2 v) {
    return v.x >= r.x0 + margin && v.x <= r.x1 - margin && v.y >= r.y0 + margin && v.y <= r.y1 - margin;
  });
}

struct Edge {
  Segment seg;
  int room;           // room whose interior lies on the left
  int other_room = -1;
  std::vector<std::pair<double, double>> cuts;   // opening intervals in arc length
  std::vector<std::pair<double, double>> mounts; // occupied by windows / wall fixtures
};

bool interval_free(const Edge& e, double a, double b, double gap) {
  auto clash = [&](const std::pair<double, double>& iv) { return a < iv.second + gap && iv.first < b + gap; };
  return std::none_of(e.cuts.begin(), e.cuts.end(), clash) && std::none_of(e.mounts.begin(), e.mounts.end(), clash);
}

Vec2 along(const Segment& s, double t) {
  const Vec2 d = s.b - s.a;
  return s.a + d * (t / d.norm());
}

class Placer {
 public:
  Placer(const SceneTemplate& t, Rng& rng, const SpatialConfig& cfg) : t_(t), rng_(rng), cfg_(cfg) {}

  bool attempt(SceneInstance& out);

 private:
  bool place_tables(SceneInstance& s);
  void build_edges();
  bool cut_interior_doors();
  bool add_exits(SceneInstance& s);
  bool add_windows(SceneInstance& s);
  bool add_wall_point(SceneInstance& s, FeatureKind kind, const std::string& id);
  bool add_kitchen(SceneInstance& s);
  void emit_walls(SceneInstance& s);
  void add_viewpoints(SceneInstance& s);

  const SceneTemplate& t_;
  Rng& rng_;
  const SpatialConfig& cfg_;
  std::vector<Edge> edges_;
  std::vector<Polygon> obstacles_;  // table and chair footprints
};

bool Placer::place_tables(SceneInstance& s) {
  std::vector<int> room_of(t_.tables.size(), 0);
  if (t_.rooms.size() > 1) {
    std::vector<int> perm(t_.rooms.size());
    std::iota(perm.begin(), perm.end(), 0);
    rng_.shuffle(perm);
    for (std::size_t i = 0; i < room_of.size(); ++i) room_of[i] = perm[i % perm.size()];
  }
  int seat_no = 0;
  for (std::size_t ti = 0; ti < t_.tables.size(); ++ti) {
    const TableSpec& spec = t_.tables[ti];
    const RoomSpec& room = t_.rooms[room_of[ti]];
    double rotation;
    if (spec.shape == TableShape::circular) rotation = rng_.uniform(-kPi, kPi);
    else rotation = wrap_angle(kPi / 2 * rng_.between(0, 3) + rng_.uniform(-0.15, 0.15));
    const double phase = spec.shape == TableShape::oval ? rng_.uniform(0.0, 0.4) : 0.0;
    const Vec2 center{rng_.uniform(room.x0 + 1.0, room.x1 - 1.0), rng_.uniform(room.y0 + 1.0, room.y1 - 1.0)};

    Table table;
    table.id = "T" + std::to_string(ti + 1);
    table.shape = spec.shape;
    table.center = center;
    table.rotation = rotation;
    table.perimeter = transform(local_table_outline(spec), center, rotation);
    table.room = room_of[ti];
    if (!rect_contains(room, table.perimeter, 0.6)) return false;
    for (const auto& o : obstacles_)
      if (convex_polygons_overlap(o, table.perimeter)) return false;

    std::vector<Polygon> chairs;
    const auto poses = local_seat_poses(spec, phase);
    for (std::size_t k = 0; k < poses.size(); ++k) {
      Seat seat;
      seat.id = "S" + std::to_string(++seat_no);
      seat.table_id = table.id;
      seat.position = center + rotate(poses[k].position, rotation);
      seat.facing = wrap_angle(poses[k].facing + rotation);
      seat.perimeter_index = static_cast<int>(k);
      seat.tableware = rng_.chance(0.5) ? Tableware::chopsticks : Tableware::cutlery;
      Polygon chair = oriented_rect(seat.position, kChairSize, kChairSize, seat.facing);
      if (!rect_contains(room, chair, 0.05)) return false;
      for (const auto& o : obstacles_)
        if (convex_polygons_overlap(o, chair)) return false;
      chairs.push_back(std::move(chair));
      s.seats.push_back(std::move(seat));
    }
    obstacles_.push_back(table.perimeter);
    for (auto& c : chairs) obstacles_.push_back(std::move(c));
    s.tables.push_back(std::move(table));
  }
  return true;
}

void Placer::build_edges() {
  edges_.clear();
  for (std::size_t r = 0; r < t_.rooms.size(); ++r) {
    const auto& rs = t_.rooms[r];
    const Polygon outline = rect_polygon(rs.x0, rs.y0, rs.x1, rs.y1);
    for (std::size_t i = 0; i < 4; ++i) {
      Segment seg{outline[i], outline[(i + 1) % 4]};
      // A shared edge appears reversed in the neighbouring room.
      bool shared = false;
      for (auto& e : edges_)
        if (e.seg.a == seg.b && e.seg.b == seg.a) {
          e.other_room = static_cast<int>(r);
          shared = true;
        }
      if (!shared) edges_.push_back({seg, static_cast<int>(r), -1, {}, {}});
    }
  }
}

bool Placer::cut_interior_doors() {
  for (auto& e : edges_) {
    if (e.other_room < 0) continue;
    const double len = e.seg.length();
    const double w = 1.0;
    const double start = rng_.uniform(0.5, len - 0.5 - w);
    e.cuts.emplace_back(start, start + w);
  }
  return true;
}

bool Placer::add_exits(SceneInstance& s) {
  const int count = rng_.between(t_.slots.exits_min, t_.slots.exits_max);
  std::vector<int> exterior;
  for (std::size_t i = 0; i < edges_.size(); ++i)
    if (edges_[i].other_room < 0) exterior.push_back(static_cast<int>(i));
  for (int k = 0; k < count; ++k) {
    bool placed = false;
    for (int tries = 0; tries < 20 && !placed; ++tries) {
      Edge& e = edges_[rng_.pick(exterior)];
      const double len = e.seg.length(), w = 0.9;
      const double start = rng_.uniform(0.4, len - 0.4 - w);
      if (!interval_free(e, start, start + w, 0.3)) continue;
      e.cuts.emplace_back(start, start + w);
      const Segment span{along(e.seg, start), along(e.seg, start + w)};
      s.openings.push_back({span, true});
      SpatialFeature f;
      f.id = "exit_" + std::to_string(k + 1);
      f.kind = FeatureKind::exit;
      f.geometry = {span.a, span.b};
      const Vec2 in = inward_normal(e.seg);
      f.anchor = span.midpoint() + in * kAnchorInset;
      f.orientation = std::atan2(in.y, in.x);
      f.room = e.room;
      s.features.push_back(std::move(f));
      placed = true;
    }
    if (!placed) return false;
  }
  return true;
}

bool Placer::add_windows(SceneInstance& s) {
  const int count = rng_.between(t_.slots.windows_min, t_.slots.windows_max);
  std::vector<int> exterior;
  for (std::size_t i = 0; i < edges_.size(); ++i)
    if (edges_[i].other_room < 0) exterior.push_back(static_cast<int>(i));
  for (int k = 0; k < count; ++k) {
    bool placed = false;
    for (int tries = 0; tries < 20 && !placed; ++tries) {
      Edge& e = edges_[rng_.pick(exterior)];
      const double len = e.seg.length(), w = rng_.uniform(1.2, 1.8);
      if (len < w + 0.8) continue;
      const double start = rng_.uniform(0.4, len - 0.4 - w);
      if (!interval_free(e, start, start + w, 0.2)) continue;
      e.mounts.emplace_back(start, start + w);
      SpatialFeature f;
      f.id = "window_" + std::to_string(k + 1);
      f.kind = FeatureKind::window;
      const Segment span{along(e.seg, start), along(e.seg, start + w)};
      f.geometry = {span.a, span.b};
      const Vec2 in = inward_normal(e.seg);
      f.anchor = span.midpoint() + in * kAnchorInset;
      f.orientation = std::atan2(in.y, in.x);
      f.room = e.room;
      s.features.push_back(std::move(f));
      placed = true;
    }
    if (!placed) return false;
  }
  return true;
}

bool Placer::add_wall_point(SceneInstance& s, FeatureKind kind, const std::string& id) {
  for (int tries = 0; tries < 20; ++tries) {
    const std::size_t ei = rng_.below(edges_.size());
    Edge& e = edges_[ei];
    // Interior edges can host fixtures on either face.
    const bool flip = e.other_room >= 0 && rng_.chance(0.5);
    const double len = e.seg.length();
    const double at = rng_.uniform(0.5, len - 0.5);
    if (!interval_free(e, at - 0.3, at + 0.3, 0.1)) continue;
    e.mounts.emplace_back(at - 0.3, at + 0.3);
    const Vec2 p = along(e.seg, at);
    Vec2 in = inward_normal(e.seg);
    if (flip) in = in * -1.0;
    SpatialFeature f;
    f.id = id;
    f.kind = kind;
    f.geometry = {p};
    f.anchor = p + in * kAnchorInset;
    f.orientation = std::atan2(in.y, in.x);
    f.room = flip ? e.other_room : e.room;
    s.features.push_back(std::move(f));
    return true;
  }
  return false;
}

bool Placer::add_kitchen(SceneInstance& s) {
  for (int tries = 0; tries < 30; ++tries) {
    const int r = static_cast<int>(rng_.below(t_.rooms.size()));
    const RoomSpec& room = t_.rooms[r];
    const bool wide = rng_.chance(0.5);
    const double w = wide ? 1.6 : 1.0, h = wide ? 1.0 : 1.6;
    const int corner = rng_.between(0, 3);
    const double x0 = (corner == 0 || corner == 3) ? room.x0 + 0.1 : room.x1 - 0.1 - w;
    const double y0 = (corner < 2) ? room.y0 + 0.1 : room.y1 - 0.1 - h;
    Polygon zone = rect_polygon(x0, y0, x0 + w, y0 + h);
    bool clear = true;
    for (const auto& o : obstacles_)
      if (convex_polygons_overlap(o, zone)) clear = false;
    // Keep doorways free.
    for (const auto& op : s.openings)
      if (point_polygon_distance(op.span.midpoint(), zone) < 0.8) clear = false;
    for (const auto& e : edges_)
      for (const auto& c : e.cuts)
        if (point_polygon_distance(along(e.seg, (c.first + c.second) / 2), zone) < 0.8) clear = false;
    if (!clear) continue;
    SpatialFeature f;
    f.id = "kitchen_1";
    f.kind = FeatureKind::kitchen_zone;
    f.anchor = centroid(zone);
    f.geometry = std::move(zone);
    f.room = r;
    s.features.push_back(std::move(f));
    return true;
  }
  return false;
}

void Placer::emit_walls(SceneInstance& s) {
  for (auto& e : edges_) {
    auto cuts = e.cuts;
    std::sort(cuts.begin(), cuts.end());
    double at = 0.0;
    const double len = e.seg.length();
    for (const auto& [a, b] : cuts) {
      if (a > at) s.walls.push_back({along(e.seg, at), along(e.seg, a)});
      at = b;
    }
    if (at < len) s.walls.push_back({along(e.seg, at), e.seg.b});
    if (e.other_room >= 0)
      for (const auto& [a, b] : e.cuts) s.openings.push_back({{along(e.seg, a), along(e.seg, b)}, false});
  }
}

// Walkable: inside a room, 0.3 m from walls and tables.
bool walkable(const SceneInstance& s, Vec2 p) {
  bool inside = false;
  for (const auto& r : s.rooms)
    if (point_in_polygon(p, r.outline)) inside = true;
  if (!inside) return false;
  for (const auto& w : s.walls)
    if (point_segment_distance(p, w) < kPathHalfWidth) return false;
  for (const auto& t : s.tables)
    if (point_polygon_distance(p, t.perimeter) < kPathHalfWidth) return false;
  return true;
}

void Placer::add_viewpoints(SceneInstance& s) {
  const double step = cfg_.viewpoint_spacing > 0 ? cfg_.viewpoint_spacing : t_.viewpoint_spacing;
  int n = 0;
  for (std::size_t r = 0; r < t_.rooms.size(); ++r) {
    const auto& rs = t_.rooms[r];
    for (double y = rs.y0 + step / 2; y < rs.y1; y += step)
      for (double x = rs.x0 + step / 2; x < rs.x1; x += step) {
        const Vec2 p{x, y};
        if (!walkable(s, p)) continue;
        s.viewpoints.push_back({"v" + std::to_string(++n), p, static_cast<int>(r)});
      }
  }
}

bool seats_reachable(const SceneInstance& s) {
  double x0 = std::numeric_limits<double>::infinity(), y0 = x0, x1 = -x0, y1 = -x0;
  for (const auto& r : s.rooms)
    for (const auto& v : r.outline) {
      x0 = std::min(x0, v.x);
      y0 = std::min(y0, v.y);
      x1 = std::max(x1, v.x);
      y1 = std::max(y1, v.y);
    }
  const int nx = static_cast<int>(std::ceil((x1 - x0) / kGridCell));
  const int ny = static_cast<int>(std::ceil((y1 - y0) / kGridCell));
  auto center = [&](int i, int j) { return Vec2{x0 + (i + 0.5) * kGridCell, y0 + (j + 0.5) * kGridCell}; };
  std::vector<char> free(static_cast<std::size_t>(nx * ny));
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) free[j * nx + i] = walkable(s, center(i, j));
  std::vector<char> seen(free.size(), 0);
  std::deque<int> queue;
  for (const auto& f : s.features) {
    if (f.kind != FeatureKind::exit) continue;
    for (int j = 0; j < ny; ++j)
      for (int i = 0; i < nx; ++i) {
        const int k = j * nx + i;
        if (free[k] && !seen[k] && distance(center(i, j), f.anchor) <= 0.45) {
          seen[k] = 1;
          queue.push_back(k);
        }
      }
  }
  while (!queue.empty()) {
    const int k = queue.front();
    queue.pop_front();
    const int i = k % nx, j = k / nx;
    const int di[] = {1, -1, 0, 0}, dj[] = {0, 0, 1, -1};
    for (int d = 0; d < 4; ++d) {
      const int a = i + di[d], b = j + dj[d];
      if (a < 0 || b < 0 || a >= nx || b >= ny) continue;
      const int q = b * nx + a;
      if (free[q] && !seen[q]) {
        seen[q] = 1;
        queue.push_back(q);
      }
    }
  }
  for (const auto& seat : s.seats) {
    bool ok = false;
    const int ci = static_cast<int>((seat.position.x - x0) / kGridCell);
    const int cj = static_cast<int>((seat.position.y - y0) / kGridCell);
    const int reach = static_cast<int>(std::ceil(kSeatReach / kGridCell)) + 1;
    for (int j = std::max(0, cj - reach); j <= std::min(ny - 1, cj + reach) && !ok; ++j)
      for (int i = std::max(0, ci - reach); i <= std::min(nx - 1, ci + reach) && !ok; ++i)
        if (seen[j * nx + i] && distance(center(i, j), seat.position) <= kSeatReach) ok = true;
    if (!ok) return false;
  }
  return true;
}

bool visible_from_somewhere(const SceneInstance& s, Vec2 target, const SpatialConfig& cfg) {
  // Eight headings with a field of view of at least 45 degrees cover every
  // bearing, so range and line of sight decide coverage.
  for (const auto& v : s.viewpoints)
    if (distance(v.position, target) <= cfg.observation_range && line_of_sight(s, v.position, target)) return true;
  return false;
}

bool Placer::attempt(SceneInstance& s) {
  s = SceneInstance{};
  obstacles_.clear();
  s.template_id = t_.id;
  for (std::size_t r = 0; r < t_.rooms.size(); ++r) {
    const auto& rs = t_.rooms[r];
    s.rooms.push_back({"R" + std::to_string(r + 1), rect_polygon(rs.x0, rs.y0, rs.x1, rs.y1)});
  }
  if (!place_tables(s)) return false;
  build_edges();
  if (!cut_interior_doors()) return false;
  if (!add_exits(s)) return false;
  if (!add_windows(s)) return false;
  if (!add_wall_point(s, FeatureKind::television, "tv_1")) return false;
  const int acs = rng_.between(t_.slots.ac_min, t_.slots.ac_max);
  for (int k = 0; k < acs; ++k)
    if (!add_wall_point(s, FeatureKind::air_conditioner, "ac_" + std::to_string(k + 1))) return false;
  if (!add_kitchen(s)) return false;
  for (const auto& f : s.features)
    if (f.kind == FeatureKind::kitchen_zone) obstacles_.push_back(f.geometry);
  emit_walls(s);
  s.table_style = rng_.between(1, 8);
  s.chair_style = rng_.between(1, 6);
  add_viewpoints(s);
  if (!seats_reachable(s)) return false;
  for (const auto& seat : s.seats)
    if (!visible_from_somewhere(s, seat.position, cfg_)) return false;
  for (const auto& f : s.features)
    if (!visible_from_somewhere(s, f.anchor, cfg_)) return false;
  // Order features by kind then id for stable output.
  std::stable_sort(s.features.begin(), s.features.end(),
                   [](const SpatialFeature& a, const SpatialFeature& b) { return a.kind < b.kind; });
  return true;
}

}  // namespace

std::string_view to_string(TemplateId t) { return kTemplateNames[static_cast<std::size_t>(t)]; }
std::string_view to_string(TableShape s) { return kShapeNames[static_cast<std::size_t>(s)]; }
std::string_view to_string(FeatureKind k) { return kFeatureNames[static_cast<std::size_t>(k)]; }
std::string_view to_string(Tableware t) { return kTablewareNames[static_cast<std::size_t>(t)]; }
TemplateId template_from_string(std::string_view s) {
  return static_cast<TemplateId>(lookup(kTemplateNames, s, "template"));
}
TableShape table_shape_from_string(std::string_view s) {
  return static_cast<TableShape>(lookup(kShapeNames, s, "table shape"));
}
FeatureKind feature_kind_from_string(std::string_view s) {
  return static_cast<FeatureKind>(lookup(kFeatureNames, s, "feature kind"));
}
Tableware tableware_from_string(std::string_view s) {
  return static_cast<Tableware>(lookup(kTablewareNames, s, "tableware"));
}

int SceneTemplate::seat_total() const {
  int n = 0;
  for (const auto& t : tables) n += t.seat_count;
  return n;
}

const SceneTemplate& scene_template(TemplateId id) {
  static const std::vector<SceneTemplate> templates = build_templates();
  return templates[static_cast<std::size_t>(id)];
}

double heading_angle(int heading) { return wrap_angle(heading * kPi / 4.0); }

const Seat& SceneInstance::seat(std::string_view id) const {
  for (const auto& s : seats)
    if (s.id == id) return s;
  throw UnknownIdError("unknown seat '" + std::string(id) + "'");
}

std::optional<std::size_t> SceneInstance::seat_index(std::string_view id) const {
  for (std::size_t i = 0; i < seats.size(); ++i)
    if (seats[i].id == id) return i;
  return std::nullopt;
}

const SpatialFeature& SceneInstance::feature(std::string_view id) const {
  for (const auto& f : features)
    if (f.id == id) return f;
  throw UnknownIdError("unknown feature '" + std::string(id) + "'");
}

const Table& SceneInstance::table(std::string_view id) const {
  for (const auto& t : tables)
    if (t.id == id) return t;
  throw UnknownIdError("unknown table '" + std::string(id) + "'");
}

std::vector<const SpatialFeature*> SceneInstance::features_of(FeatureKind k) const {
  std::vector<const SpatialFeature*> out;
  for (const auto& f : features)
    if (f.kind == k) out.push_back(&f);
  return out;
}

int SceneInstance::seats_at(std::string_view table_id) const {
  return static_cast<int>(std::count_if(seats.begin(), seats.end(), [&](const Seat& s) { return s.table_id == table_id; }));
}

bool SceneInstance::operator==(const SceneInstance& o) const {
  return scene_to_json(*this) == scene_to_json(o);
}

SceneInstance instantiate_scene(const SceneTemplate& t, Rng& rng, const SpatialConfig& cfg) {
  Placer placer(t, rng, cfg);
  SceneInstance s;
  for (int attempt = 0; attempt < kPlacementAttempts; ++attempt)
    if (placer.attempt(s)) return s;
  throw PlacementError("template " + std::string(to_string(t.id)) + ": no valid placement after " +
                       std::to_string(kPlacementAttempts) + " attempts");
}

std::vector<std::string> check_scene_invariants(const SceneInstance& s) {
  std::vector<std::string> problems;
  std::vector<Polygon> footprints;
  std::vector<std::string> names;
  for (const auto& t : s.tables) {
    footprints.push_back(t.perimeter);
    names.push_back(t.id);
  }
  for (const auto& seat : s.seats) {
    footprints.push_back(oriented_rect(seat.position, kChairSize, kChairSize, seat.facing));
    names.push_back(seat.id);
  }
  for (std::size_t i = 0; i < footprints.size(); ++i)
    for (std::size_t j = i + 1; j < footprints.size(); ++j)
      if (convex_polygons_overlap(footprints[i], footprints[j]))
        problems.push_back("footprints of " + names[i] + " and " + names[j] + " overlap");
  for (const auto& seat : s.seats) {
    const Polygon chair = oriented_rect(seat.position, kChairSize, kChairSize, seat.facing);
    const bool inside = std::any_of(s.rooms.begin(), s.rooms.end(), [&](const Room& r) {
      return std::all_of(chair.begin(), chair.end(), [&](Vec2 v) { return point_in_polygon(v, r.outline); });
    });
    if (!inside) problems.push_back("seat " + seat.id + " is not inside a room");
    const Table& t = s.table(seat.table_id);
    if (!ray_hits_polygon(seat.position, from_angle(seat.facing), t.perimeter))
      problems.push_back("seat " + seat.id + " does not face its table");
  }
  std::map<std::string, std::vector<int>> indices;
  for (const auto& seat : s.seats) indices[seat.table_id].push_back(seat.perimeter_index);
  for (auto& [tid, idx] : indices) {
    std::sort(idx.begin(), idx.end());
    for (std::size_t i = 0; i < idx.size(); ++i)
      if (idx[i] != static_cast<int>(i)) problems.push_back("table " + tid + " perimeter indices are not 0..n-1");
  }
  std::array<int, kFeatureKindCount> counts{};
  for (const auto& f : s.features) ++counts[static_cast<std::size_t>(f.kind)];
  if (counts[0] < 1) problems.push_back("no window");
  if (counts[1] != 1) problems.push_back("television count is not 1");
  if (counts[2] < 1) problems.push_back("no air conditioner");
  if (counts[3] != 1) problems.push_back("kitchen zone count is not 1");
  if (counts[4] < 1) problems.push_back("no exit");
  if (!seats_reachable(s)) problems.push_back("some seat is unreachable with 0.6 m clearance");
  return problems;
}

// ---------------------------------------------------------------------------
// Predicates

Adjacency seat_adjacency(const SceneInstance& s) {
  Adjacency adj;
  const auto idx = seat_neighbor_indices(s);
  for (std::size_t i = 0; i < s.seats.size(); ++i) {
    auto& set = adj[s.seats[i].id];
    for (int j : idx[i]) set.insert(s.seats[j].id);
  }
  return adj;
}

std::vector<std::vector<int>> seat_neighbor_indices(const SceneInstance& s) {
  std::vector<std::vector<int>> out(s.seats.size());
  std::map<std::string, std::vector<int>> by_table;
  for (std::size_t i = 0; i < s.seats.size(); ++i) by_table[s.seats[i].table_id].push_back(static_cast<int>(i));
  for (auto& [tid, members] : by_table) {
    std::sort(members.begin(), members.end(),
              [&](int a, int b) { return s.seats[a].perimeter_index < s.seats[b].perimeter_index; });
    const std::size_t n = members.size();
    if (n < 2) continue;
    for (std::size_t k = 0; k < n; ++k) {
      const int me = members[k];
      const int next = members[(k + 1) % n];
      const int prev = members[(k + n - 1) % n];
      auto add = [&](int other) {
        if (other != me && std::find(out[me].begin(), out[me].end(), other) == out[me].end()) out[me].push_back(other);
      };
      add(prev);
      add(next);
    }
  }
  for (auto& v : out) std::sort(v.begin(), v.end());
  return out;
}

double distance_to(const Seat& seat, const SpatialFeature& f) {
  const auto& g = f.geometry;
  if (g.size() == 1) return distance(seat.position, g[0]);
  if (g.size() == 2) return point_segment_distance(seat.position, {g[0], g[1]});
  return point_polygon_distance(seat.position, g);
}

bool line_of_sight(const SceneInstance& s, Vec2 a, Vec2 b) {
  const Segment ray{a, b};
  return std::none_of(s.walls.begin(), s.walls.end(), [&](const Segment& w) { return segments_intersect(ray, w); });
}

std::string field_of_view_obstacle(const SceneInstance& s, const Seat& seat, const SpatialFeature& f, double fov) {
  const Vec2 d = f.anchor - seat.position;
  const double bearing = std::atan2(d.y, d.x);
  const double off = angle_between(bearing, seat.facing);
  if (off > fov / 2) {
    char buf[96];
    std::snprintf(buf, sizeof buf, "bearing is %.0f deg off the seat's facing (limit %.0f deg)", off * 180 / kPi,
                  fov * 90 / kPi);
    return buf;
  }
  if (!line_of_sight(s, seat.position, f.anchor)) return "a wall blocks the line of sight";
  return "";
}

bool in_field_of_view(const SceneInstance& s, const Seat& seat, const SpatialFeature& f, double fov) {
  const Vec2 d = f.anchor - seat.position;
  const double bearing = std::atan2(d.y, d.x);
  if (angle_between(bearing, seat.facing) > fov / 2) return false;
  return line_of_sight(s, seat.position, f.anchor);
}

std::vector<std::string> ObservationFrame::visible_seat_ids() const {
  std::vector<std::string> out;
  for (const auto& s : seats) out.push_back(s.id);
  return out;
}

std::vector<std::string> ObservationFrame::visible_feature_ids() const {
  std::vector<std::string> out;
  for (const auto& f : features) out.push_back(f.id);
  return out;
}

ObservationFrame viewpoint_observe(const SceneInstance& s, std::string_view viewpoint_id, int heading,
                                   const SpatialConfig& cfg) {
  if (heading < 0 || heading >= kHeadingCount) throw std::out_of_range("heading must be in 0..7");
  const Viewpoint* vp = nullptr;
  for (const auto& v : s.viewpoints)
    if (v.id == viewpoint_id) vp = &v;
  if (!vp) throw UnknownIdError("unknown viewpoint '" + std::string(viewpoint_id) + "'");
  ObservationFrame frame;
  frame.viewpoint_id = vp->id;
  frame.heading = heading;
  const double h = heading_angle(heading);
  auto sight = [&](Vec2 target, Sighting& out) {
    const Vec2 d = target - vp->position;
    const double dist = d.norm();
    if (dist > cfg.observation_range) return false;
    const double rel = wrap_angle(std::atan2(d.y, d.x) - h);
    if (std::abs(rel) > cfg.observation_fov / 2) return false;
    if (!line_of_sight(s, vp->position, target)) return false;
    out.distance = dist;
    out.bearing = rel;
    return true;
  };
  for (const auto& seat : s.seats) {
    Sighting sg;
    if (!sight(seat.position, sg)) continue;
    sg.id = seat.id;
    sg.table_id = seat.table_id;
    sg.tableware = seat.tableware;
    frame.seats.push_back(std::move(sg));
  }
  for (const auto& f : s.features) {
    Sighting sg;
    if (!sight(f.anchor, sg)) continue;
    sg.id = f.id;
    sg.kind = f.kind;
    frame.features.push_back(std::move(sg));
  }
  return frame;
}

ElbowRoom elbow_room(Vec2 position, double facing, const std::vector<Vec2>& neighbor_positions, double elbow) {
  ElbowRoom out;
  const Vec2 f = from_angle(facing);
  for (const auto& p : neighbor_positions) {
    const Vec2 d = p - position;
    if (d.norm() > elbow) continue;
    const double side = cross(f, d);
    if (side > 0) out.left_blocked = true;
    else if (side < 0) out.right_blocked = true;
  }
  return out;
}

const SeatDigest* EnvDigest::find(std::string_view seat_id) const {
  for (const auto& s : seats)
    if (s.seat_id == seat_id) return &s;
  return nullptr;
}

EnvDigest export_ground_truth_features(const SceneInstance& s, const SpatialConfig& cfg) {
  EnvDigest d;
  const auto nbr = seat_neighbor_indices(s);
  for (std::size_t i = 0; i < s.seats.size(); ++i) {
    const Seat& seat = s.seats[i];
    SeatDigest sd;
    sd.seat_id = seat.id;
    sd.table_id = seat.table_id;
    sd.tableware = seat.tableware;
    sd.position = seat.position;
    sd.facing = seat.facing;
    std::vector<Vec2> npos;
    for (int j : nbr[i]) {
      sd.neighbors.push_back(s.seats[j].id);
      npos.push_back(s.seats[j].position);
    }
    for (const auto& f : s.features) {
      const auto k = static_cast<std::size_t>(f.kind);
      const double dist = distance_to(seat, f);
      if (!sd.nearest[k] || dist < *sd.nearest[k]) {
        sd.nearest[k] = dist;
        sd.nearest_id[k] = f.id;
      }
    }
    for (const auto* tv : s.features_of(FeatureKind::television))
      if (in_field_of_view(s, seat, *tv, cfg.tv_fov)) sd.tv_visible = true;
    const auto room = elbow_room(seat.position, seat.facing, npos, cfg.elbow_distance);
    sd.left_blocked = room.left_blocked;
    sd.right_blocked = room.right_blocked;
    d.seats.push_back(std::move(sd));
  }
  return d;
}

FloorPlan floor_plan(const SceneInstance& s) { return {s.rooms, s.walls, s.openings, s.viewpoints}; }

EnvDigest reconstruct_digest(const FloorPlan& plan, const std::vector<ObservationFrame>& frames,
                             const SpatialConfig& cfg) {
  struct SeenSeat {
    Vec2 position;
    std::string table_id;
    Tableware tableware;
  };
  struct SeenFeature {
    Vec2 anchor;
    FeatureKind kind;
  };
  std::map<std::string, SeenSeat> seats;
  std::map<std::string, SeenFeature> features;
  std::map<std::string, Vec2> vp_pos;
  for (const auto& v : plan.viewpoints) vp_pos[v.id] = v.position;
  for (const auto& fr : frames) {
    auto it = vp_pos.find(fr.viewpoint_id);
    if (it == vp_pos.end()) continue;
    const double h = heading_angle(fr.heading);
    auto locate = [&](const Sighting& sg) { return it->second + from_angle(h + sg.bearing) * sg.distance; };
    for (const auto& sg : fr.seats)
      if (!seats.count(sg.id)) seats[sg.id] = {locate(sg), sg.table_id, sg.tableware.value_or(Tableware::chopsticks)};
    for (const auto& sg : fr.features)
      if (!features.count(sg.id)) features[sg.id] = {locate(sg), sg.kind.value_or(FeatureKind::window)};
  }

  std::map<std::string, std::vector<std::string>> by_table;
  for (const auto& [id, s] : seats) by_table[s.table_id].push_back(id);
  std::map<std::string, Vec2> table_center;
  for (const auto& [tid, ids] : by_table) {
    Vec2 c;
    for (const auto& id : ids) c = c + seats[id].position;
    table_center[tid] = c * (1.0 / static_cast<double>(ids.size()));
  }
  // Neighbours from angular order around the estimated table centre.
  std::map<std::string, std::vector<std::string>> neighbors;
  for (auto& [tid, ids] : by_table) {
    const Vec2 c = table_center[tid];
    std::sort(ids.begin(), ids.end(), [&](const std::string& a, const std::string& b) {
      const Vec2 da = seats[a].position - c, db = seats[b].position - c;
      return std::atan2(da.y, da.x) < std::atan2(db.y, db.x);
    });
    const std::size_t n = ids.size();
    if (n < 2) continue;
    for (std::size_t k = 0; k < n; ++k) {
      auto& v = neighbors[ids[k]];
      for (const auto& o : {ids[(k + 1) % n], ids[(k + n - 1) % n]})
        if (o != ids[k] && std::find(v.begin(), v.end(), o) == v.end()) v.push_back(o);
    }
  }

  SceneInstance walls_only;
  walls_only.walls = plan.walls;
  EnvDigest d;
  for (const auto& [id, s] : seats) {
    SeatDigest sd;
    sd.seat_id = id;
    sd.table_id = s.table_id;
    sd.tableware = s.tableware;
    sd.position = s.position;
    const Vec2 to_c = table_center[s.table_id] - s.position;
    sd.facing = std::atan2(to_c.y, to_c.x);
    sd.neighbors = neighbors[id];
    std::sort(sd.neighbors.begin(), sd.neighbors.end());
    std::vector<Vec2> npos;
    for (const auto& n : sd.neighbors) npos.push_back(seats[n].position);
    for (const auto& [fid, f] : features) {
      const auto k = static_cast<std::size_t>(f.kind);
      const double dist = distance(s.position, f.anchor);
      if (!sd.nearest[k] || dist < *sd.nearest[k]) {
        sd.nearest[k] = dist;
        sd.nearest_id[k] = fid;
      }
      if (f.kind == FeatureKind::television) {
        const Vec2 dv = f.anchor - s.position;
        if (angle_between(std::atan2(dv.y, dv.x), sd.facing) <= cfg.tv_fov / 2 &&
            line_of_sight(walls_only, s.position, f.anchor))
          sd.tv_visible = true;
      }
    }
    const auto room = elbow_room(s.position, sd.facing, npos, cfg.elbow_distance);
    sd.left_blocked = room.left_blocked;
    sd.right_blocked = room.right_blocked;
    d.seats.push_back(std::move(sd));
  }
  return d;
}

// ---------------------------------------------------------------------------
// JSON

namespace {

nlohmann::json vec_json(Vec2 v) { return nlohmann::json::array({v.x, v.y}); }
Vec2 vec_from(const nlohmann::json& j) { return {j.at(0).get<double>(), j.at(1).get<double>()}; }
nlohmann::json poly_json(const Polygon& p) {
  auto a = nlohmann::json::array();
  for (const auto& v : p) a.push_back(vec_json(v));
  return a;
}
Polygon poly_from(const nlohmann::json& j) {
  Polygon p;
  for (const auto& v : j) p.push_back(vec_from(v));
  return p;
}
nlohmann::json seg_json(const Segment& s) { return nlohmann::json::array({vec_json(s.a), vec_json(s.b)}); }
Segment seg_from(const nlohmann::json& j) { return {vec_from(j.at(0)), vec_from(j.at(1))}; }

nlohmann::json rooms_json(const std::vector<Room>& rooms) {
  auto a = nlohmann::json::array();
  for (const auto& r : rooms) a.push_back({{"id", r.id}, {"outline", poly_json(r.outline)}});
  return a;
}
std::vector<Room> rooms_from(const nlohmann::json& j) {
  std::vector<Room> out;
  for (const auto& r : j) out.push_back({r.at("id").get<std::string>(), poly_from(r.at("outline"))});
  return out;
}
nlohmann::json walls_json(const std::vector<Segment>& walls) {
  auto a = nlohmann::json::array();
  for (const auto& w : walls) a.push_back(seg_json(w));
  return a;
}
std::vector<Segment> walls_from(const nlohmann::json& j) {
  std::vector<Segment> out;
  for (const auto& w : j) out.push_back(seg_from(w));
  return out;
}
nlohmann::json openings_json(const std::vector<Opening>& ops) {
  auto a = nlohmann::json::array();
  for (const auto& o : ops) a.push_back({{"span", seg_json(o.span)}, {"exit", o.exit}});
  return a;
}
std::vector<Opening> openings_from(const nlohmann::json& j) {
  std::vector<Opening> out;
  for (const auto& o : j) out.push_back({seg_from(o.at("span")), o.at("exit").get<bool>()});
  return out;
}
nlohmann::json viewpoints_json(const std::vector<Viewpoint>& vps) {
  auto a = nlohmann::json::array();
  for (const auto& v : vps) a.push_back({{"id", v.id}, {"position", vec_json(v.position)}, {"room", v.room}});
  return a;
}
std::vector<Viewpoint> viewpoints_from(const nlohmann::json& j) {
  std::vector<Viewpoint> out;
  for (const auto& v : j) out.push_back({v.at("id").get<std::string>(), vec_from(v.at("position")), v.at("room").get<int>()});
  return out;
}

}  // namespace

nlohmann::json scene_to_json(const SceneInstance& s) {
  nlohmann::json tables = nlohmann::json::array();
  for (const auto& t : s.tables)
    tables.push_back({{"id", t.id},
                      {"shape", to_string(t.shape)},
                      {"center", vec_json(t.center)},
                      {"rotation_rad", t.rotation},
                      {"perimeter", poly_json(t.perimeter)},
                      {"room", t.room}});
  nlohmann::json seats = nlohmann::json::array();
  for (const auto& st : s.seats)
    seats.push_back({{"id", st.id},
                     {"table_id", st.table_id},
                     {"position", vec_json(st.position)},
                     {"facing_rad", st.facing},
                     {"perimeter_index", st.perimeter_index},
                     {"tableware", to_string(st.tableware)}});
  nlohmann::json features = nlohmann::json::array();
  for (const auto& f : s.features)
    features.push_back({{"id", f.id},
                        {"kind", to_string(f.kind)},
                        {"geometry", poly_json(f.geometry)},
                        {"anchor", vec_json(f.anchor)},
                        {"orientation_rad", f.orientation},
                        {"room", f.room}});
  return {{"units", {{"length", "m"}, {"angle", "rad"}}},
          {"template", to_string(s.template_id)},
          {"rooms", rooms_json(s.rooms)},
          {"walls", walls_json(s.walls)},
          {"openings", openings_json(s.openings)},
          {"tables", tables},
          {"seats", seats},
          {"features", features},
          {"viewpoints", viewpoints_json(s.viewpoints)},
          {"style", {{"table_style", s.table_style}, {"chair_style", s.chair_style}}}};
}

SceneInstance scene_from_json(const nlohmann::json& j) {
  try {
    SceneInstance s;
    s.template_id = template_from_string(j.at("template").get<std::string>());
    s.rooms = rooms_from(j.at("rooms"));
    s.walls = walls_from(j.at("walls"));
    s.openings = openings_from(j.at("openings"));
    for (const auto& t : j.at("tables"))
      s.tables.push_back({t.at("id").get<std::string>(), table_shape_from_string(t.at("shape").get<std::string>()),
                          vec_from(t.at("center")), t.at("rotation_rad").get<double>(), poly_from(t.at("perimeter")),
                          t.at("room").get<int>()});
    for (const auto& st : j.at("seats"))
      s.seats.push_back({st.at("id").get<std::string>(), st.at("table_id").get<std::string>(),
                         vec_from(st.at("position")), st.at("facing_rad").get<double>(),
                         st.at("perimeter_index").get<int>(),
                         tableware_from_string(st.at("tableware").get<std::string>())});
    for (const auto& f : j.at("features"))
      s.features.push_back({f.at("id").get<std::string>(), feature_kind_from_string(f.at("kind").get<std::string>()),
                            poly_from(f.at("geometry")), vec_from(f.at("anchor")),
                            f.at("orientation_rad").get<double>(), f.at("room").get<int>()});
    s.viewpoints = viewpoints_from(j.at("viewpoints"));
    s.table_style = j.at("style").at("table_style").get<int>();
    s.chair_style = j.at("style").at("chair_style").get<int>();
    return s;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("scene: ") + e.what());
  }
}

nlohmann::json floor_plan_to_json(const FloorPlan& p) {
  return {{"rooms", rooms_json(p.rooms)},
          {"walls", walls_json(p.walls)},
          {"openings", openings_json(p.openings)},
          {"viewpoints", viewpoints_json(p.viewpoints)}};
}

FloorPlan floor_plan_from_json(const nlohmann::json& j) {
  try {
    return {rooms_from(j.at("rooms")), walls_from(j.at("walls")), openings_from(j.at("openings")),
            viewpoints_from(j.at("viewpoints"))};
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("floor plan: ") + e.what());
  }
}

nlohmann::json frame_to_json(const ObservationFrame& f) {
  nlohmann::json seats = nlohmann::json::array(), feats = nlohmann::json::array();
  for (const auto& s : f.seats)
    seats.push_back({{"id", s.id},
                     {"distance_m", s.distance},
                     {"bearing_rad", s.bearing},
                     {"table_id", s.table_id},
                     {"tableware", to_string(s.tableware.value_or(Tableware::chopsticks))}});
  for (const auto& s : f.features)
    feats.push_back({{"id", s.id},
                     {"distance_m", s.distance},
                     {"bearing_rad", s.bearing},
                     {"kind", to_string(s.kind.value_or(FeatureKind::window))}});
  return {{"viewpoint", f.viewpoint_id}, {"heading", f.heading}, {"seats", seats}, {"features", feats}};
}

ObservationFrame frame_from_json(const nlohmann::json& j) {
  try {
    ObservationFrame f;
    f.viewpoint_id = j.at("viewpoint").get<std::string>();
    f.heading = j.at("heading").get<int>();
    for (const auto& s : j.at("seats")) {
      Sighting sg;
      sg.id = s.at("id").get<std::string>();
      sg.distance = s.at("distance_m").get<double>();
      sg.bearing = s.at("bearing_rad").get<double>();
      sg.table_id = s.at("table_id").get<std::string>();
      sg.tableware = tableware_from_string(s.at("tableware").get<std::string>());
      f.seats.push_back(std::move(sg));
    }
    for (const auto& s : j.at("features")) {
      Sighting sg;
      sg.id = s.at("id").get<std::string>();
      sg.distance = s.at("distance_m").get<double>();
      sg.bearing = s.at("bearing_rad").get<double>();
      sg.kind = feature_kind_from_string(s.at("kind").get<std::string>());
      f.features.push_back(std::move(sg));
    }
    return f;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("frame: ") + e.what());
  }
}

nlohmann::json digest_to_json(const EnvDigest& d) {
  auto seats = nlohmann::json::array();
  for (const auto& s : d.seats) {
    nlohmann::json nearest = nlohmann::json::object();
    for (std::size_t k = 0; k < kFeatureKindCount; ++k)
      if (s.nearest[k])
        nearest[std::string(to_string(static_cast<FeatureKind>(k)))] = {{"id", s.nearest_id[k]},
                                                                         {"distance_m", *s.nearest[k]}};
    seats.push_back({{"seat_id", s.seat_id},
                     {"table_id", s.table_id},
                     {"tableware", to_string(s.tableware)},
                     {"position", vec_json(s.position)},
                     {"facing_rad", s.facing},
                     {"neighbors", s.neighbors},
                     {"nearest", nearest},
                     {"tv_visible", s.tv_visible},
                     {"left_blocked", s.left_blocked},
                     {"right_blocked", s.right_blocked}});
  }
  return {{"seats", seats}};
}

EnvDigest digest_from_json(const nlohmann::json& j) {
  try {
    EnvDigest d;
    for (const auto& s : j.at("seats")) {
      SeatDigest sd;
      sd.seat_id = s.at("seat_id").get<std::string>();
      sd.table_id = s.at("table_id").get<std::string>();
      sd.tableware = tableware_from_string(s.at("tableware").get<std::string>());
      sd.position = vec_from(s.at("position"));
      sd.facing = s.at("facing_rad").get<double>();
      sd.neighbors = s.at("neighbors").get<std::vector<std::string>>();
      for (const auto& [kind, v] : s.at("nearest").items()) {
        const auto k = static_cast<std::size_t>(feature_kind_from_string(kind));
        sd.nearest[k] = v.at("distance_m").get<double>();
        sd.nearest_id[k] = v.at("id").get<std::string>();
      }
      sd.tv_visible = s.at("tv_visible").get<bool>();
      sd.left_blocked = s.at("left_blocked").get<bool>();
      sd.right_blocked = s.at("right_blocked").get<bool>();
      d.seats.push_back(std::move(sd));
    }
    return d;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("digest: ") + e.what());
  }
}

}  // namespace seatplan
