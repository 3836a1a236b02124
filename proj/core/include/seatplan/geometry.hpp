#pragma once

// Plan-view primitives. All lengths in meters, angles in radians, y axis up.

#include <cmath>
#include <numbers>
#include <span>
#include <vector>

namespace seatplan {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
  Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
  Vec2 operator*(double s) const { return {x * s, y * s}; }
  bool operator==(const Vec2&) const = default;

  double norm() const { return std::hypot(x, y); }
};

inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double distance(Vec2 a, Vec2 b) { return (a - b).norm(); }
inline Vec2 from_angle(double theta) { return {std::cos(theta), std::sin(theta)}; }
inline Vec2 rotate(Vec2 v, double theta) {
  const double c = std::cos(theta), s = std::sin(theta);
  return {c * v.x - s * v.y, s * v.x + c * v.y};
}

/// Wraps an angle to (-pi, pi].
double wrap_angle(double a);

/// Absolute angular deviation between two headings, in [0, pi].
double angle_between(double a, double b);

struct Segment {
  Vec2 a;
  Vec2 b;
  bool operator==(const Segment&) const = default;
  double length() const { return distance(a, b); }
  Vec2 midpoint() const { return (a + b) * 0.5; }
};

using Polygon = std::vector<Vec2>;

double point_segment_distance(Vec2 p, const Segment& s);
Vec2 closest_point_on_segment(Vec2 p, const Segment& s);

/// True when the closed segments share at least one point.
bool segments_intersect(const Segment& s, const Segment& t);

bool point_in_polygon(Vec2 p, std::span<const Vec2> poly);

/// Distance to the boundary of the polygon.
double point_polygon_boundary_distance(Vec2 p, std::span<const Vec2> poly);

/// Zero inside the polygon, boundary distance outside.
double point_polygon_distance(Vec2 p, std::span<const Vec2> poly);

Vec2 centroid(std::span<const Vec2> poly);

/// Separating-axis overlap test for convex polygons. Touching edges do not
/// count as overlap.
bool convex_polygons_overlap(std::span<const Vec2> p, std::span<const Vec2> q);

/// Axis-aligned rectangle as a counter-clockwise polygon.
Polygon rect_polygon(double x0, double y0, double x1, double y1);

/// Rectangle of the given size centred at `center`, rotated by `theta`.
Polygon oriented_rect(Vec2 center, double width, double height, double theta);

/// Counter-clockwise ellipse approximation with `n` vertices.
Polygon ellipse_polygon(Vec2 center, double rx, double ry, double theta, int n);

/// Ray/segment hit test (ray from origin along direction).
bool ray_hits_segment(Vec2 origin, Vec2 dir, const Segment& s);

bool ray_hits_polygon(Vec2 origin, Vec2 dir, std::span<const Vec2> poly);

}  // namespace seatplan
