#include "seatplan/geometry.hpp"

#include <algorithm>
#include <limits>

namespace seatplan {

namespace {
constexpr double kEps = 1e-12;

int orientation(Vec2 a, Vec2 b, Vec2 c) {
  const double v = cross(b - a, c - a);
  if (v > kEps) return 1;
  if (v < -kEps) return -1;
  return 0;
}

bool on_segment(Vec2 a, Vec2 b, Vec2 p) {
  return std::min(a.x, b.x) - kEps <= p.x && p.x <= std::max(a.x, b.x) + kEps &&
         std::min(a.y, b.y) - kEps <= p.y && p.y <= std::max(a.y, b.y) + kEps;
}
}  // namespace

double wrap_angle(double a) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  a = std::fmod(a, two_pi);
  if (a <= -std::numbers::pi) a += two_pi;
  if (a > std::numbers::pi) a -= two_pi;
  return a;
}

double angle_between(double a, double b) { return std::abs(wrap_angle(a - b)); }

Vec2 closest_point_on_segment(Vec2 p, const Segment& s) {
  const Vec2 d = s.b - s.a;
  const double len2 = dot(d, d);
  if (len2 <= 0.0) return s.a;
  const double t = std::clamp(dot(p - s.a, d) / len2, 0.0, 1.0);
  return s.a + d * t;
}

double point_segment_distance(Vec2 p, const Segment& s) { return distance(p, closest_point_on_segment(p, s)); }

bool segments_intersect(const Segment& s, const Segment& t) {
  const int o1 = orientation(s.a, s.b, t.a);
  const int o2 = orientation(s.a, s.b, t.b);
  const int o3 = orientation(t.a, t.b, s.a);
  const int o4 = orientation(t.a, t.b, s.b);
  if (o1 != o2 && o3 != o4) return true;
  if (o1 == 0 && on_segment(s.a, s.b, t.a)) return true;
  if (o2 == 0 && on_segment(s.a, s.b, t.b)) return true;
  if (o3 == 0 && on_segment(t.a, t.b, s.a)) return true;
  if (o4 == 0 && on_segment(t.a, t.b, s.b)) return true;
  return false;
}

bool point_in_polygon(Vec2 p, std::span<const Vec2> poly) {
  bool inside = false;
  const std::size_t n = poly.size();
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    const Vec2 a = poly[i], b = poly[j];
    if ((a.y > p.y) != (b.y > p.y)) {
      const double x = (b.x - a.x) * (p.y - a.y) / (b.y - a.y) + a.x;
      if (p.x < x) inside = !inside;
    }
  }
  return inside;
}

double point_polygon_boundary_distance(Vec2 p, std::span<const Vec2> poly) {
  double best = std::numeric_limits<double>::infinity();
  const std::size_t n = poly.size();
  for (std::size_t i = 0; i < n; ++i) best = std::min(best, point_segment_distance(p, {poly[i], poly[(i + 1) % n]}));
  return best;
}

double point_polygon_distance(Vec2 p, std::span<const Vec2> poly) {
  if (point_in_polygon(p, poly)) return 0.0;
  return point_polygon_boundary_distance(p, poly);
}

Vec2 centroid(std::span<const Vec2> poly) {
  Vec2 c;
  for (const auto& v : poly) c = c + v;
  return poly.empty() ? c : c * (1.0 / static_cast<double>(poly.size()));
}

bool convex_polygons_overlap(std::span<const Vec2> p, std::span<const Vec2> q) {
  auto separated_on_axes_of = [](std::span<const Vec2> a, std::span<const Vec2> b) {
    const std::size_t n = a.size();
    for (std::size_t i = 0; i < n; ++i) {
      const Vec2 e = a[(i + 1) % n] - a[i];
      const Vec2 axis{-e.y, e.x};
      double amin = std::numeric_limits<double>::infinity(), amax = -amin;
      double bmin = amin, bmax = -amin;
      for (const auto& v : a) {
        amin = std::min(amin, dot(v, axis));
        amax = std::max(amax, dot(v, axis));
      }
      for (const auto& v : b) {
        bmin = std::min(bmin, dot(v, axis));
        bmax = std::max(bmax, dot(v, axis));
      }
      if (amax <= bmin + 1e-9 || bmax <= amin + 1e-9) return true;
    }
    return false;
  };
  return !(separated_on_axes_of(p, q) || separated_on_axes_of(q, p));
}

Polygon rect_polygon(double x0, double y0, double x1, double y1) {
  return {{x0, y0}, {x1, y0}, {x1, y1}, {x0, y1}};
}

Polygon oriented_rect(Vec2 center, double width, double height, double theta) {
  const double hw = width / 2, hh = height / 2;
  Polygon out;
  for (Vec2 v : {Vec2{-hw, -hh}, Vec2{hw, -hh}, Vec2{hw, hh}, Vec2{-hw, hh}}) out.push_back(center + rotate(v, theta));
  return out;
}

Polygon ellipse_polygon(Vec2 center, double rx, double ry, double theta, int n) {
  Polygon out;
  for (int i = 0; i < n; ++i) {
    const double t = 2.0 * std::numbers::pi * i / n;
    out.push_back(center + rotate({rx * std::cos(t), ry * std::sin(t)}, theta));
  }
  return out;
}

bool ray_hits_segment(Vec2 origin, Vec2 dir, const Segment& s) {
  const Vec2 e = s.b - s.a;
  const double denom = cross(dir, e);
  const Vec2 w = s.a - origin;
  if (std::abs(denom) < kEps) return false;
  const double t = cross(w, e) / denom;
  const double u = cross(w, dir) / denom;
  return t >= 0.0 && u >= -1e-12 && u <= 1.0 + 1e-12;
}

bool ray_hits_polygon(Vec2 origin, Vec2 dir, std::span<const Vec2> poly) {
  const std::size_t n = poly.size();
  for (std::size_t i = 0; i < n; ++i)
    if (ray_hits_segment(origin, dir, {poly[i], poly[(i + 1) % n]})) return true;
  return false;
}

}  // namespace seatplan
