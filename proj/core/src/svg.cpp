#include "seatplan/svg.hpp"

#include <algorithm>
#include <cstdio>
#include <limits>
#include <set>
#include <sstream>

#include "seatplan/scoring.hpp"

namespace seatplan {

namespace {

constexpr double kScale = 60.0;  // px per metre
constexpr double kMargin = 40.0;

std::string escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

// Initials of the snake_case kind name: near_window -> NW.
std::string glyph(std::string_view kind) {
  std::string g;
  bool start = true;
  for (char c : kind) {
    if (c == '_') {
      start = true;
    } else if (start) {
      g += static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
      start = false;
    }
  }
  return g;
}

struct Frame {
  double x0, y1;
  std::string x(double v) const { return num(kMargin + (v - x0) * kScale); }
  std::string y(double v) const { return num(kMargin + (y1 - v) * kScale); }  // y grows downwards in SVG
};

std::string points(const Frame& f, const std::vector<Vec2>& poly) {
  std::string s;
  for (const auto& p : poly) s += f.x(p.x) + "," + f.y(p.y) + " ";
  if (!s.empty()) s.pop_back();
  return s;
}

}  // namespace

std::string render_svg(const ScenarioInstance& inst, const Assignment* answer, const SpatialConfig& cfg) {
  const SceneInstance& s = inst.scene;
  double x0 = std::numeric_limits<double>::max(), y0 = x0, x1 = std::numeric_limits<double>::lowest(), y1 = x1;
  for (const auto& r : s.rooms)
    for (const auto& p : r.outline) {
      x0 = std::min(x0, p.x);
      y0 = std::min(y0, p.y);
      x1 = std::max(x1, p.x);
      y1 = std::max(y1, p.y);
    }
  if (s.rooms.empty()) x0 = y0 = x1 = y1 = 0.0;
  const Frame f{x0, y1};
  const double width = (x1 - x0) * kScale + 2 * kMargin;
  const double height = (y1 - y0) * kScale + 2 * kMargin;

  std::ostringstream o;
  o << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
    << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << num(width) << "\" height=\""
    << num(height) << "\" viewBox=\"0 0 " << num(width) << " " << num(height) << "\">\n"
    << "<title>" << escape(inst.id) << "</title>\n"
    << "<style>.room{fill:#fafafa;stroke:none}.wall{stroke:#333;stroke-width:4}"
       ".opening{stroke:#8bc34a;stroke-width:4;stroke-dasharray:6 3}.table{fill:#d7b98e;stroke:#6d4c2f}"
       ".seat{fill:#fff;stroke:#555}.seat.unmet{fill:#ffcdd2;stroke:#c62828}"
       ".feature{stroke-width:5;fill:none}.relation{stroke:#1e88e5;stroke-width:1.5;opacity:.6}"
       ".violation{stroke:#c62828;stroke-width:3;stroke-dasharray:5 3}"
       "text{font-family:sans-serif;font-size:10px}.glyph{font-size:8px;fill:#555}</style>\n";

  o << "<g id=\"rooms\">\n";
  for (const auto& r : s.rooms)
    o << "<polygon class=\"room\" id=\"" << escape(r.id) << "\" points=\"" << points(f, r.outline) << "\"/>\n";
  o << "</g>\n<g id=\"walls\">\n";
  for (const auto& w : s.walls)
    o << "<line class=\"wall\" x1=\"" << f.x(w.a.x) << "\" y1=\"" << f.y(w.a.y) << "\" x2=\"" << f.x(w.b.x)
      << "\" y2=\"" << f.y(w.b.y) << "\"/>\n";
  for (const auto& op : s.openings)
    if (op.exit)
      o << "<line class=\"opening\" x1=\"" << f.x(op.span.a.x) << "\" y1=\"" << f.y(op.span.a.y) << "\" x2=\""
        << f.x(op.span.b.x) << "\" y2=\"" << f.y(op.span.b.y) << "\"/>\n";
  o << "</g>\n<g id=\"features\">\n";
  for (const auto& ft : s.features) {
    static const char* colors[] = {"#4fc3f7", "#212121", "#80deea", "#ffb74d", "#8bc34a"};
    const char* color = colors[static_cast<int>(ft.kind)];
    if (ft.geometry.size() >= 2) {
      o << "<polyline class=\"feature\" id=\"" << escape(ft.id) << "\" stroke=\"" << color << "\" points=\""
        << points(f, ft.geometry) << "\"><title>" << to_string(ft.kind) << "</title></polyline>\n";
    } else {
      o << "<circle class=\"feature\" id=\"" << escape(ft.id) << "\" stroke=\"" << color << "\" cx=\""
        << f.x(ft.anchor.x) << "\" cy=\"" << f.y(ft.anchor.y) << "\" r=\"6\"><title>" << to_string(ft.kind)
        << "</title></circle>\n";
    }
  }
  o << "</g>\n<g id=\"tables\">\n";
  for (const auto& t : s.tables)
    o << "<polygon class=\"table\" id=\"" << escape(t.id) << "\" points=\"" << points(f, t.perimeter) << "\"/>\n";
  o << "</g>\n";

  std::map<std::string, ResidentId> at_seat;
  std::set<std::string> unmet_seats;
  std::set<std::pair<ResidentId, ResidentId>> violated;
  ReflectionReport report;
  if (answer) {
    for (const auto& [r, seat] : *answer) at_seat[seat] = r;
    report = reflect(inst, *answer, cfg);
    for (const auto& a : report.annotations) {
      if (a.satisfied) continue;
      if (a.category == "conflict") {
        violated.insert({std::min(a.parties[0], a.parties[1]), std::max(a.parties[0], a.parties[1])});
      } else {
        unmet_seats.insert(answer->at(a.parties[0]));
      }
    }

    o << "<g id=\"relations\">\n";
    for (std::size_t i = 0; i < inst.party.size(); ++i)
      for (std::size_t j = i + 1; j < inst.party.size(); ++j) {
        const auto& a = inst.party[i];
        const auto& b = inst.party[j];
        const bool conflict = violated.count({std::min(a, b), std::max(a, b)}) > 0;
        const auto rel = inst.cast.relation_between(a, b);
        if (rel.empty() && !conflict) continue;
        const Vec2 pa = s.seat(answer->at(a)).position, pb = s.seat(answer->at(b)).position;
        std::string label;
        for (auto v : rel) label += (label.empty() ? "" : ", ") + std::string(to_string(v));
        o << "<line class=\"" << (conflict ? "violation" : "relation") << "\" x1=\"" << f.x(pa.x) << "\" y1=\""
          << f.y(pa.y) << "\" x2=\"" << f.x(pb.x) << "\" y2=\"" << f.y(pb.y) << "\"><title>" << escape(a) << " - "
          << escape(b) << (label.empty() ? "" : ": " + escape(label)) << "</title></line>\n";
      }
    o << "</g>\n";
  }

  o << "<g id=\"seats\">\n";
  for (const auto& seat : s.seats) {
    const bool unmet = unmet_seats.count(seat.id) > 0;
    o << "<circle class=\"seat" << (unmet ? " unmet" : "") << "\" id=\"" << escape(seat.id) << "\" cx=\""
      << f.x(seat.position.x) << "\" cy=\"" << f.y(seat.position.y) << "\" r=\"" << num(0.22 * kScale)
      << "\"/>\n";
    auto it = at_seat.find(seat.id);
    const std::string label = it == at_seat.end() ? seat.id : inst.cast.resident(it->second).name;
    o << "<text x=\"" << f.x(seat.position.x) << "\" y=\"" << f.y(seat.position.y)
      << "\" text-anchor=\"middle\" dominant-baseline=\"middle\">" << escape(label) << "</text>\n";
    if (it != at_seat.end()) {
      std::string glyphs;
      for (const auto& p : inst.preferences)
        if (p.owner == it->second) glyphs += (glyphs.empty() ? "" : " ") + glyph(to_string(p.kind));
      o << "<text class=\"glyph\" x=\"" << f.x(seat.position.x) << "\" y=\""
        << num(std::stod(f.y(seat.position.y)) - 0.3 * kScale) << "\" text-anchor=\"middle\">" << escape(glyphs)
        << "</text>\n";
    }
  }
  o << "</g>\n</svg>\n";
  return o.str();
}

}  // namespace seatplan
