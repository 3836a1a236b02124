#include "seatplan/constraints.hpp"

#include <algorithm>
#include <cstdio>
#include <limits>

#include <nlohmann/json.hpp>

#include "seatplan/error.hpp"

namespace seatplan {

namespace {

constexpr std::array<std::string_view, kPreferenceKindCount> kPreferenceNames = {
    "near_window",
    "away_from_window",
    "tv_in_view",
    "near_air_conditioner",
    "away_from_air_conditioner",
    "near_kitchen",
    "away_from_kitchen",
    "near_exit",
    "tableware_chopsticks",
    "tableware_cutlery",
    "dominant_hand_clearance",
    "adjacent_to_spouse",
    "adjacent_to_parent_child",
    "adjacent_to_sibling",
    "adjacent_to_grandparent_grandchild",
    "adjacent_to_in_law",
    "adjacent_to_friend",
    "adjacent_to_neighbor",
    "adjacent_to_colleague_or_superior",
    "adjacent_to_classmate_or_teacher",
    "adjacent_to_peer_age_band",
    "adjacent_to_same_gender",
    "adjacent_to_same_job_sector",
    "adjacent_to_same_income_level",
    "adjacent_to_highly_educated",
    "shared_interest_research",
    "shared_interest_sports",
    "shared_interest_music",
    "shared_interest_cooking",
};

constexpr std::array<std::string_view, kConflictKindCount> kConflictNames = {
    "spousal_quarrel",
    "parent_child_dispute",
    "sibling_rivalry",
    "in_law_friction",
    "grandparent_generation_dispute",
    "friend_falling_out",
    "neighbor_property_dispute",
    "colleague_rivalry",
    "superior_subordinate_grievance",
    "teacher_student_tension",
    "classmate_rivalry",
    "workplace_income_dispute",
};

constexpr std::array<std::string_view, 3> kCategoryNames = {"embodied", "social", "conflict"};
constexpr std::array<std::string_view, 5> kSubcategoryNames = {"embodied", "relation", "group", "topic", "conflict"};

template <std::size_t N>
std::size_t lookup(const std::array<std::string_view, N>& names, std::string_view s, const char* what) {
  for (std::size_t i = 0; i < N; ++i)
    if (names[i] == s) return i;
  throw ParseError(std::string("unknown ") + what + " '" + std::string(s) + "'");
}

std::size_t index(PreferenceKind k) { return static_cast<std::size_t>(k); }

std::string meters(double d) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f m", d);
  return buf;
}

// Nearest feature of a kind straight from scene geometry.
std::pair<const SpatialFeature*, double> nearest_feature(const Seat& seat, const SceneInstance& scene, FeatureKind k) {
  const SpatialFeature* best = nullptr;
  double d = std::numeric_limits<double>::infinity();
  for (const auto& f : scene.features) {
    if (f.kind != k) continue;
    const double x = distance_to(seat, f);
    if (x < d) {
      d = x;
      best = &f;
    }
  }
  if (!best)
    throw ValidationError("scene has no " + std::string(to_string(k)) + " for preference at seat " + seat.id);
  return {best, d};
}

std::vector<std::size_t> neighbor_seats(const Seat& seat, const SceneInstance& scene) {
  const auto idx = seat_neighbor_indices(scene);
  const auto me = scene.seat_index(seat.id);
  if (!me) throw UnknownIdError("seat " + seat.id + " is not in the scene");
  std::vector<std::size_t> out;
  for (int j : idx[*me]) out.push_back(static_cast<std::size_t>(j));
  return out;
}

std::map<std::string, ResidentId> occupants(const Assignment& asg) {
  std::map<std::string, ResidentId> out;
  for (const auto& [r, s] : asg) out[s] = r;
  return out;
}

std::string name_of(const World& w, const ResidentId& id) {
  const Resident* r = w.find(id);
  return r ? r->name : id;
}

}  // namespace

Category category_of(PreferenceKind k) {
  return index(k) < kEmbodiedKindCount ? Category::embodied : Category::social;
}

Subcategory subcategory_of(PreferenceKind k) {
  const std::size_t i = index(k);
  if (i < kEmbodiedKindCount) return Subcategory::embodied;
  if (i <= index(PreferenceKind::adjacent_to_classmate_or_teacher)) return Subcategory::relation;
  if (i <= index(PreferenceKind::adjacent_to_highly_educated)) return Subcategory::group;
  return Subcategory::topic;
}

std::string_view to_string(Category c) { return kCategoryNames[static_cast<std::size_t>(c)]; }
std::string_view to_string(Subcategory c) { return kSubcategoryNames[static_cast<std::size_t>(c)]; }
std::string_view to_string(PreferenceKind k) { return kPreferenceNames[index(k)]; }
std::string_view to_string(ConflictKind k) { return kConflictNames[static_cast<std::size_t>(k)]; }
Category category_from_string(std::string_view s) {
  return static_cast<Category>(lookup(kCategoryNames, s, "category"));
}
Subcategory subcategory_from_string(std::string_view s) {
  return static_cast<Subcategory>(lookup(kSubcategoryNames, s, "subcategory"));
}
PreferenceKind preference_kind_from_string(std::string_view s) {
  return static_cast<PreferenceKind>(lookup(kPreferenceNames, s, "preference kind"));
}
ConflictKind conflict_kind_from_string(std::string_view s) {
  return static_cast<ConflictKind>(lookup(kConflictNames, s, "conflict kind"));
}

std::optional<FeatureKind> feature_of(PreferenceKind k) {
  switch (k) {
    case PreferenceKind::near_window:
    case PreferenceKind::away_from_window: return FeatureKind::window;
    case PreferenceKind::tv_in_view: return FeatureKind::television;
    case PreferenceKind::near_air_conditioner:
    case PreferenceKind::away_from_air_conditioner: return FeatureKind::air_conditioner;
    case PreferenceKind::near_kitchen:
    case PreferenceKind::away_from_kitchen: return FeatureKind::kitchen_zone;
    case PreferenceKind::near_exit: return FeatureKind::exit;
    default: return std::nullopt;
  }
}

std::string_view topic_of(PreferenceKind k) {
  if (subcategory_of(k) != Subcategory::topic) return {};
  return kTopics[index(k) - index(PreferenceKind::shared_interest_research)];
}

const std::vector<RelationView>& relation_views_of(PreferenceKind k) {
  using V = RelationView;
  static const std::map<PreferenceKind, std::vector<RelationView>> table = {
      {PreferenceKind::adjacent_to_spouse, {V::spouse}},
      {PreferenceKind::adjacent_to_parent_child, {V::parent_of, V::child_of}},
      {PreferenceKind::adjacent_to_sibling, {V::sibling}},
      {PreferenceKind::adjacent_to_grandparent_grandchild, {V::grandparent_of, V::grandchild_of}},
      {PreferenceKind::adjacent_to_in_law, {V::in_law}},
      {PreferenceKind::adjacent_to_friend, {V::friend_of}},
      {PreferenceKind::adjacent_to_neighbor, {V::neighbor}},
      {PreferenceKind::adjacent_to_colleague_or_superior, {V::colleague, V::superior_of, V::subordinate_of}},
      {PreferenceKind::adjacent_to_classmate_or_teacher, {V::classmate, V::teacher_of, V::student_of}},
  };
  static const std::vector<RelationView> none;
  auto it = table.find(k);
  return it == table.end() ? none : it->second;
}

const std::vector<RelationView>& compatible_views(ConflictKind k) {
  using V = RelationView;
  static const std::array<std::vector<RelationView>, kConflictKindCount> table = {{
      {V::spouse},
      {V::parent_of, V::child_of},
      {V::sibling},
      {V::in_law},
      {V::grandparent_of, V::grandchild_of},
      {V::friend_of},
      {V::neighbor},
      {V::colleague},
      {V::superior_of, V::subordinate_of},
      {V::teacher_of, V::student_of},
      {V::classmate},
      {V::colleague, V::superior_of, V::subordinate_of},
  }};
  return table[static_cast<std::size_t>(k)];
}

bool conflict_compatible(ConflictKind k, const std::set<RelationView>& relation) {
  const auto& views = compatible_views(k);
  return std::any_of(views.begin(), views.end(), [&](RelationView v) { return relation.count(v) > 0; });
}

Conflict canonical(Conflict c) {
  if (c.b < c.a) std::swap(c.a, c.b);
  return c;
}

int grade_embodied(const Preference& p, const SeatDigest& seat, const SpatialConfig& cfg) {
  if (p.category() != Category::embodied)
    throw std::invalid_argument("grade_embodied: not an embodied preference");
  auto nearest = [&](FeatureKind k) {
    const auto& d = seat.nearest[static_cast<std::size_t>(k)];
    if (!d)
      throw ValidationError("scene has no " + std::string(to_string(k)) + " for preference at seat " + seat.seat_id);
    return *d;
  };
  switch (p.kind) {
    case PreferenceKind::near_window:
    case PreferenceKind::near_air_conditioner:
    case PreferenceKind::near_kitchen:
    case PreferenceKind::near_exit: return nearest(*feature_of(p.kind)) <= cfg.near_threshold ? 1 : 0;
    case PreferenceKind::away_from_window:
    case PreferenceKind::away_from_air_conditioner:
    case PreferenceKind::away_from_kitchen: return nearest(*feature_of(p.kind)) >= cfg.away_threshold ? 1 : 0;
    case PreferenceKind::tv_in_view:
      nearest(FeatureKind::television);
      return seat.tv_visible ? 1 : 0;
    case PreferenceKind::tableware_chopsticks: return seat.tableware == Tableware::chopsticks ? 1 : 0;
    case PreferenceKind::tableware_cutlery: return seat.tableware == Tableware::cutlery ? 1 : 0;
    case PreferenceKind::dominant_hand_clearance: {
      const Hand h = p.hand.value_or(Hand::right);
      return (h == Hand::left ? seat.left_blocked : seat.right_blocked) ? 0 : 1;
    }
    default: break;
  }
  return 0;
}

int check_embodied(const Preference& p, const Seat& seat, const SceneInstance& scene, const SpatialConfig& cfg) {
  if (p.category() != Category::embodied)
    throw std::invalid_argument("check_embodied: not an embodied preference");
  if (auto fk = feature_of(p.kind)) {
    if (p.kind == PreferenceKind::tv_in_view) {
      nearest_feature(seat, scene, FeatureKind::television);
      for (const auto* tv : scene.features_of(FeatureKind::television))
        if (in_field_of_view(scene, seat, *tv, cfg.tv_fov)) return 1;
      return 0;
    }
    const double d = nearest_feature(seat, scene, *fk).second;
    const bool near = p.kind == PreferenceKind::near_window || p.kind == PreferenceKind::near_air_conditioner ||
                      p.kind == PreferenceKind::near_kitchen || p.kind == PreferenceKind::near_exit;
    return near ? (d <= cfg.near_threshold ? 1 : 0) : (d >= cfg.away_threshold ? 1 : 0);
  }
  if (p.kind == PreferenceKind::tableware_chopsticks) return seat.tableware == Tableware::chopsticks ? 1 : 0;
  if (p.kind == PreferenceKind::tableware_cutlery) return seat.tableware == Tableware::cutlery ? 1 : 0;
  std::vector<Vec2> npos;
  for (auto j : neighbor_seats(seat, scene)) npos.push_back(scene.seats[j].position);
  const auto room = elbow_room(seat.position, seat.facing, npos, cfg.elbow_distance);
  const Hand h = p.hand.value_or(Hand::right);
  return (h == Hand::left ? room.left_blocked : room.right_blocked) ? 0 : 1;
}

bool social_match(const Preference& p, const Resident& owner, const Resident& other, const World& w) {
  switch (subcategory_of(p.kind)) {
    case Subcategory::relation: {
      const auto rel = w.relation_between(owner.id, other.id);
      const auto& views = relation_views_of(p.kind);
      return std::any_of(views.begin(), views.end(), [&](RelationView v) { return rel.count(v) > 0; });
    }
    case Subcategory::group:
      switch (p.kind) {
        case PreferenceKind::adjacent_to_peer_age_band: return std::abs(owner.age - other.age) <= kPeerAgeBand;
        case PreferenceKind::adjacent_to_same_gender: return owner.gender == other.gender;
        case PreferenceKind::adjacent_to_same_job_sector: return owner.job_sector() == other.job_sector();
        case PreferenceKind::adjacent_to_same_income_level: return owner.income_level == other.income_level;
        case PreferenceKind::adjacent_to_highly_educated: return other.education_level == 3;
        default: return false;
      }
    case Subcategory::topic: {
      const std::string tag(topic_of(p.kind));
      return owner.interests.count(tag) > 0 && other.interests.count(tag) > 0;
    }
    default: return false;
  }
}

int check_social(const Preference& p, const Assignment& asg, const Adjacency& adj, const World& w) {
  if (p.category() != Category::social) throw std::invalid_argument("check_social: not a social preference");
  auto own = asg.find(p.owner);
  if (own == asg.end()) throw AssignmentError("resident " + p.owner + " has no seat");
  const auto occ = occupants(asg);
  const Resident& owner = w.resident(p.owner);
  auto nb = adj.find(own->second);
  if (nb == adj.end()) return 0;
  for (const auto& s : nb->second) {
    auto it = occ.find(s);
    if (it != occ.end() && social_match(p, owner, w.resident(it->second), w)) return 1;
  }
  return 0;
}

int check_conflict(const Conflict& c, const Assignment& asg, const Adjacency& adj) {
  auto a = asg.find(c.a), b = asg.find(c.b);
  if (a == asg.end()) throw AssignmentError("resident " + c.a + " has no seat");
  if (b == asg.end()) throw AssignmentError("resident " + c.b + " has no seat");
  auto nb = adj.find(a->second);
  return nb != adj.end() && nb->second.count(b->second) ? 0 : 1;
}

Judgement judge_embodied(const Preference& p, const Seat& seat, const SceneInstance& scene, const SpatialConfig& cfg) {
  Judgement j;
  j.grade = check_embodied(p, seat, scene, cfg);
  const auto fk = feature_of(p.kind);
  if (p.kind == PreferenceKind::tv_in_view) {
    const auto tvs = scene.features_of(FeatureKind::television);
    if (j.grade) {
      for (const auto* tv : tvs)
        if (in_field_of_view(scene, seat, *tv, cfg.tv_fov)) {
          j.reason = tv->id + " is in view from seat " + seat.id;
          break;
        }
    } else {
      j.reason = tvs.front()->id + " is not in view from seat " + seat.id + ": " +
                 field_of_view_obstacle(scene, seat, *tvs.front(), cfg.tv_fov);
    }
  } else if (fk) {
    const auto [f, d] = nearest_feature(seat, scene, *fk);
    const bool near = p.kind == PreferenceKind::near_window || p.kind == PreferenceKind::near_air_conditioner ||
                      p.kind == PreferenceKind::near_kitchen || p.kind == PreferenceKind::near_exit;
    j.reason = "nearest " + std::string(to_string(*fk)) + " " + f->id + " is " + meters(d) + " from seat " + seat.id;
    if (!j.grade)
      j.reason += near ? "; near means at most " + meters(cfg.near_threshold)
                       : "; away means at least " + meters(cfg.away_threshold);
  } else if (p.kind == PreferenceKind::tableware_chopsticks || p.kind == PreferenceKind::tableware_cutlery) {
    j.reason = "seat " + seat.id + " is laid with " + std::string(to_string(seat.tableware));
  } else {
    const Hand h = p.hand.value_or(Hand::right);
    const Vec2 f = from_angle(seat.facing);
    std::string blocker;
    for (auto k : neighbor_seats(seat, scene)) {
      const Seat& o = scene.seats[k];
      const Vec2 d = o.position - seat.position;
      if (d.norm() > cfg.elbow_distance) continue;
      const double side = cross(f, d);
      if ((h == Hand::left && side > 0) || (h == Hand::right && side < 0)) {
        blocker = o.id + " at " + meters(d.norm());
        break;
      }
    }
    j.reason = blocker.empty() ? std::string(to_string(h)) + "-hand side of seat " + seat.id + " is clear"
                               : std::string(to_string(h)) + "-hand side of seat " + seat.id + " is blocked by seat " +
                                     blocker;
  }
  return j;
}

Judgement judge_social(const Preference& p, const Assignment& asg, const Adjacency& adj, const World& w,
                       const SceneInstance& scene) {
  (void)scene;
  Judgement j;
  j.grade = check_social(p, asg, adj, w);
  const auto occ = occupants(asg);
  const std::string& seat = asg.at(p.owner);
  const Resident& owner = w.resident(p.owner);
  std::vector<std::string> listed;
  auto nb = adj.find(seat);
  if (nb != adj.end())
    for (const auto& s : nb->second) {
      auto it = occ.find(s);
      if (it == occ.end()) continue;
      const Resident& other = w.resident(it->second);
      if (j.grade && social_match(p, owner, other, w)) {
        j.reason = other.name + " (seat " + s + ") satisfies " + std::string(to_string(p.kind));
        return j;
      }
      listed.push_back(other.name + " (seat " + s + ")");
    }
  if (listed.empty()) {
    j.reason = "seat " + seat + " has no neighbours";
  } else {
    std::string names;
    for (std::size_t i = 0; i < listed.size(); ++i) names += (i ? " and " : "") + listed[i];
    j.reason = "no neighbour satisfies " + std::string(to_string(p.kind)) + "; neighbours are " + names;
  }
  return j;
}

Judgement judge_conflict(const Conflict& c, const Assignment& asg, const Adjacency& adj, const World& w,
                         const SceneInstance& scene) {
  Judgement j;
  j.grade = check_conflict(c, asg, adj);
  const std::string& sa = asg.at(c.a);
  const std::string& sb = asg.at(c.b);
  const std::string na = name_of(w, c.a), nb = name_of(w, c.b);
  if (j.grade) {
    j.reason = na + " (seat " + sa + ") and " + nb + " (seat " + sb + ") are not adjacent";
  } else {
    const auto idx = scene.seat_index(sa);
    const std::string table = idx ? scene.seats[*idx].table_id : "?";
    j.reason = na + " and " + nb + " sit side by side at table " + table + " (seats " + sa + " and " + sb + ")";
  }
  return j;
}

nlohmann::json preference_to_json(const Preference& p) {
  nlohmann::json j = {{"owner", p.owner}, {"kind", to_string(p.kind)}, {"strength", p.strength}};
  if (p.hand) j["hand"] = to_string(*p.hand);
  return j;
}

Preference preference_from_json(const nlohmann::json& j) {
  try {
    Preference p;
    p.owner = j.at("owner").get<std::string>();
    p.kind = preference_kind_from_string(j.at("kind").get<std::string>());
    p.strength = j.at("strength").get<int>();
    if (j.contains("hand")) p.hand = hand_from_string(j.at("hand").get<std::string>());
    if (p.strength < 1 || p.strength > 3) throw ValidationError("preference strength must be 1, 2 or 3");
    if (p.kind == PreferenceKind::dominant_hand_clearance && !p.hand)
      throw ValidationError("dominant_hand_clearance needs a hand");
    return p;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("preference: ") + e.what());
  }
}

nlohmann::json conflict_to_json(const Conflict& c) {
  return {{"a", c.a}, {"b", c.b}, {"kind", to_string(c.kind)}, {"strength", c.strength}};
}

Conflict conflict_from_json(const nlohmann::json& j) {
  try {
    Conflict c;
    c.a = j.at("a").get<std::string>();
    c.b = j.at("b").get<std::string>();
    c.kind = conflict_kind_from_string(j.at("kind").get<std::string>());
    c.strength = j.at("strength").get<int>();
    if (c.strength < 1 || c.strength > 3) throw ValidationError("conflict strength must be 1, 2 or 3");
    if (c.a == c.b) throw ValidationError("conflict parties must differ");
    return c;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("conflict: ") + e.what());
  }
}

nlohmann::json assignment_to_json(const Assignment& a) {
  nlohmann::json j = nlohmann::json::object();
  for (const auto& [r, s] : a) j[r] = s;
  return j;
}

Assignment assignment_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ParseError("assignment must be an object mapping resident ids to seat ids");
  Assignment a;
  for (const auto& [r, s] : j.items()) {
    if (!s.is_string()) throw ParseError("seat for resident " + r + " must be a string");
    a[r] = s.get<std::string>();
  }
  return a;
}

}  // namespace seatplan
