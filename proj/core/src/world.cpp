#include "seatplan/world.hpp"

#include <algorithm>
#include <array>
#include <fstream>
#include <functional>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "seatplan/error.hpp"

namespace seatplan {

namespace {

constexpr std::array<std::string_view, kRelationKindCount> kRelationNames = {
    "spouse", "parent_of", "sibling",     "grandparent_of", "in_law",   "neighbor",
    "friend", "colleague", "superior_of", "teacher_of",     "classmate"};

constexpr std::array<std::string_view, 15> kViewNames = {
    "spouse",    "parent_of",   "child_of",       "sibling",    "grandparent_of",
    "grandchild_of", "in_law",  "neighbor",       "friend",     "colleague",
    "superior_of",   "subordinate_of", "teacher_of", "student_of", "classmate"};

RelationView forward_view(RelationKind k) {
  switch (k) {
    case RelationKind::spouse: return RelationView::spouse;
    case RelationKind::parent_of: return RelationView::parent_of;
    case RelationKind::sibling: return RelationView::sibling;
    case RelationKind::grandparent_of: return RelationView::grandparent_of;
    case RelationKind::in_law: return RelationView::in_law;
    case RelationKind::neighbor: return RelationView::neighbor;
    case RelationKind::friend_of: return RelationView::friend_of;
    case RelationKind::colleague: return RelationView::colleague;
    case RelationKind::superior_of: return RelationView::superior_of;
    case RelationKind::teacher_of: return RelationView::teacher_of;
    case RelationKind::classmate: return RelationView::classmate;
  }
  throw std::logic_error("unreachable relation kind");
}

RelationView backward_view(RelationKind k) {
  switch (k) {
    case RelationKind::parent_of: return RelationView::child_of;
    case RelationKind::grandparent_of: return RelationView::grandchild_of;
    case RelationKind::superior_of: return RelationView::subordinate_of;
    case RelationKind::teacher_of: return RelationView::student_of;
    default: return forward_view(k);
  }
}

}  // namespace

bool is_symmetric(RelationKind kind) {
  switch (kind) {
    case RelationKind::parent_of:
    case RelationKind::grandparent_of:
    case RelationKind::superior_of:
    case RelationKind::teacher_of:
      return false;
    default:
      return true;
  }
}

std::string_view to_string(RelationKind kind) { return kRelationNames[static_cast<std::size_t>(kind)]; }
std::string_view to_string(RelationView view) { return kViewNames[static_cast<std::size_t>(view)]; }
std::string_view to_string(Gender g) { return g == Gender::female ? "female" : "male"; }
std::string_view to_string(Hand h) { return h == Hand::left ? "left" : "right"; }

RelationKind relation_kind_from_string(std::string_view s) {
  for (std::size_t i = 0; i < kRelationNames.size(); ++i)
    if (kRelationNames[i] == s) return static_cast<RelationKind>(i);
  throw ParseError("unknown relationship kind '" + std::string(s) + "'");
}

Gender gender_from_string(std::string_view s) {
  if (s == "female") return Gender::female;
  if (s == "male") return Gender::male;
  throw ParseError("unknown gender '" + std::string(s) + "'");
}

Hand hand_from_string(std::string_view s) {
  if (s == "left") return Hand::left;
  if (s == "right") return Hand::right;
  throw ParseError("unknown hand '" + std::string(s) + "'");
}

// ---------------------------------------------------------------------------
// World

World::World(std::vector<Resident> residents, std::vector<Relationship> relationships,
             std::map<FamilyId, std::vector<ResidentId>> families)
    : residents_(std::move(residents)),
      relationships_(std::move(relationships)),
      families_(std::move(families)) {
  for (std::size_t i = 0; i < residents_.size(); ++i) index_.emplace(residents_[i].id, i);
  for (const auto& r : relationships_) {
    if (r.a == r.b) continue;
    views_[pair_key(r.a, r.b)].push_back(forward_view(r.kind));
    views_[pair_key(r.b, r.a)].push_back(backward_view(r.kind));
    auto& ta = ties_[r.a];
    if (std::find(ta.begin(), ta.end(), r.b) == ta.end()) ta.push_back(r.b);
    auto& tb = ties_[r.b];
    if (std::find(tb.begin(), tb.end(), r.a) == tb.end()) tb.push_back(r.a);
  }
}

std::string World::pair_key(std::string_view a, std::string_view b) {
  std::string k;
  k.reserve(a.size() + b.size() + 1);
  k.append(a);
  k.push_back('\x1f');
  k.append(b);
  return k;
}

const Resident& World::resident(std::string_view id) const {
  if (const auto* r = find(id)) return *r;
  throw UnknownIdError("unknown resident id '" + std::string(id) + "'");
}

const Resident* World::find(std::string_view id) const {
  auto it = index_.find(std::string(id));
  return it == index_.end() ? nullptr : &residents_[it->second];
}

std::optional<std::size_t> World::index_of(std::string_view id) const {
  auto it = index_.find(std::string(id));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::set<RelationView> World::relation_between(std::string_view a, std::string_view b) const {
  if (!find(a)) throw UnknownIdError("unknown resident id '" + std::string(a) + "'");
  if (!find(b)) throw UnknownIdError("unknown resident id '" + std::string(b) + "'");
  std::set<RelationView> out;
  auto it = views_.find(pair_key(a, b));
  if (it != views_.end()) out.insert(it->second.begin(), it->second.end());
  return out;
}

std::vector<ResidentId> World::ties_of(std::string_view id) const {
  auto it = ties_.find(std::string(id));
  if (it == ties_.end()) return {};
  return it->second;
}

World World::restricted_to(const std::vector<ResidentId>& members) const {
  std::set<ResidentId> keep(members.begin(), members.end());
  std::vector<Resident> rs;
  for (const auto& id : members) rs.push_back(resident(id));
  std::vector<Relationship> rels;
  for (const auto& r : relationships_)
    if (keep.count(r.a) && keep.count(r.b)) rels.push_back(r);
  std::map<FamilyId, std::vector<ResidentId>> fams;
  for (const auto& [fid, ids] : families_)
    for (const auto& id : ids)
      if (keep.count(id)) fams[fid].push_back(id);
  return World(std::move(rs), std::move(rels), std::move(fams));
}

// ---------------------------------------------------------------------------
// Validation

std::map<FamilyId, int> family_generation_depths(const World& w) {
  std::map<ResidentId, std::vector<ResidentId>> children;
  for (const auto& r : w.relationships())
    if (r.kind == RelationKind::parent_of) children[r.a].push_back(r.b);

  // Longest downward chain from each resident; 0 marks a cycle.
  std::map<ResidentId, int> memo;
  std::set<ResidentId> on_stack;
  bool cyclic = false;
  std::function<int(const ResidentId&)> depth = [&](const ResidentId& id) -> int {
    if (auto it = memo.find(id); it != memo.end()) return it->second;
    if (on_stack.count(id)) {
      cyclic = true;
      return 0;
    }
    on_stack.insert(id);
    int best = 1;
    if (auto it = children.find(id); it != children.end())
      for (const auto& c : it->second) best = std::max(best, 1 + depth(c));
    on_stack.erase(id);
    memo[id] = best;
    return best;
  };

  std::map<FamilyId, int> out;
  for (const auto& [fid, ids] : w.families()) {
    int d = 0;
    for (const auto& id : ids) d = std::max(d, depth(id));
    out[fid] = cyclic ? 0 : d;
  }
  return out;
}

ValidationReport validate_world(const World& w) {
  ValidationReport rep;
  auto add = [&](std::string rule, std::vector<std::string> ids, std::string msg) {
    rep.violations.push_back({std::move(rule), std::move(ids), std::move(msg)});
  };

  std::map<ResidentId, int> seen;
  for (const auto& r : w.residents()) ++seen[r.id];
  for (const auto& [id, n] : seen)
    if (n > 1) add("duplicate_resident", {id}, "resident id '" + id + "' appears " + std::to_string(n) + " times");

  std::map<ResidentId, int> family_memberships;
  for (const auto& [fid, ids] : w.families())
    for (const auto& id : ids) {
      ++family_memberships[id];
      if (!seen.count(id)) add("dangling_family_member", {fid, id}, "family '" + fid + "' lists unknown resident '" + id + "'");
    }

  for (const auto& r : w.residents()) {
    if (r.interests.empty()) add("empty_interests", {r.id}, "resident '" + r.id + "' has no interests");
    if (r.age < 0) add("negative_age", {r.id}, "resident '" + r.id + "' has negative age");
    if (r.income_level < 1 || r.income_level > 3)
      add("income_range", {r.id}, "resident '" + r.id + "' income_level outside 1-3");
    if (r.education_level < 1 || r.education_level > 3)
      add("education_range", {r.id}, "resident '" + r.id + "' education_level outside 1-3");
    auto fam = w.families().find(r.family_id);
    if (fam == w.families().end()) {
      add("unknown_family", {r.id, r.family_id},
          "resident '" + r.id + "' references unknown family '" + r.family_id + "'");
    } else if (std::find(fam->second.begin(), fam->second.end(), r.id) == fam->second.end()) {
      add("family_membership", {r.id, r.family_id},
          "resident '" + r.id + "' is not listed in family '" + r.family_id + "'");
    }
    if (family_memberships[r.id] > 1)
      add("family_membership", {r.id}, "resident '" + r.id + "' is listed in several families");
  }

  std::map<ResidentId, std::set<ResidentId>> parents_of;
  for (const auto& rel : w.relationships()) {
    const auto* a = w.find(rel.a);
    const auto* b = w.find(rel.b);
    if (!a || !b) {
      add("dangling_relationship", {rel.a, rel.b},
          "relationship " + std::string(to_string(rel.kind)) + " references an unknown resident");
      continue;
    }
    if (rel.a == rel.b) {
      add("self_relationship", {rel.a}, "resident '" + rel.a + "' is related to themselves");
      continue;
    }
    if (rel.kind == RelationKind::parent_of) {
      parents_of[rel.b].insert(rel.a);
      if (a->age <= b->age)
        add("generation", {rel.a, rel.b},
            "parent '" + rel.a + "' (" + std::to_string(a->age) + ") is not older than child '" + rel.b +
                "' (" + std::to_string(b->age) + ")");
    }
  }

  for (const auto& rel : w.relationships()) {
    if (rel.kind != RelationKind::grandparent_of || !w.find(rel.a) || !w.find(rel.b)) continue;
    bool chain = false;
    for (const auto& mid : parents_of[rel.b])
      if (parents_of[mid].count(rel.a)) chain = true;
    if (!chain)
      add("generation", {rel.a, rel.b},
          "grandparent_of '" + rel.a + "' -> '" + rel.b + "' has no parent_of chain through a common child");
  }

  // Kinship must be acyclic along parent_of.
  {
    std::map<ResidentId, std::vector<ResidentId>> children;
    for (const auto& rel : w.relationships())
      if (rel.kind == RelationKind::parent_of) children[rel.a].push_back(rel.b);
    std::map<ResidentId, int> color;  // 0 white, 1 grey, 2 black
    std::vector<ResidentId> path;
    std::set<std::set<ResidentId>> reported;
    std::function<void(const ResidentId&)> visit = [&](const ResidentId& id) {
      color[id] = 1;
      path.push_back(id);
      for (const auto& c : children[id]) {
        if (color[c] == 1) {
          auto from = std::find(path.begin(), path.end(), c);
          std::vector<ResidentId> cycle(from, path.end());
          std::set<ResidentId> key(cycle.begin(), cycle.end());
          if (reported.insert(key).second) {
            std::string msg = "parent_of cycle:";
            for (const auto& x : cycle) msg += " " + x;
            add("kinship_cycle", cycle, msg);
          }
        } else if (color[c] == 0) {
          visit(c);
        }
      }
      path.pop_back();
      color[id] = 2;
    };
    for (const auto& [id, _] : children)
      if (color[id] == 0) visit(id);
  }

  for (const auto& [fid, depth] : family_generation_depths(w))
    if (depth > 4)
      add("family_depth", {fid}, "family '" + fid + "' spans " + std::to_string(depth) + " generations (max 4)");

  return rep;
}

// ---------------------------------------------------------------------------
// Serialization

nlohmann::json resident_to_json(const Resident& r) {
  return nlohmann::json{
      {"id", r.id},
      {"name", r.name},
      {"age", r.age},
      {"gender", to_string(r.gender)},
      {"job", r.job},
      {"workplace", r.workplace},
      {"residence", r.residence},
      {"income_level", r.income_level},
      {"education_level", r.education_level},
      {"interests", r.interests},
      {"dominant_hand", to_string(r.dominant_hand)},
      {"family_id", r.family_id},
      {"avatar_tag", r.avatar_tag},
  };
}

Resident resident_from_json(const nlohmann::json& j) {
  Resident r;
  r.id = j.at("id").get<std::string>();
  r.name = j.at("name").get<std::string>();
  r.age = j.at("age").get<int>();
  r.gender = gender_from_string(j.at("gender").get<std::string>());
  r.job = j.at("job").get<std::string>();
  r.workplace = j.at("workplace").get<std::string>();
  r.residence = j.at("residence").get<std::string>();
  r.income_level = j.at("income_level").get<int>();
  r.education_level = j.at("education_level").get<int>();
  for (const auto& t : j.at("interests")) r.interests.insert(t.get<std::string>());
  r.dominant_hand = hand_from_string(j.at("dominant_hand").get<std::string>());
  r.family_id = j.at("family_id").get<std::string>();
  r.avatar_tag = j.value("avatar_tag", std::string{});
  return r;
}

World world_from_json(const nlohmann::json& j) {
  try {
    const int version = j.at("schema_version").get<int>();
    if (version != 1) throw ParseError("unsupported world schema_version " + std::to_string(version));
    std::vector<Resident> residents;
    for (const auto& r : j.at("residents")) residents.push_back(resident_from_json(r));
    std::vector<Relationship> rels;
    for (const auto& r : j.at("relationships"))
      rels.push_back({r.at("a").get<std::string>(), r.at("b").get<std::string>(),
                      relation_kind_from_string(r.at("kind").get<std::string>())});
    std::map<FamilyId, std::vector<ResidentId>> families;
    for (const auto& [fid, ids] : j.at("families").items())
      families[fid] = ids.get<std::vector<ResidentId>>();
    return World(std::move(residents), std::move(rels), std::move(families));
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("world file: ") + e.what());
  }
}

nlohmann::json world_to_json(const World& w) {
  nlohmann::json residents = nlohmann::json::array();
  for (const auto& r : w.residents()) residents.push_back(resident_to_json(r));
  nlohmann::json rels = nlohmann::json::array();
  for (const auto& r : w.relationships()) rels.push_back({{"a", r.a}, {"b", r.b}, {"kind", to_string(r.kind)}});
  nlohmann::json fams = nlohmann::json::object();
  for (const auto& [fid, ids] : w.families()) fams[fid] = ids;
  return {{"schema_version", 1}, {"residents", residents}, {"relationships", rels}, {"families", fams}};
}

World load_world(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open world file " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError("world file " + path.string() + ": " + e.what());
  }
  World w = world_from_json(j);
  auto rep = validate_world(w);
  if (!rep.ok()) throw ValidationError("world file " + path.string() + ": " + rep.violations.front().message);
  return w;
}

// ---------------------------------------------------------------------------
// Party sampling

std::size_t count_tied_members(const World& w, const std::vector<ResidentId>& party) {
  std::set<ResidentId> members(party.begin(), party.end());
  std::size_t n = 0;
  for (const auto& id : party) {
    for (const auto& t : w.ties_of(id))
      if (members.count(t)) {
        ++n;
        break;
      }
  }
  return n;
}

std::vector<ResidentId> sample_party(const World& w, std::size_t n, Rng& rng, const PartyBias& bias) {
  const auto& all = w.residents();
  if (n < 1 || n > all.size())
    throw std::invalid_argument("party size " + std::to_string(n) + " outside 1.." + std::to_string(all.size()));

  auto draw = [&]() {
    std::vector<ResidentId> party;
    std::set<ResidentId> in_party;
    auto take = [&](const ResidentId& id) {
      party.push_back(id);
      in_party.insert(id);
    };
    take(all[rng.below(all.size())].id);
    while (party.size() < n) {
      if (bias.enabled && rng.chance(bias.tie_preference)) {
        // Residents tied to the party so far, in deterministic order.
        std::vector<ResidentId> frontier;
        std::set<ResidentId> dedup;
        for (const auto& m : party)
          for (const auto& t : w.ties_of(m))
            if (!in_party.count(t) && dedup.insert(t).second) frontier.push_back(t);
        if (!frontier.empty()) {
          take(frontier[rng.below(frontier.size())]);
          continue;
        }
      }
      std::vector<ResidentId> rest;
      for (const auto& r : all)
        if (!in_party.count(r.id)) rest.push_back(r.id);
      take(rest[rng.below(rest.size())]);
    }
    return party;
  };

  if (!bias.enabled) return draw();

  const std::size_t need = n > bias.max_untied ? n - bias.max_untied : 0;
  std::vector<ResidentId> best;
  std::size_t best_tied = 0;
  for (int attempt = 0; attempt < 100; ++attempt) {
    auto party = draw();
    const std::size_t tied = count_tied_members(w, party);
    if (tied >= need) return party;
    if (best.empty() || tied > best_tied) {
      best = party;
      best_tied = tied;
    }
  }
  return best;
}

}  // namespace seatplan
