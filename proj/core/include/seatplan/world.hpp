#pragma once

// The persistent town: residents, families and the typed relationship graph.

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "seatplan/rng.hpp"

namespace seatplan {

using ResidentId = std::string;
using FamilyId = std::string;

enum class Gender { female, male };
enum class Hand { left, right };

/// Stored relationship kinds. Symmetric kinds are stored once; directed kinds
/// point from the senior/superior party (a) to the other (b).
enum class RelationKind {
  spouse,
  parent_of,
  sibling,
  grandparent_of,
  in_law,
  neighbor,
  friend_of,
  colleague,
  superior_of,
  teacher_of,
  classmate,
};

inline constexpr std::size_t kRelationKindCount = 11;

/// A relationship as seen from one endpoint. Directed kinds gain an inverse.
enum class RelationView {
  spouse,
  parent_of,
  child_of,
  sibling,
  grandparent_of,
  grandchild_of,
  in_law,
  neighbor,
  friend_of,
  colleague,
  superior_of,
  subordinate_of,
  teacher_of,
  student_of,
  classmate,
};

bool is_symmetric(RelationKind kind);
std::string_view to_string(RelationKind kind);
std::string_view to_string(RelationView view);
std::string_view to_string(Gender g);
std::string_view to_string(Hand h);
RelationKind relation_kind_from_string(std::string_view s);
Gender gender_from_string(std::string_view s);
Hand hand_from_string(std::string_view s);

struct Resident {
  ResidentId id;
  std::string name;
  int age = 0;
  Gender gender = Gender::female;
  std::string job;
  std::string workplace;
  std::string residence;
  int income_level = 1;
  int education_level = 1;
  std::set<std::string> interests;
  Hand dominant_hand = Hand::right;
  FamilyId family_id;
  std::string avatar_tag;

  /// Job sector used by the same-sector group predicate.
  const std::string& job_sector() const { return workplace; }

  bool operator==(const Resident&) const = default;
};

struct Relationship {
  ResidentId a;
  ResidentId b;
  RelationKind kind = RelationKind::friend_of;

  bool operator==(const Relationship&) const = default;
};

/// Immutable after construction; safe to share across threads.
class World {
 public:
  World() = default;
  World(std::vector<Resident> residents, std::vector<Relationship> relationships,
        std::map<FamilyId, std::vector<ResidentId>> families);

  const std::vector<Resident>& residents() const { return residents_; }
  const std::vector<Relationship>& relationships() const { return relationships_; }
  const std::map<FamilyId, std::vector<ResidentId>>& families() const { return families_; }

  /// Throws UnknownIdError.
  const Resident& resident(std::string_view id) const;
  const Resident* find(std::string_view id) const;
  std::optional<std::size_t> index_of(std::string_view id) const;

  /// All kinds linking a and b, viewed from a. Empty means strangers.
  /// Throws UnknownIdError for ids not in the world.
  std::set<RelationView> relation_between(std::string_view a, std::string_view b) const;
  bool strangers(std::string_view a, std::string_view b) const {
    return relation_between(a, b).empty();
  }

  /// Residents with at least one tie to `id`.
  std::vector<ResidentId> ties_of(std::string_view id) const;

  /// The sub-world induced by `members`: their records, the relationships among
  /// them, and families restricted to them.
  World restricted_to(const std::vector<ResidentId>& members) const;

 private:
  static std::string pair_key(std::string_view a, std::string_view b);

  std::vector<Resident> residents_;
  std::vector<Relationship> relationships_;
  std::map<FamilyId, std::vector<ResidentId>> families_;
  std::unordered_map<std::string, std::size_t> index_;
  std::unordered_map<std::string, std::vector<RelationView>> views_;
  std::unordered_map<std::string, std::vector<ResidentId>> ties_;
};

struct Violation {
  std::string rule;
  std::vector<std::string> ids;
  std::string message;
};

struct ValidationReport {
  std::vector<Violation> violations;
  bool ok() const { return violations.empty(); }
};

/// Lists every structural invariant violation. Never throws.
ValidationReport validate_world(const World& w);

/// Longest parent_of chain (in generations) within each family. Cycles yield 0.
std::map<FamilyId, int> family_generation_depths(const World& w);

World world_from_json(const nlohmann::json& j);
nlohmann::json world_to_json(const World& w);
nlohmann::json resident_to_json(const Resident& r);
Resident resident_from_json(const nlohmann::json& j);

/// Parses and validates. Throws ParseError or ValidationError (first violation).
World load_world(const std::filesystem::path& path);

struct PartyBias {
  bool enabled = true;
  /// Probability that each new member is drawn from residents tied to the
  /// party so far rather than uniformly.
  double tie_preference = 0.8;
  /// When enabled, at least n - max_untied members must have an in-party tie.
  std::size_t max_untied = 2;
};

/// n distinct residents; a pure function of (world, n, bias, rng state).
/// Throws std::invalid_argument when n is out of range.
std::vector<ResidentId> sample_party(const World& w, std::size_t n, Rng& rng,
                                     const PartyBias& bias = {});

/// Members of `party` with at least one tie to another member.
std::size_t count_tied_members(const World& w, const std::vector<ResidentId>& party);

}  // namespace seatplan
