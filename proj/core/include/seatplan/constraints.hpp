#pragma once

// Preference and conflict taxonomy, plus the predicates that grade them.

#include <array>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "seatplan/config.hpp"
#include "seatplan/scene.hpp"
#include "seatplan/world.hpp"

namespace seatplan {

enum class Category { embodied, social, conflict };

/// Reporting subcategories; social splits three ways.
enum class Subcategory { embodied, relation, group, topic, conflict };

enum class PreferenceKind {
  // embodied
  near_window,
  away_from_window,
  tv_in_view,
  near_air_conditioner,
  away_from_air_conditioner,
  near_kitchen,
  away_from_kitchen,
  near_exit,
  tableware_chopsticks,
  tableware_cutlery,
  dominant_hand_clearance,
  // social: relation
  adjacent_to_spouse,
  adjacent_to_parent_child,
  adjacent_to_sibling,
  adjacent_to_grandparent_grandchild,
  adjacent_to_in_law,
  adjacent_to_friend,
  adjacent_to_neighbor,
  adjacent_to_colleague_or_superior,
  adjacent_to_classmate_or_teacher,
  // social: group
  adjacent_to_peer_age_band,
  adjacent_to_same_gender,
  adjacent_to_same_job_sector,
  adjacent_to_same_income_level,
  adjacent_to_highly_educated,
  // social: topic
  shared_interest_research,
  shared_interest_sports,
  shared_interest_music,
  shared_interest_cooking,
};

enum class ConflictKind {
  spousal_quarrel,
  parent_child_dispute,
  sibling_rivalry,
  in_law_friction,
  grandparent_generation_dispute,
  friend_falling_out,
  neighbor_property_dispute,
  colleague_rivalry,
  superior_subordinate_grievance,
  teacher_student_tension,
  classmate_rivalry,
  workplace_income_dispute,
};

inline constexpr std::size_t kEmbodiedKindCount = 11;
inline constexpr std::size_t kSocialKindCount = 18;
inline constexpr std::size_t kPreferenceKindCount = kEmbodiedKindCount + kSocialKindCount;
inline constexpr std::size_t kConflictKindCount = 12;
inline constexpr std::size_t kConstraintKindCount = kPreferenceKindCount + kConflictKindCount;

/// The four topic tags of the world's interest vocabulary.
inline constexpr std::array<std::string_view, 4> kTopics = {"research", "sports", "music", "cooking"};

/// Age difference (years) still counted as a peer.
inline constexpr int kPeerAgeBand = 8;

Category category_of(PreferenceKind k);
Subcategory subcategory_of(PreferenceKind k);
std::string_view to_string(Category c);
std::string_view to_string(Subcategory c);
std::string_view to_string(PreferenceKind k);
std::string_view to_string(ConflictKind k);
Category category_from_string(std::string_view s);
Subcategory subcategory_from_string(std::string_view s);
PreferenceKind preference_kind_from_string(std::string_view s);
ConflictKind conflict_kind_from_string(std::string_view s);

/// Feature kind a near/away preference refers to; nullopt for other kinds.
std::optional<FeatureKind> feature_of(PreferenceKind k);
/// Topic tag of a shared-interest kind; empty for other kinds.
std::string_view topic_of(PreferenceKind k);
/// Relation views that satisfy an adjacent_to_<relation> kind.
const std::vector<RelationView>& relation_views_of(PreferenceKind k);
/// Relation views a conflict kind may be attached to.
const std::vector<RelationView>& compatible_views(ConflictKind k);
bool conflict_compatible(ConflictKind k, const std::set<RelationView>& relation);

struct Preference {
  ResidentId owner;
  PreferenceKind kind = PreferenceKind::near_window;
  int strength = 1;
  /// Only dominant_hand_clearance carries a parameter: the owner's hand.
  std::optional<Hand> hand;

  Category category() const { return category_of(kind); }
  int weight() const { return strength; }
  bool operator==(const Preference&) const = default;
};

struct Conflict {
  ResidentId a;
  ResidentId b;
  ConflictKind kind = ConflictKind::friend_falling_out;
  int strength = 1;

  int weight() const { return strength; }
  bool operator==(const Conflict&) const = default;
};

/// Orders the pair so that a < b.
Conflict canonical(Conflict c);

using Constraint = std::variant<Preference, Conflict>;

/// Resident id to seat id.
using Assignment = std::map<ResidentId, std::string>;

/// Grades from a precomputed seat digest. Throws ValidationError when the
/// referenced feature kind never appears in the digest.
int grade_embodied(const Preference& p, const SeatDigest& seat, const SpatialConfig& cfg);

/// Grades straight from scene geometry; agrees with grade_embodied over
/// export_ground_truth_features.
int check_embodied(const Preference& p, const Seat& seat, const SceneInstance& scene, const SpatialConfig& cfg = {});

/// Whether `other` satisfies the owner's social preference when adjacent.
bool social_match(const Preference& p, const Resident& owner, const Resident& other, const World& w);

/// 1 iff some neighbour of the owner satisfies the social predicate.
int check_social(const Preference& p, const Assignment& asg, const Adjacency& adj, const World& w);

/// 1 (avoided) iff the two parties are not adjacent.
int check_conflict(const Conflict& c, const Assignment& asg, const Adjacency& adj);

/// Grade plus a sentence explaining it.
struct Judgement {
  int grade = 0;
  std::string reason;
};

Judgement judge_embodied(const Preference& p, const Seat& seat, const SceneInstance& scene, const SpatialConfig& cfg);
Judgement judge_social(const Preference& p, const Assignment& asg, const Adjacency& adj, const World& w,
                       const SceneInstance& scene);
Judgement judge_conflict(const Conflict& c, const Assignment& asg, const Adjacency& adj, const World& w,
                         const SceneInstance& scene);

nlohmann::json preference_to_json(const Preference& p);
Preference preference_from_json(const nlohmann::json& j);
nlohmann::json conflict_to_json(const Conflict& c);
Conflict conflict_from_json(const nlohmann::json& j);
nlohmann::json assignment_to_json(const Assignment& a);
Assignment assignment_from_json(const nlohmann::json& j);

}  // namespace seatplan
