#pragma once

// Precomputed view of an instance that solvers search over. Grades are
// aggregated through the evaluator's ScoringLayout, so a model built from the
// ground-truth digest scores every assignment exactly as score_instance does.

#include <string>
#include <vector>

#include "seatplan/scene.hpp"
#include "seatplan/scoring.hpp"

namespace seatplan {

enum class PerceptionMode { observed, gt_perception };

std::string_view to_string(PerceptionMode m);
PerceptionMode perception_mode_from_string(std::string_view s);

/// placement[npc] = seat index, or -1 while unplaced.
using Placement = std::vector<int>;

class SeatingModel {
 public:
  /// Seats come from the digest, NPCs from inst.party. inst.scene is not read,
  /// so an agent can pass an instance rebuilt from what it learned.
  SeatingModel(const ScenarioInstance& inst, const EnvDigest& digest, const SpatialConfig& cfg = {},
               CategoryMode mode = CategoryMode::coarse);

  /// Model over the instance's own ground-truth geometry.
  static SeatingModel ground_truth(const ScenarioInstance& inst, const SpatialConfig& cfg = {},
                                   CategoryMode mode = CategoryMode::coarse);

  std::size_t npc_count() const { return npcs_.size(); }
  std::size_t seat_count() const { return seats_.size(); }
  std::size_t constraint_count() const { return layout_.weight_of.size(); }
  const std::vector<ResidentId>& npcs() const { return npcs_; }
  const std::vector<std::string>& seats() const { return seats_; }
  const std::vector<int>& neighbors(int seat) const { return neighbors_[seat]; }
  const ScoringLayout& layout() const { return layout_; }
  const std::string& instance_id() const { return instance_id_; }

  /// Grades in instance constraint order for a complete placement.
  std::vector<int> grades(const Placement& p) const;
  double score(const Placement& p) const;
  /// Score with every constraint satisfied.
  double max_score() const { return max_score_; }

  /// Optimistic score of a partial placement: every constraint not yet
  /// decided counts as satisfied.
  double bound(const Placement& p) const;

  /// Total constraint weight touching each NPC.
  int npc_weight(int npc) const { return npc_weight_[npc]; }

  /// Weight gained by seating `npc` at `seat` given the NPCs already placed.
  /// With unit = true every constraint counts 1.
  int placement_gain(const Placement& p, const std::vector<int>& occupant, int npc, int seat, bool unit) const;

  /// Constraint indices (instance order) that involve `npc`.
  const std::vector<int>& constraints_of(int npc) const { return touching_[npc]; }
  int constraint_index(const std::string& ref) const;

  Assignment to_assignment(const Placement& p) const;
  /// Throws AssignmentError if the assignment is not a bijection onto the
  /// model's seats.
  Placement from_assignment(const Assignment& a) const;

 private:
  enum class Kind { embodied, social, conflict };
  struct Item {
    Kind kind;
    int a = -1;  // owner or first party
    int b = -1;  // second conflict party
    std::vector<char> ok;  // embodied: per seat; social: per NPC
  };

  int decided_grade(const Item& it, const Placement& p, const std::vector<int>& occupant, bool optimistic) const;

  std::string instance_id_;
  std::vector<ResidentId> npcs_;
  std::vector<std::string> seats_;
  std::vector<std::vector<int>> neighbors_;
  std::vector<Item> items_;
  std::vector<std::string> refs_;
  std::vector<std::vector<int>> touching_;
  std::vector<int> npc_weight_;
  ScoringLayout layout_;
  double max_score_ = 0.0;
};

}  // namespace seatplan
