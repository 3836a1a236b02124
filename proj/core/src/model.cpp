#include "seatplan/model.hpp"

#include <algorithm>
#include <map>

#include "seatplan/error.hpp"

namespace seatplan {

std::string_view to_string(PerceptionMode m) { return m == PerceptionMode::observed ? "observed" : "gt_perception"; }

PerceptionMode perception_mode_from_string(std::string_view s) {
  if (s == "observed") return PerceptionMode::observed;
  if (s == "gt_perception" || s == "gt") return PerceptionMode::gt_perception;
  throw ParseError("unknown perception mode '" + std::string(s) + "'");
}

SeatingModel::SeatingModel(const ScenarioInstance& inst, const EnvDigest& digest, const SpatialConfig& cfg,
                           CategoryMode mode)
    : instance_id_(inst.id), npcs_(inst.party), layout_(ScoringLayout::build(inst, mode)) {
  std::map<std::string, int> seat_index, npc_index;
  for (const auto& s : digest.seats) {
    seat_index[s.seat_id] = static_cast<int>(seats_.size());
    seats_.push_back(s.seat_id);
  }
  for (std::size_t i = 0; i < npcs_.size(); ++i) npc_index[npcs_[i]] = static_cast<int>(i);
  neighbors_.resize(seats_.size());
  for (std::size_t s = 0; s < digest.seats.size(); ++s)
    for (const auto& n : digest.seats[s].neighbors) {
      auto it = seat_index.find(n);
      if (it != seat_index.end()) neighbors_[s].push_back(it->second);
    }
  touching_.resize(npcs_.size());
  npc_weight_.assign(npcs_.size(), 0);
  auto npc = [&](const ResidentId& id) {
    auto it = npc_index.find(id);
    if (it == npc_index.end()) throw UnknownIdError("constraint references " + id + ", who is not in the party");
    return it->second;
  };

  for (std::size_t i = 0; i < inst.preferences.size(); ++i) {
    const auto& p = inst.preferences[i];
    Item it;
    it.a = npc(p.owner);
    if (p.category() == Category::embodied) {
      it.kind = Kind::embodied;
      for (const auto& sd : digest.seats) {
        int g = 0;
        try {
          g = grade_embodied(p, sd, cfg);
        } catch (const ValidationError&) {
          g = 0;  // feature kind never observed
        }
        it.ok.push_back(static_cast<char>(g));
      }
    } else {
      it.kind = Kind::social;
      const Resident& owner = inst.cast.resident(p.owner);
      for (const auto& other : npcs_)
        it.ok.push_back(other != p.owner && social_match(p, owner, inst.cast.resident(other), inst.cast));
    }
    touching_[it.a].push_back(static_cast<int>(items_.size()));
    npc_weight_[it.a] += p.weight();
    refs_.push_back(ScenarioInstance::preference_ref(i));
    items_.push_back(std::move(it));
  }
  for (std::size_t i = 0; i < inst.conflicts.size(); ++i) {
    const auto& c = inst.conflicts[i];
    Item it;
    it.kind = Kind::conflict;
    it.a = npc(c.a);
    it.b = npc(c.b);
    touching_[it.a].push_back(static_cast<int>(items_.size()));
    touching_[it.b].push_back(static_cast<int>(items_.size()));
    npc_weight_[it.a] += c.weight();
    npc_weight_[it.b] += c.weight();
    refs_.push_back(ScenarioInstance::conflict_ref(i));
    items_.push_back(std::move(it));
  }
  max_score_ = layout_.scaled(std::vector<int>(items_.size(), 1));
}

SeatingModel SeatingModel::ground_truth(const ScenarioInstance& inst, const SpatialConfig& cfg, CategoryMode mode) {
  return SeatingModel(inst, export_ground_truth_features(inst.scene, cfg), cfg, mode);
}

int SeatingModel::decided_grade(const Item& it, const Placement& p, const std::vector<int>& occupant,
                                bool optimistic) const {
  switch (it.kind) {
    case Kind::embodied:
      if (p[it.a] < 0) return 1;
      return it.ok[p[it.a]];
    case Kind::social: {
      if (p[it.a] < 0) return 1;
      bool open = false;
      for (int s : neighbors_[p[it.a]]) {
        const int o = occupant[s];
        if (o < 0) {
          open = true;
        } else if (it.ok[o]) {
          return 1;
        }
      }
      return optimistic && open ? 1 : 0;
    }
    case Kind::conflict: {
      if (p[it.a] < 0 || p[it.b] < 0) return 1;
      const auto& nb = neighbors_[p[it.a]];
      return std::find(nb.begin(), nb.end(), p[it.b]) == nb.end() ? 1 : 0;
    }
  }
  return 0;
}

std::vector<int> SeatingModel::grades(const Placement& p) const {
  std::vector<int> occupant(seats_.size(), -1);
  for (std::size_t i = 0; i < p.size(); ++i)
    if (p[i] >= 0) occupant[p[i]] = static_cast<int>(i);
  std::vector<int> g;
  g.reserve(items_.size());
  for (const auto& it : items_) g.push_back(decided_grade(it, p, occupant, false));
  return g;
}

double SeatingModel::score(const Placement& p) const { return layout_.scaled(grades(p)); }

double SeatingModel::bound(const Placement& p) const {
  std::vector<int> occupant(seats_.size(), -1);
  for (std::size_t i = 0; i < p.size(); ++i)
    if (p[i] >= 0) occupant[p[i]] = static_cast<int>(i);
  std::vector<int> g;
  g.reserve(items_.size());
  for (const auto& it : items_) g.push_back(decided_grade(it, p, occupant, true));
  return layout_.scaled(g);
}

int SeatingModel::placement_gain(const Placement& p, const std::vector<int>& occupant, int npc, int seat,
                                 bool unit) const {
  int gain = 0;
  auto w = [&](std::size_t item) { return unit ? 1 : layout_.weight_of[item]; };
  for (int k : touching_[npc]) {
    const Item& it = items_[k];
    if (it.kind == Kind::embodied) {
      if (it.ok[seat]) gain += w(k);
    } else if (it.kind == Kind::social) {
      for (int s : neighbors_[seat])
        if (occupant[s] >= 0 && it.ok[occupant[s]]) {
          gain += w(k);
          break;
        }
    } else {
      const int other = it.a == npc ? it.b : it.a;
      if (p[other] >= 0) {
        const auto& nb = neighbors_[seat];
        if (std::find(nb.begin(), nb.end(), p[other]) != nb.end()) gain -= w(k);
      }
    }
  }
  // Social preferences of already seated neighbours that this NPC would fulfil.
  for (int s : neighbors_[seat]) {
    const int q = occupant[s];
    if (q < 0) continue;
    for (int k : touching_[q]) {
      const Item& it = items_[k];
      if (it.kind != Kind::social || it.a != q || !it.ok[npc]) continue;
      bool already = false;
      for (int t : neighbors_[p[q]])
        if (occupant[t] >= 0 && it.ok[occupant[t]]) already = true;
      if (!already) gain += w(k);
    }
  }
  return gain;
}

int SeatingModel::constraint_index(const std::string& ref) const {
  auto it = std::find(refs_.begin(), refs_.end(), ref);
  return it == refs_.end() ? -1 : static_cast<int>(it - refs_.begin());
}

Assignment SeatingModel::to_assignment(const Placement& p) const {
  Assignment a;
  for (std::size_t i = 0; i < p.size(); ++i)
    if (p[i] >= 0) a[npcs_[i]] = seats_[p[i]];
  return a;
}

Placement SeatingModel::from_assignment(const Assignment& a) const {
  Placement p(npcs_.size(), -1);
  std::vector<char> used(seats_.size(), 0);
  for (std::size_t i = 0; i < npcs_.size(); ++i) {
    auto it = a.find(npcs_[i]);
    if (it == a.end()) throw AssignmentError("resident " + npcs_[i] + " is not assigned a seat");
    auto s = std::find(seats_.begin(), seats_.end(), it->second);
    if (s == seats_.end()) throw AssignmentError("resident " + npcs_[i] + " is assigned unknown seat " + it->second);
    const int idx = static_cast<int>(s - seats_.begin());
    if (used[idx]) throw AssignmentError("seat " + it->second + " is assigned twice");
    used[idx] = 1;
    p[i] = idx;
  }
  if (a.size() != npcs_.size()) throw AssignmentError("assignment names residents outside the party");
  return p;
}

}  // namespace seatplan
