#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>
#include <set>

#include <nlohmann/json.hpp>

#include "fixtures.hpp"
#include "seatplan/error.hpp"
#include "seatplan/model.hpp"
#include "seatplan/solvers.hpp"

using namespace seatplan;
using seatplan::test::generated;

namespace {

// Best score over every bijection, scored by the evaluator.
double exhaustive_best(const ScenarioInstance& inst) {
  std::vector<std::string> seats;
  for (const auto& s : inst.scene.seats) seats.push_back(s.id);
  std::sort(seats.begin(), seats.end());
  double best = 0.0;
  do {
    Assignment a;
    for (std::size_t i = 0; i < inst.party.size(); ++i) a[inst.party[i]] = seats[i];
    best = std::max(best, score_instance(inst, a).scaled_score);
  } while (std::next_permutation(seats.begin(), seats.end()));
  return best;
}

bool is_bijection(const ScenarioInstance& inst, const Assignment& a) {
  try {
    validate_assignment(inst, a);
    return true;
  } catch (const AssignmentError&) {
    return false;
  }
}

// Level 1 instance whose only conflict joins the first related pair.
ScenarioInstance forced_conflict_instance() {
  auto g = generated(1);
  auto inst = g.instance;
  for (const auto& a : inst.party)
    for (const auto& b : inst.party)
      if (a < b && !inst.cast.strangers(a, b)) {
        for (auto k : {ConflictKind::friend_falling_out, ConflictKind::spousal_quarrel, ConflictKind::parent_child_dispute,
                       ConflictKind::sibling_rivalry, ConflictKind::neighbor_property_dispute,
                       ConflictKind::colleague_rivalry, ConflictKind::in_law_friction,
                       ConflictKind::classmate_rivalry, ConflictKind::grandparent_generation_dispute,
                       ConflictKind::superior_subordinate_grievance, ConflictKind::teacher_student_tension,
                       ConflictKind::workplace_income_dispute})
          if (conflict_compatible(k, inst.cast.relation_between(a, b))) {
            inst.conflicts = {Conflict{a, b, k, 3}};
            return inst;
          }
      }
  return inst;
}

// Placements of the first `depth` NPCs; the rest unplaced.
void for_each_prefix(std::size_t npcs, std::size_t seats, std::size_t depth,
                     const std::function<void(const Placement&)>& f) {
  Placement p(npcs, -1);
  std::vector<bool> used(seats, false);
  std::function<void(std::size_t)> rec = [&](std::size_t i) {
    if (i == depth) return f(p);
    for (std::size_t s = 0; s < seats; ++s) {
      if (used[s]) continue;
      used[s] = true;
      p[i] = static_cast<int>(s);
      rec(i + 1);
      used[s] = false;
    }
    p[i] = -1;
  };
  rec(0);
}

double best_completion(const SeatingModel& m, Placement p) {
  std::vector<int> free_seats;
  std::vector<bool> used(m.seat_count(), false);
  std::vector<int> open;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] >= 0) used[p[i]] = true;
    else open.push_back(static_cast<int>(i));
  }
  for (std::size_t s = 0; s < m.seat_count(); ++s)
    if (!used[s]) free_seats.push_back(static_cast<int>(s));
  double best = 0.0;
  do {
    for (std::size_t k = 0; k < open.size(); ++k) p[open[k]] = free_seats[k];
    best = std::max(best, m.score(p));
  } while (std::next_permutation(free_seats.begin(), free_seats.end()));
  return best;
}

// Proposes a fixed script of assignments.
class ScriptedAgent : public Proposer {
 public:
  explicit ScriptedAgent(std::vector<Assignment> script) : script_(std::move(script)) {}
  Assignment propose(const ProposalContext&) override {
    Assignment a = script_[std::min(next_, script_.size() - 1)];
    ++next_;
    return a;
  }
  std::size_t calls() const { return next_; }

 private:
  std::vector<Assignment> script_;
  std::size_t next_ = 0;
};

Assignment shuffled_truth(const Generated& g, std::uint64_t seed) {
  std::vector<std::string> seats;
  for (const auto& [who, s] : g.truth.assignment) seats.push_back(s);
  Rng rng(seed);
  rng.shuffle(seats);
  Assignment a;
  for (std::size_t i = 0; i < g.instance.party.size(); ++i) a[g.instance.party[i]] = seats[i];
  return a;
}

}  // namespace

TEST(Model, AgreesWithEvaluatorBitForBit) {
  for (int level : {5, 20, 35, 50, 65}) {
    auto g = generated(level);
    auto m = SeatingModel::ground_truth(g.instance);
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      auto a = shuffled_truth(g, seed);
      EXPECT_EQ(m.score(m.from_assignment(a)), score_instance(g.instance, a).scaled_score);
      EXPECT_EQ(m.grades(m.from_assignment(a)), grade_constraints(g.instance, a));
    }
    EXPECT_EQ(m.to_assignment(m.from_assignment(g.truth.assignment)), g.truth.assignment);
  }
}

TEST(Exact, FourSeatsMatchesAllTwentyFourBijections) {
  for (int level = 1; level <= 14; ++level) {
    auto inst = generated(level, 1).instance;
    auto r = solve_exact(SeatingModel::ground_truth(inst), 2'000'000);
    EXPECT_DOUBLE_EQ(r.score, exhaustive_best(inst));
    EXPECT_TRUE(r.trace.optimal);
    EXPECT_TRUE(is_bijection(inst, r.assignment));
  }
}

TEST(Exact, UpToSixSeatsEqualsExhaustiveScan) {
  for (int level = 15; level <= 42; level += 3) {
    auto inst = generated(level, 2).instance;
    auto r = solve_exact(SeatingModel::ground_truth(inst), 100'000'000);
    EXPECT_DOUBLE_EQ(r.score, exhaustive_best(inst)) << inst.id;
    EXPECT_DOUBLE_EQ(score_instance(inst, r.assignment).scaled_score, r.score);
  }
}

TEST(Exact, GeneratedInstancesReachNinetyNinePointThree) {
  for (int level = 1; level <= 42; level += 4) {
    auto r = solve_exact(SeatingModel::ground_truth(generated(level).instance), 2'000'000);
    EXPECT_NEAR(r.score, 99.3, 0.05);
    EXPECT_EQ(r.trace.termination, Termination::optimal);
  }
}

TEST(Exact, ForcedConflictOnTemplateA) {
  auto inst = forced_conflict_instance();
  ASSERT_EQ(inst.conflicts.size(), 1u);
  auto r = solve_exact(SeatingModel::ground_truth(inst), 2'000'000);
  EXPECT_DOUBLE_EQ(r.score, exhaustive_best(inst));
  auto rep = score_instance(inst, r.assignment);
  EXPECT_EQ(rep.scaled_score, r.score);
}

TEST(Exact, BoundIsAdmissible) {
  for (int level : {3, 18, 33}) {
    auto m = SeatingModel::ground_truth(generated(level, 4).instance);
    for (std::size_t depth = 0; depth <= 2; ++depth)
      for_each_prefix(m.npc_count(), m.seat_count(), depth, [&](const Placement& p) {
        EXPECT_GE(m.bound(p) + 1e-9, best_completion(m, p));
      });
  }
}

TEST(Exact, TinyBudgetThrowsWithoutIncumbent) {
  auto m = SeatingModel::ground_truth(generated(70).instance);
  EXPECT_THROW(solve_exact(m, 3), BudgetExhaustedError);
}

TEST(Exact, OverBudgetReturnsNonOptimalIncumbent) {
  auto inst = generated(70).instance;
  auto m = SeatingModel::ground_truth(inst);
  auto r = solve_exact(m, 200);
  EXPECT_TRUE(is_bijection(inst, r.assignment));
  if (r.score < m.max_score()) {
    EXPECT_FALSE(r.trace.optimal);
    EXPECT_EQ(r.trace.termination, Termination::budget);
  }
}

TEST(Greedy, LoneTelevisionFanGetsAView) {
  auto g = generated(1);
  auto inst = g.instance;
  Preference p = inst.preferences[0];
  p.kind = PreferenceKind::tv_in_view;
  p.strength = 3;
  p.hand.reset();
  inst.preferences = {p};
  auto m = SeatingModel::ground_truth(inst);
  Rng rng(1);
  auto a = solve_greedy(m, rng);
  const auto* tv = inst.scene.features_of(FeatureKind::television).front();
  bool any_visible = false;
  for (const auto& s : inst.scene.seats) any_visible |= in_field_of_view(inst.scene, s, *tv, SpatialConfig{}.tv_fov);
  ASSERT_TRUE(any_visible);
  EXPECT_TRUE(in_field_of_view(inst.scene, inst.scene.seat(a.at(p.owner)), *tv, SpatialConfig{}.tv_fov));
}

TEST(Greedy, DeterministicAndValid) {
  for (int level : {10, 40, 70}) {
    auto inst = generated(level).instance;
    auto m = SeatingModel::ground_truth(inst);
    for (bool aware : {true, false}) {
      Rng a(5), b(5);
      auto x = solve_greedy(m, a, aware);
      EXPECT_EQ(x, solve_greedy(m, b, aware));
      EXPECT_TRUE(is_bijection(inst, x));
    }
  }
}

TEST(Anneal, DeterministicUnderSeed) {
  auto m = SeatingModel::ground_truth(generated(60).instance);
  Rng a(3), b(3);
  auto x = solve_local_search(m, {}, a), y = solve_local_search(m, {}, b);
  EXPECT_EQ(x.assignment, y.assignment);
  EXPECT_EQ(x.trace.moves, y.trace.moves);
}

TEST(Anneal, ZeroTemperatureIsHillClimbing) {
  auto inst = generated(64).instance;
  auto m = SeatingModel::ground_truth(inst);
  AnnealConfig cold;
  cold.initial_temperature = 0.0;
  Rng rng(2);
  auto r = solve_local_search(m, cold, rng);
  for (std::size_t i = 1; i < r.trace.steps.size(); ++i) EXPECT_GE(r.trace.steps[i].score, r.trace.steps[i - 1].score);
  Rng g(2);
  EXPECT_GE(r.score, m.score(m.from_assignment(solve_greedy(m, g))));
  EXPECT_TRUE(is_bijection(inst, r.assignment));
}

TEST(Anneal, HonoursMoveBudgetAndBestIsMonotone) {
  auto m = SeatingModel::ground_truth(generated(69).instance);
  AnnealConfig cfg;
  cfg.move_budget = 300;
  Rng rng(4);
  auto r = solve_local_search(m, cfg, rng);
  EXPECT_LE(r.trace.moves, 300);
  for (std::size_t i = 1; i < r.trace.steps.size(); ++i) EXPECT_GE(r.trace.steps[i].best, r.trace.steps[i - 1].best);
}

TEST(Anneal, ReachesOptimumOnSmallInstances) {
  int hits = 0, total = 0;
  for (int level = 1; level <= 42; ++level) {
    auto m = SeatingModel::ground_truth(generated(level).instance);
    Rng rng(static_cast<std::uint64_t>(level));
    auto r = solve_local_search(m, {}, rng);
    hits += r.score == solve_exact(m, 2'000'000).score;
    ++total;
  }
  EXPECT_GE(hits * 10, total * 9);
}

TEST(Anneal, DoublingBudgetNeverLowersMeanBest) {
  for (int level : {56, 63, 70}) {
    auto m = SeatingModel::ground_truth(generated(level).instance);
    double small = 0, large = 0;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      AnnealConfig a, b;
      a.move_budget = 500;
      b.move_budget = 1000;
      Rng ra(seed), rb(seed);
      small += solve_local_search(m, a, ra).score;
      large += solve_local_search(m, b, rb).score;
    }
    EXPECT_GE(large, small - 1e-9);
  }
}

TEST(Reflect, PerfectStartConvergesInOneIteration) {
  auto g = generated(50);
  ScriptedAgent agent({g.truth.assignment});
  Assignment final;
  auto t = reflect_loop(agent, evaluator_judge(g.instance), 10, &final);
  EXPECT_EQ(t.termination, Termination::converged);
  EXPECT_EQ(t.iterations, 1);
  EXPECT_EQ(t.steps.size(), 1u);
  EXPECT_EQ(final, g.truth.assignment);
}

TEST(Reflect, ZeroItersKeepsOnlyTheFirstProposal) {
  auto g = generated(50);
  RepairAgent agent(SeatingModel::ground_truth(g.instance));
  auto t = reflect_loop(agent, evaluator_judge(g.instance), 0);
  EXPECT_EQ(t.steps.size(), 1u);
  EXPECT_EQ(t.iterations, 0);
}

TEST(Reflect, RepairTraceIsNonDecreasing) {
  for (int level = 5; level <= 70; level += 5) {
    auto g = generated(level);
    RepairAgent agent(SeatingModel::ground_truth(g.instance));
    auto t = reflect_loop(agent, evaluator_judge(g.instance), 10);
    EXPECT_LE(t.steps.size(), 11u);
    for (std::size_t i = 1; i < t.steps.size(); ++i) {
      EXPECT_GE(t.steps[i].best, t.steps[i - 1].best);
      EXPECT_GE(t.steps[i].score, t.steps[i - 1].score);
    }
  }
}

TEST(Reflect, MaxItersBoundsProposals) {
  auto g = generated(70);
  std::vector<Assignment> script;
  for (std::uint64_t s = 0; s < 10; ++s) script.push_back(shuffled_truth(g, s + 100));
  ScriptedAgent agent(script);
  auto t = reflect_loop(agent, evaluator_judge(g.instance), 3);
  EXPECT_EQ(agent.calls(), 4u);
  EXPECT_EQ(t.steps.size(), 4u);
  EXPECT_EQ(t.termination, Termination::iteration_limit);
}

TEST(Reflect, InvalidTwiceAborts) {
  auto g = generated(30);
  Assignment broken = g.truth.assignment;
  broken.erase(broken.begin());
  ScriptedAgent agent({broken});
  auto t = reflect_loop(agent, evaluator_judge(g.instance), 5);
  EXPECT_EQ(t.termination, Termination::aborted);
  EXPECT_EQ(t.invalid_proposals, 2);
  EXPECT_EQ(agent.calls(), 2u);
}

TEST(Reflect, InvalidOnceIsRetried) {
  auto g = generated(30);
  Assignment broken = g.truth.assignment;
  broken.erase(broken.begin());
  ScriptedAgent agent({broken, g.truth.assignment});
  auto t = reflect_loop(agent, evaluator_judge(g.instance), 5);
  EXPECT_EQ(t.invalid_proposals, 1);
  EXPECT_EQ(t.termination, Termination::converged);
}

TEST(Trace, JsonRoundTrip) {
  auto m = SeatingModel::ground_truth(generated(44).instance);
  Rng rng(1);
  auto t = solve_local_search(m, {}, rng).trace;
  auto back = trace_from_json(trace_to_json(t));
  EXPECT_EQ(trace_to_json(back).dump(), trace_to_json(t).dump());
  EXPECT_EQ(back.termination, t.termination);
  EXPECT_EQ(back.steps.size(), t.steps.size());
}

TEST(Trace, DigestIsStableAndDistinguishes) {
  Assignment a{{"r1", "s1"}, {"r2", "s2"}}, b{{"r1", "s2"}, {"r2", "s1"}};
  EXPECT_EQ(assignment_digest(a), assignment_digest(a));
  EXPECT_NE(assignment_digest(a), assignment_digest(b));
  EXPECT_EQ(assignment_digest(a).size(), 16u);
}
