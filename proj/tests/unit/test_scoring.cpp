#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include <nlohmann/json.hpp>

#include "fixtures.hpp"
#include "seatplan/error.hpp"
#include "seatplan/scoring.hpp"

using namespace seatplan;
using seatplan::test::generated;

namespace {

// Exact rational evaluation of the remap polynomial with coefficients in
// thousandths: F(p/q) = sum c_k p^k q^(5-k) / (1000 q^5).
double remap_rational(long p, long q) {
  const long c[6] = {0, -45, 2568, -12650, 21990, -10870};
  long num = 0, pk = 1, qk = q * q * q * q * q;
  for (int k = 0; k <= 5; ++k) {
    num += c[k] * pk * qk;
    pk *= p;
    qk /= q;
  }
  return static_cast<double>(num) / (1000.0 * q * q * q * q * q);
}

ScoreReport fake_report(std::vector<std::pair<int, int>> weight_grade) {
  ScoreReport r;
  int i = 0;
  for (auto [w, g] : weight_grade) r.per_constraint.push_back({"P" + std::to_string(++i), "near_window", "embodied", w, g});
  return r;
}

// Swap two seats' occupants.
void swap_seats(Assignment& a, const ResidentId& x, const ResidentId& y) { std::swap(a.at(x), a.at(y)); }

}  // namespace

TEST(Remap, PublishedValues) {
  EXPECT_EQ(remap(0.0), 0.0);
  EXPECT_FALSE(std::signbit(remap(0.0)));
  EXPECT_NEAR(remap(1.0), 0.993, 1e-12);
  EXPECT_NEAR(remap(0.5), 0.0729375, 1e-12);
  EXPECT_NEAR(remap(0.8), 0.576, 5e-4);
  EXPECT_LT(remap_raw(0.015), 0.0);
  EXPECT_EQ(remap(0.015), 0.0);
}

TEST(Remap, ThreeQuartersByExactArithmetic) {
  EXPECT_DOUBLE_EQ(remap_rational(3, 4), 0.452302734375);
  EXPECT_NEAR(remap(0.75), 0.452302734375, 1e-12);
}

TEST(Remap, MatchesRationalOracleOnLattice) {
  for (long q = 1; q <= 40; ++q)
    for (long p = 0; p <= q; ++p)
      EXPECT_NEAR(remap_raw(static_cast<double>(p) / q), remap_rational(p, q), 1e-12) << p << "/" << q;
}

TEST(Remap, ClampedIntoUnitInterval) {
  for (int i = 0; i <= 1000; ++i) {
    double v = remap(i / 1000.0);
    EXPECT_GE(v, 0.0);
    EXPECT_LE(v, 1.0);
  }
  EXPECT_THROW(remap(-0.01), std::domain_error);
  EXPECT_THROW(remap(1.01), std::domain_error);
}

TEST(Layout, WeightedFractionThreeToOne) {
  ScoringLayout l;
  l.category_names = {"embodied"};
  l.category_of = {0, 0};
  l.weight_of = {3, 1};
  l.category_weight = {4};
  std::vector<double> x;
  EXPECT_NEAR(l.scaled({1, 0}, x), 100 * remap_rational(3, 4), 1e-9);
  EXPECT_DOUBLE_EQ(x[0], 0.75);
}

TEST(Score, ThreeToOneOnARealInstance) {
  auto g = generated(1);
  auto& inst = g.instance;
  // Keep two embodied preferences: one met at the GT seat, one rebuilt to fail there.
  Preference met = inst.preferences[0];
  met.kind = PreferenceKind::tableware_chopsticks;
  const Seat& seat = inst.scene.seat(g.truth.assignment.at(met.owner));
  if (seat.tableware == Tableware::cutlery) met.kind = PreferenceKind::tableware_cutlery;
  met.strength = 3;
  Preference unmet = met;
  unmet.kind = met.kind == PreferenceKind::tableware_cutlery ? PreferenceKind::tableware_chopsticks
                                                             : PreferenceKind::tableware_cutlery;
  unmet.strength = 1;
  inst.preferences = {met, unmet};
  inst.conflicts.clear();
  auto r = score_instance(inst, g.truth.assignment);
  ASSERT_EQ(r.per_category.size(), 1u);
  EXPECT_EQ(r.per_category[0].category, "embodied");
  EXPECT_DOUBLE_EQ(r.per_category[0].x, 0.75);
  EXPECT_EQ(r.per_category[0].weight, 4);
  EXPECT_NEAR(r.scaled_score, 100 * remap_rational(3, 4), 1e-9);
  EXPECT_FALSE(r.fully_satisfied);
}

TEST(Score, GroundTruthIsNinetyNinePointThree) {
  for (int level : {1, 14, 15, 30, 42, 56, 70}) {
    auto g = generated(level);
    auto r = score_instance(g.instance, g.truth.assignment);
    EXPECT_NEAR(r.scaled_score, 99.3, 0.05);
    EXPECT_TRUE(r.fully_satisfied);
    for (const auto& c : r.per_category) EXPECT_EQ(c.x, 1.0);
    int w = 0;
    for (const auto& c : r.per_constraint) w += c.weight;
    int cw = 0;
    for (const auto& c : r.per_category) cw += c.weight;
    EXPECT_EQ(w, cw);
  }
}

TEST(Score, EverythingViolatedIsZero) {
  auto g = generated(1);
  auto& inst = g.instance;
  for (auto& p : inst.preferences) {
    const Seat& seat = inst.scene.seat(g.truth.assignment.at(p.owner));
    p.kind = seat.tableware == Tableware::cutlery ? PreferenceKind::tableware_chopsticks : PreferenceKind::tableware_cutlery;
  }
  EXPECT_EQ(score_instance(inst, g.truth.assignment).scaled_score, 0.0);
}

TEST(Score, FineModeSplitsSocial) {
  auto g = generated(70);
  auto coarse = score_instance(g.instance, g.truth.assignment, CategoryMode::coarse);
  auto fine = score_instance(g.instance, g.truth.assignment, CategoryMode::fine);
  std::set<std::string> names;
  for (const auto& c : fine.per_category) names.insert(c.category);
  EXPECT_FALSE(names.count("social"));
  for (const auto& c : coarse.per_category) EXPECT_NE(c.category, "relation");
}

TEST(Score, BadAssignmentsThrow) {
  auto g = generated(20);
  auto asg = g.truth.assignment;
  asg.erase(asg.begin());
  EXPECT_THROW(score_instance(g.instance, asg), AssignmentError);
  asg = g.truth.assignment;
  auto it = asg.begin();
  const auto first_seat = it->second;
  (++it)->second = first_seat;
  EXPECT_THROW(score_instance(g.instance, asg), AssignmentError);
  asg = g.truth.assignment;
  asg.begin()->second = "no-such-seat";
  EXPECT_THROW(score_instance(g.instance, asg), AssignmentError);
}

TEST(Score, RelabelingConstraintsKeepsScore) {
  auto g = generated(55);
  auto asg = g.truth.assignment;
  swap_seats(asg, g.instance.party[0], g.instance.party[1]);
  swap_seats(asg, g.instance.party[2], g.instance.party[5]);
  const double before = score_instance(g.instance, asg).scaled_score;
  auto inst = g.instance;
  std::reverse(inst.preferences.begin(), inst.preferences.end());
  std::reverse(inst.conflicts.begin(), inst.conflicts.end());
  EXPECT_DOUBLE_EQ(score_instance(inst, asg).scaled_score, before);
}

TEST(Score, FlippingAGradeUpNeverLowersScore) {
  for (int level : {10, 30, 50, 70}) {
    for (auto mode : {CategoryMode::coarse, CategoryMode::fine}) {
      auto l = ScoringLayout::build(generated(level).instance, mode);
      const std::size_t n = l.weight_of.size();
      Rng rng(static_cast<std::uint64_t>(level));
      for (int trial = 0; trial < 500; ++trial) {
        std::vector<int> g(n);
        for (auto& x : g) x = rng.chance(0.5);
        const double base = l.scaled(g);
        for (std::size_t i = 0; i < n; ++i) {
          if (g[i]) continue;
          g[i] = 1;
          EXPECT_GE(l.scaled(g), base - 1e-12);
          g[i] = 0;
        }
      }
    }
  }
}

TEST(Gap, CountArithmetic) {
  EXPECT_DOUBLE_EQ(prioritization_gap({fake_report({{3, 1}, {1, 1}, {2, 0}})}), 0.0);
  EXPECT_DOUBLE_EQ(prioritization_gap({fake_report({{3, 1}, {3, 1}, {1, 0}})}), 100.0);
  EXPECT_DOUBLE_EQ(prioritization_gap({fake_report({{3, 1}, {3, 1}, {1, 1}}), fake_report({{3, 1}, {3, 0}, {1, 0}})}),
                   25.0);
}

TEST(Gap, UndefinedWithoutBothWeights) {
  EXPECT_THROW(prioritization_gap({fake_report({{3, 1}, {2, 1}})}), UndefinedMetricError);
  EXPECT_THROW(prioritization_gap({fake_report({{1, 1}})}), UndefinedMetricError);
  EXPECT_THROW(prioritization_gap({}), UndefinedMetricError);
}

TEST(Reflect, GroundTruthHasNothingUnmet) {
  auto g = generated(45);
  auto r = reflect(g.instance, g.truth.assignment);
  EXPECT_TRUE(r.unmet.empty());
  EXPECT_EQ(r.annotations.size(), g.instance.constraint_count());
  for (const auto& a : r.annotations) {
    EXPECT_TRUE(a.satisfied);
    EXPECT_FALSE(a.reason.empty());
  }
}

TEST(Reflect, UnmetSortedByWeightThenRef) {
  auto g = generated(70);
  auto asg = g.truth.assignment;
  for (std::size_t i = 0; i + 1 < g.instance.party.size(); i += 2) swap_seats(asg, g.instance.party[i], g.instance.party[i + 1]);
  auto r = reflect(g.instance, asg);
  ASSERT_FALSE(r.unmet.empty());
  std::map<std::string, int> weight;
  for (const auto& a : r.annotations) {
    weight[a.ref] = a.weight;
    if (!a.satisfied) {
      EXPECT_TRUE(std::count(r.unmet.begin(), r.unmet.end(), a.ref));
    }
  }
  for (std::size_t i = 1; i < r.unmet.size(); ++i) {
    const auto &p = r.unmet[i - 1], &q = r.unmet[i];
    EXPECT_TRUE(weight[p] > weight[q] || (weight[p] == weight[q] && p < q)) << p << " " << q;
  }
}

TEST(Reflect, TelevisionReasonNamesTheTelevisionAndCause) {
  auto g = generated(1);
  auto& inst = g.instance;
  Preference p = inst.preferences[0];
  p.kind = PreferenceKind::tv_in_view;
  p.hand.reset();
  inst.preferences = {p};
  inst.conflicts.clear();
  const auto* tv = inst.scene.features_of(FeatureKind::television).front();
  for (const auto& seat : inst.scene.seats) {
    auto asg = g.truth.assignment;
    for (auto& [who, s] : asg)
      if (s == seat.id) s = asg.at(p.owner);
    asg[p.owner] = seat.id;
    auto r = reflect(inst, asg);
    const auto& a = r.annotations[0];
    if (a.satisfied) continue;
    EXPECT_NE(a.reason.find(tv->id), std::string::npos) << a.reason;
    EXPECT_TRUE(a.reason.find("wall") != std::string::npos || a.reason.find("bearing") != std::string::npos) << a.reason;
  }
}

TEST(Reflect, ViolatedConflictNamesBothPartiesAndTable) {
  auto g = generated(40);
  auto& inst = g.instance;
  ASSERT_FALSE(inst.conflicts.empty());
  const Conflict c = inst.conflicts[0];
  auto adj = seat_adjacency(inst.scene);
  auto asg = g.truth.assignment;
  const std::string neighbour_seat = *adj.at(asg.at(c.a)).begin();
  for (auto& [who, s] : asg)
    if (s == neighbour_seat) s = asg.at(c.b);
  asg[c.b] = neighbour_seat;
  auto r = reflect(inst, asg);
  const Annotation* ann = nullptr;
  for (const auto& a : r.annotations)
    if (a.ref == ScenarioInstance::conflict_ref(0)) ann = &a;
  ASSERT_NE(ann, nullptr);
  EXPECT_FALSE(ann->satisfied);
  EXPECT_NE(ann->reason.find(inst.cast.resident(c.a).name), std::string::npos);
  EXPECT_NE(ann->reason.find(inst.cast.resident(c.b).name), std::string::npos);
  EXPECT_NE(ann->reason.find(inst.scene.seat(neighbour_seat).table_id), std::string::npos);
  EXPECT_EQ(ann->parties, (std::vector<ResidentId>{c.a, c.b}));
}

TEST(ReportJson, RoundTrips) {
  auto g = generated(66);
  auto asg = g.truth.assignment;
  swap_seats(asg, g.instance.party[0], g.instance.party[3]);
  auto s = score_instance(g.instance, asg, CategoryMode::fine);
  auto back = score_report_from_json(score_report_to_json(s));
  EXPECT_EQ(score_report_to_json(back).dump(), score_report_to_json(s).dump());
  EXPECT_EQ(back.scaled_score, s.scaled_score);
  auto r = reflect(g.instance, asg);
  EXPECT_EQ(reflection_to_json(reflection_from_json(reflection_to_json(r))).dump(), reflection_to_json(r).dump());
}

TEST(ReportCsv, HeaderAndRowAlign) {
  auto g = generated(2);
  auto row = score_csv_row(score_instance(g.instance, g.truth.assignment));
  auto commas = [](const std::string& s) { return std::count(s.begin(), s.end(), ','); };
  EXPECT_EQ(commas(row), commas(score_csv_header()));
  EXPECT_EQ(row.rfind(g.instance.id + ",coarse,99.300000,true,", 0), 0u) << row;
}
