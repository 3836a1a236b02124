#include <gtest/gtest.h>

#include <algorithm>
#include <map>
#include <fstream>
#include <set>

#include <nlohmann/json.hpp>

#include "fixtures.hpp"
#include "seatplan/error.hpp"
#include "seatplan/rng.hpp"
#include "seatplan/world.hpp"

using namespace seatplan;
using seatplan::test::shipped_world;

namespace {

nlohmann::json world_json() { return world_to_json(shipped_world()); }

bool has_rule(const ValidationReport& r, const std::string& rule) {
  return std::any_of(r.violations.begin(), r.violations.end(), [&](const Violation& v) { return v.rule == rule; });
}

}  // namespace

TEST(Rng, SameSeedSameStream) {
  Rng a(42), b(42);
  for (int i = 0; i < 100; ++i) EXPECT_EQ(a.next(), b.next());
}

TEST(Rng, BelowStaysInRangeAndCoversIt) {
  Rng r(3);
  std::set<std::size_t> seen;
  for (int i = 0; i < 2000; ++i) {
    auto v = r.below(7);
    ASSERT_LT(v, 7u);
    seen.insert(v);
  }
  EXPECT_EQ(seen.size(), 7u);
}

TEST(Rng, BetweenIsInclusive) {
  Rng r(4);
  int lo = 100, hi = -100;
  for (int i = 0; i < 2000; ++i) {
    int v = r.between(-2, 2);
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  EXPECT_EQ(lo, -2);
  EXPECT_EQ(hi, 2);
}

TEST(Rng, ShuffleIsAPermutation) {
  Rng r(5);
  std::vector<int> v(50);
  for (int i = 0; i < 50; ++i) v[i] = i;
  auto w = v;
  r.shuffle(w);
  EXPECT_NE(v, w);
  std::sort(w.begin(), w.end());
  EXPECT_EQ(v, w);
}

TEST(Rng, DerivedSeedsDiffer) {
  std::set<std::uint64_t> seeds;
  for (int l = 1; l <= 70; ++l)
    for (int i = 0; i < 100; ++i) seeds.insert(derive_seed(1, l, i));
  EXPECT_EQ(seeds.size(), 7000u);
}

TEST(Rng, Fnv1aKnownVector) {
  // Published FNV-1a 64 test vectors.
  EXPECT_EQ(fnv1a("", 0), 0xcbf29ce484222325ULL);
  EXPECT_EQ(fnv1a("a", 1), 0xaf63dc4c8601ec8cULL);
  EXPECT_EQ(fnv1a("foobar", 6), 0x85944171f73967e8ULL);
}

TEST(World, ShippedFileCounts) {
  const World& w = shipped_world();
  EXPECT_EQ(w.residents().size(), 59u);
  EXPECT_EQ(w.families().size(), 11u);
  EXPECT_TRUE(validate_world(w).ok());
}

TEST(World, GenerationDepthAtMostFour) {
  auto depths = family_generation_depths(shipped_world());
  int deepest = 0;
  for (const auto& [f, d] : depths) {
    EXPECT_LE(d, 4) << f;
    deepest = std::max(deepest, d);
  }
  EXPECT_EQ(deepest, 4);
}

TEST(World, EveryResidentInExactlyOneFamily) {
  std::map<std::string, int> count;
  for (const auto& [f, members] : shipped_world().families())
    for (const auto& m : members) ++count[m];
  for (const auto& r : shipped_world().residents()) EXPECT_EQ(count[r.id], 1) << r.id;
}

TEST(World, UnknownFamilyIsReported) {
  auto j = world_json();
  j["residents"][0]["family_id"] = "family_missing";
  auto report = validate_world(world_from_json(j));
  EXPECT_TRUE(has_rule(report, "unknown_family"));
}

TEST(World, ParentCycleIsReported) {
  auto j = world_json();
  nlohmann::json rel;
  for (const auto& r : j["relationships"])
    if (r["kind"] == "parent_of") {
      rel = r;
      break;
    }
  j["relationships"].push_back({{"a", rel["b"]}, {"b", rel["a"]}, {"kind", "parent_of"}});
  EXPECT_TRUE(has_rule(validate_world(world_from_json(j)), "kinship_cycle"));
}

TEST(World, DuplicateIdNamesTheId) {
  auto j = world_json();
  j["residents"].push_back(j["residents"][0]);
  auto report = validate_world(world_from_json(j));
  ASSERT_TRUE(has_rule(report, "duplicate_resident"));
  for (const auto& v : report.violations)
    if (v.rule == "duplicate_resident") {
      EXPECT_EQ(v.ids, std::vector<std::string>{j["residents"][0]["id"]});
    }
}

TEST(World, YoungGrandparentIsAGenerationViolation) {
  auto j = world_json();
  std::string elder;
  for (const auto& r : j["relationships"])
    if (r["kind"] == "grandparent_of") {
      elder = r["a"];
      break;
    }
  ASSERT_FALSE(elder.empty());
  for (auto& r : j["residents"])
    if (r["id"] == elder) r["age"] = 5;
  EXPECT_TRUE(has_rule(validate_world(world_from_json(j)), "generation"));
}

TEST(World, LoadRejectsInvalidFile) {
  auto j = world_json();
  j["residents"][0]["family_id"] = "nope";
  auto dir = seatplan::test::temp_dir("world");
  {
    std::ofstream out(dir / "w.json");
    out << j.dump();
  }
  EXPECT_THROW(load_world(dir / "w.json"), ValidationError);
  {
    std::ofstream out(dir / "bad.json");
    out << "{ not json";
  }
  EXPECT_THROW(load_world(dir / "bad.json"), ParseError);
}

TEST(World, RelationViewsAreSymmetricOrInverse) {
  const World& w = shipped_world();
  for (const auto& rel : w.relationships()) {
    auto ab = w.relation_between(rel.a, rel.b);
    auto ba = w.relation_between(rel.b, rel.a);
    EXPECT_FALSE(ab.empty());
    EXPECT_EQ(ab.size(), ba.size());
    if (rel.kind == RelationKind::parent_of) {
      EXPECT_TRUE(ab.count(RelationView::parent_of));
      EXPECT_TRUE(ba.count(RelationView::child_of));
    }
    if (rel.kind == RelationKind::spouse) {
      EXPECT_TRUE(ba.count(RelationView::spouse));
    }
  }
}

TEST(World, RelationBetweenUnknownThrows) {
  EXPECT_THROW(shipped_world().relation_between("nobody", shipped_world().residents()[0].id), UnknownIdError);
}

TEST(World, JsonRoundTrip) {
  const World& w = shipped_world();
  const World back = world_from_json(world_to_json(w));
  EXPECT_EQ(back.residents(), w.residents());
  EXPECT_EQ(back.relationships(), w.relationships());
  EXPECT_EQ(back.families(), w.families());
}

TEST(World, RestrictedKeepsOnlyInternalTies) {
  const World& w = shipped_world();
  std::vector<ResidentId> members = {w.residents()[0].id, w.residents()[1].id, w.residents()[20].id};
  const World sub = w.restricted_to(members);
  EXPECT_EQ(sub.residents().size(), 3u);
  for (const auto& rel : sub.relationships()) {
    EXPECT_TRUE(std::count(members.begin(), members.end(), rel.a));
    EXPECT_TRUE(std::count(members.begin(), members.end(), rel.b));
  }
  EXPECT_EQ(sub.relation_between(members[0], members[1]), w.relation_between(members[0], members[1]));
}

TEST(Party, DeterministicDistinctAndBiased) {
  const World& w = shipped_world();
  Rng a(9), b(9);
  auto p = sample_party(w, 10, a);
  EXPECT_EQ(p, sample_party(w, 10, b));
  std::set<ResidentId> uniq(p.begin(), p.end());
  EXPECT_EQ(uniq.size(), 10u);
  EXPECT_GE(count_tied_members(w, p), 8u);
}

TEST(Party, SizeOutOfRangeThrows) {
  Rng r(1);
  EXPECT_THROW(sample_party(shipped_world(), 0, r), std::invalid_argument);
  EXPECT_THROW(sample_party(shipped_world(), 60, r), std::invalid_argument);
}
