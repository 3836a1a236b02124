#include <gtest/gtest.h>

#include <numbers>
#include <set>

#include <nlohmann/json.hpp>

#include "fixtures.hpp"
#include "seatplan/constraints.hpp"
#include "seatplan/dialogue.hpp"
#include "seatplan/error.hpp"
#include "seatplan/scene.hpp"

using namespace seatplan;
using seatplan::test::shipped_world;

namespace {

Resident person(const std::string& id, int age) {
  Resident r;
  r.id = id;
  r.name = "Name " + id;
  r.age = age;
  r.job = "clerk";
  r.workplace = "office";
  r.residence = "north";
  r.family_id = "f_" + id;
  return r;
}

World small_world(std::vector<Resident> rs, std::vector<Relationship> rels) {
  std::map<FamilyId, std::vector<ResidentId>> fam;
  for (const auto& r : rs) fam[r.family_id].push_back(r.id);
  return World(std::move(rs), std::move(rels), std::move(fam));
}

// Owner "o" between "l" and "r" in a line of three seats, plus "x" far away.
Adjacency line_adjacency() {
  return {{"s0", {"s1"}}, {"s1", {"s0", "s2"}}, {"s2", {"s1"}}, {"s9", {}}};
}

SceneInstance open_scene() {
  SceneInstance s;
  s.rooms.push_back({"room1", rect_polygon(0, 0, 10, 6)});
  auto add = [&](FeatureKind k, std::vector<Vec2> g, Vec2 anchor) {
    SpatialFeature f;
    f.id = std::string(to_string(k)) + "1";
    f.kind = k;
    f.geometry = std::move(g);
    f.anchor = anchor;
    s.features.push_back(f);
  };
  add(FeatureKind::window, {{3, 0}, {3, 2}}, {3, 1});
  add(FeatureKind::television, {{6, 1}}, {6, 1});
  add(FeatureKind::air_conditioner, {{9, 5}}, {9, 5});
  add(FeatureKind::kitchen_zone, rect_polygon(8, 0, 10, 2), {9, 1});
  add(FeatureKind::exit, {{0, 5}, {0, 6}}, {0, 5.5});
  return s;
}

Seat seat_at(Vec2 p, double facing, Tableware tw = Tableware::chopsticks) {
  Seat s;
  s.id = "seat1";
  s.table_id = "t1";
  s.position = p;
  s.facing = facing;
  s.tableware = tw;
  return s;
}

Preference pref(PreferenceKind k, int strength = 1, std::string owner = "o") {
  Preference p;
  p.owner = std::move(owner);
  p.kind = k;
  p.strength = strength;
  if (k == PreferenceKind::dominant_hand_clearance) p.hand = Hand::right;
  return p;
}

}  // namespace

TEST(Taxonomy, SizesAreElevenEighteenTwelve) {
  EXPECT_EQ(kEmbodiedKindCount, 11u);
  EXPECT_EQ(kSocialKindCount, 18u);
  EXPECT_EQ(kConflictKindCount, 12u);
  std::map<Subcategory, int> sub;
  for (std::size_t i = 0; i < kPreferenceKindCount; ++i) ++sub[subcategory_of(static_cast<PreferenceKind>(i))];
  EXPECT_EQ(sub[Subcategory::embodied], 11);
  EXPECT_EQ(sub[Subcategory::relation], 9);
  EXPECT_EQ(sub[Subcategory::group], 5);
  EXPECT_EQ(sub[Subcategory::topic], 4);
}

TEST(Taxonomy, NamesRoundTrip) {
  for (std::size_t i = 0; i < kPreferenceKindCount; ++i) {
    auto k = static_cast<PreferenceKind>(i);
    EXPECT_EQ(preference_kind_from_string(to_string(k)), k);
  }
  for (std::size_t i = 0; i < kConflictKindCount; ++i) {
    auto k = static_cast<ConflictKind>(i);
    EXPECT_EQ(conflict_kind_from_string(to_string(k)), k);
  }
  EXPECT_THROW(preference_kind_from_string("sit_on_roof"), ParseError);
}

TEST(Taxonomy, SpousalQuarrelNeedsSpouse) {
  EXPECT_TRUE(conflict_compatible(ConflictKind::spousal_quarrel, {RelationView::spouse}));
  EXPECT_FALSE(conflict_compatible(ConflictKind::spousal_quarrel, {RelationView::friend_of}));
  EXPECT_FALSE(conflict_compatible(ConflictKind::friend_falling_out, {}));
}

TEST(Embodied, TelevisionFacedWithoutWallIsMet) {
  auto s = open_scene();
  EXPECT_EQ(check_embodied(pref(PreferenceKind::tv_in_view), seat_at({4, 1}, 0.0), s), 1);
  EXPECT_EQ(check_embodied(pref(PreferenceKind::tv_in_view), seat_at({4, 1}, std::numbers::pi), s), 0);
}

TEST(Embodied, TablewareMismatchIsUnmet) {
  auto s = open_scene();
  EXPECT_EQ(check_embodied(pref(PreferenceKind::tableware_chopsticks), seat_at({5, 3}, 0, Tableware::cutlery), s), 0);
  EXPECT_EQ(check_embodied(pref(PreferenceKind::tableware_cutlery), seat_at({5, 3}, 0, Tableware::cutlery), s), 1);
}

TEST(Embodied, NearThresholdIsInclusive) {
  auto s = open_scene();
  // Window segment is x = 3, y in [0, 2].
  EXPECT_EQ(check_embodied(pref(PreferenceKind::near_window), seat_at({4.4, 1}, 0), s), 1);
  EXPECT_EQ(check_embodied(pref(PreferenceKind::near_window), seat_at({4.5, 1}, 0), s), 1);
  EXPECT_EQ(check_embodied(pref(PreferenceKind::near_window), seat_at({4.6, 1}, 0), s), 0);
  EXPECT_EQ(check_embodied(pref(PreferenceKind::away_from_window), seat_at({6.0, 1}, 0), s), 1);
  EXPECT_EQ(check_embodied(pref(PreferenceKind::away_from_window), seat_at({5.9, 1}, 0), s), 0);
}

TEST(Embodied, KitchenInsidePolygonIsNear) {
  auto s = open_scene();
  EXPECT_EQ(check_embodied(pref(PreferenceKind::near_kitchen), seat_at({9, 1}, 0), s), 1);
  EXPECT_EQ(check_embodied(pref(PreferenceKind::away_from_kitchen), seat_at({9, 1}, 0), s), 0);
}

TEST(Embodied, MissingFeatureKindThrows) {
  auto s = open_scene();
  std::erase_if(s.features, [](const SpatialFeature& f) { return f.kind == FeatureKind::television; });
  EXPECT_THROW(check_embodied(pref(PreferenceKind::tv_in_view), seat_at({4, 1}, 0), s), ValidationError);
}

TEST(Embodied, EveryKindCanBeMetAndUnmet) {
  std::map<std::pair<int, int>, std::set<int>> seen;  // (kind, hand) -> grades
  for (int t = 0; t < 5; ++t)
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      Rng rng(derive_seed(3, t, seed));
      auto s = instantiate_scene(scene_template(static_cast<TemplateId>(t)), rng);
      for (const auto& seat : s.seats)
        for (std::size_t k = 0; k < kEmbodiedKindCount; ++k)
          for (int h = 0; h < 2; ++h) {
            auto p = pref(static_cast<PreferenceKind>(k));
            if (p.kind == PreferenceKind::dominant_hand_clearance) p.hand = h ? Hand::left : Hand::right;
            seen[{static_cast<int>(k), h}].insert(check_embodied(p, seat, s));
          }
    }
  for (const auto& [key, grades] : seen)
    EXPECT_EQ(grades, (std::set<int>{0, 1})) << to_string(static_cast<PreferenceKind>(key.first));
}

TEST(Embodied, SceneAndDigestAgree) {
  SpatialConfig cfg;
  for (int t = 0; t < 5; ++t) {
    Rng rng(derive_seed(4, t, 0));
    auto s = instantiate_scene(scene_template(static_cast<TemplateId>(t)), rng);
    auto d = export_ground_truth_features(s, cfg);
    for (const auto& seat : s.seats)
      for (std::size_t k = 0; k < kEmbodiedKindCount; ++k) {
        auto p = pref(static_cast<PreferenceKind>(k));
        EXPECT_EQ(check_embodied(p, seat, s, cfg), grade_embodied(p, *d.find(seat.id), cfg));
      }
  }
}

TEST(Social, SpouseNextDoorIsMet) {
  auto w = small_world({person("o", 40), person("sp", 41), person("x", 20)}, {{"o", "sp", RelationKind::spouse}});
  Assignment asg{{"o", "s1"}, {"sp", "s0"}, {"x", "s9"}};
  EXPECT_EQ(check_social(pref(PreferenceKind::adjacent_to_spouse), asg, line_adjacency(), w), 1);
  asg = {{"o", "s1"}, {"sp", "s9"}, {"x", "s0"}};
  EXPECT_EQ(check_social(pref(PreferenceKind::adjacent_to_spouse), asg, line_adjacency(), w), 0);
}

TEST(Social, SharedInterestNeedsTheTag) {
  auto o = person("o", 30), l = person("l", 30), r = person("r", 30);
  o.interests = {"research"};
  l.interests = {"music"};
  auto w = small_world({o, l, r}, {});
  Assignment asg{{"l", "s0"}, {"o", "s1"}, {"r", "s2"}};
  EXPECT_EQ(check_social(pref(PreferenceKind::shared_interest_research), asg, line_adjacency(), w), 0);
  r.interests = {"research"};
  w = small_world({o, l, r}, {});
  EXPECT_EQ(check_social(pref(PreferenceKind::shared_interest_research), asg, line_adjacency(), w), 1);
}

TEST(Social, PeerBandIsEightYears) {
  Assignment asg{{"l", "s0"}, {"o", "s1"}, {"r", "s2"}};
  auto w = small_world({person("o", 30), person("l", 37), person("r", 50)}, {});
  EXPECT_EQ(check_social(pref(PreferenceKind::adjacent_to_peer_age_band), asg, line_adjacency(), w), 1);
  w = small_world({person("o", 30), person("l", 38), person("r", 50)}, {});
  EXPECT_EQ(check_social(pref(PreferenceKind::adjacent_to_peer_age_band), asg, line_adjacency(), w), 1);
  w = small_world({person("o", 30), person("l", 39), person("r", 50)}, {});
  EXPECT_EQ(check_social(pref(PreferenceKind::adjacent_to_peer_age_band), asg, line_adjacency(), w), 0);
}

TEST(Social, HighlyEducatedMeansLevelThree) {
  auto o = person("o", 30), l = person("l", 30);
  l.education_level = 2;
  Assignment asg{{"l", "s0"}, {"o", "s1"}};
  EXPECT_EQ(check_social(pref(PreferenceKind::adjacent_to_highly_educated), asg, line_adjacency(), small_world({o, l}, {})), 0);
  l.education_level = 3;
  EXPECT_EQ(check_social(pref(PreferenceKind::adjacent_to_highly_educated), asg, line_adjacency(), small_world({o, l}, {})), 1);
}

TEST(Social, ParentChildMatchesEitherDirection) {
  auto w = small_world({person("o", 30), person("kid", 5)}, {{"o", "kid", RelationKind::parent_of}});
  Assignment a1{{"o", "s1"}, {"kid", "s2"}};
  EXPECT_EQ(check_social(pref(PreferenceKind::adjacent_to_parent_child), a1, line_adjacency(), w), 1);
  EXPECT_EQ(check_social(pref(PreferenceKind::adjacent_to_parent_child, 1, "kid"), a1, line_adjacency(), w), 1);
}

TEST(Conflict, AdjacencyDecides) {
  Conflict c{"a", "b", ConflictKind::friend_falling_out, 2};
  EXPECT_EQ(check_conflict(c, {{"a", "s0"}, {"b", "s1"}}, line_adjacency()), 0);
  EXPECT_EQ(check_conflict(c, {{"a", "s0"}, {"b", "s2"}}, line_adjacency()), 1);
  EXPECT_EQ(check_conflict(c, {{"a", "s0"}, {"b", "s9"}}, line_adjacency()), 1);
}

TEST(Conflict, OppositeSeatsAtSixTableAreApart) {
  Rng rng(2);
  auto s = instantiate_scene(scene_template(TemplateId::C), rng);
  std::string s0, s3;
  for (const auto& seat : s.seats) {
    if (seat.perimeter_index == 0) s0 = seat.id;
    if (seat.perimeter_index == 3) s3 = seat.id;
  }
  Conflict c{"a", "b", ConflictKind::friend_falling_out, 1};
  EXPECT_EQ(check_conflict(c, {{"a", s0}, {"b", s3}}, seat_adjacency(s)), 1);
}

TEST(Conflict, OnlyThePairMatters) {
  Conflict c{"a", "b", ConflictKind::friend_falling_out, 1};
  Assignment asg{{"a", "s0"}, {"b", "s2"}, {"c", "s1"}, {"d", "s9"}};
  auto base = check_conflict(c, asg, line_adjacency());
  std::swap(asg["c"], asg["d"]);
  EXPECT_EQ(check_conflict(c, asg, line_adjacency()), base);
}

TEST(Conflict, CanonicalOrdersParties) {
  auto c = canonical({"z", "a", ConflictKind::colleague_rivalry, 3});
  EXPECT_EQ(c.a, "a");
  EXPECT_EQ(c.b, "z");
}

TEST(ConstraintJson, RoundTrips) {
  auto p = pref(PreferenceKind::dominant_hand_clearance, 2);
  p.hand = Hand::left;
  EXPECT_EQ(preference_from_json(preference_to_json(p)), p);
  Conflict c{"a", "b", ConflictKind::in_law_friction, 3};
  EXPECT_EQ(conflict_from_json(conflict_to_json(c)), c);
  Assignment a{{"a", "s1"}, {"b", "s2"}};
  EXPECT_EQ(assignment_from_json(assignment_to_json(a)), a);
}

// Dialogue

namespace {

struct Cast {
  World world;
  ResidentId speaker, other;
};

// A speaker with a spouse; the spouse is the conflict partner.
Cast dialogue_cast() {
  const World& w = shipped_world();
  for (const auto& rel : w.relationships())
    if (rel.kind == RelationKind::spouse) return {w.restricted_to({rel.a, rel.b}), rel.a, rel.b};
  throw std::runtime_error("no spouses in world");
}

}  // namespace

TEST(Dialogue, TelevisionSentenceAtStrengthThree) {
  auto cast = dialogue_cast();
  std::set<std::string> seen;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    Rng rng(seed);
    seen.insert(render_utterance(pref(PreferenceKind::tv_in_view, 3, cast.speaker), cast.speaker, cast.world, rng));
  }
  EXPECT_TRUE(seen.count("I absolutely must be able to see the television from my seat."));
  EXPECT_GE(seen.size(), 3u);
}

TEST(Dialogue, SpouseSentenceNamesSpouseWithQuite) {
  auto cast = dialogue_cast();
  Rng rng(1);
  auto text = render_utterance(pref(PreferenceKind::adjacent_to_spouse, 2, cast.speaker), cast.speaker, cast.world, rng);
  EXPECT_NE(text.find(cast.world.resident(cast.other).name), std::string::npos) << text;
  EXPECT_NE(text.find("quite"), std::string::npos) << text;
}

TEST(Dialogue, RenderIsDeterministic) {
  auto cast = dialogue_cast();
  Rng a(9), b(9);
  auto p = pref(PreferenceKind::near_kitchen, 1, cast.speaker);
  EXPECT_EQ(render_utterance(p, cast.speaker, cast.world, a), render_utterance(p, cast.speaker, cast.world, b));
}

TEST(Dialogue, EveryKindAndStrengthRoundTrips) {
  auto cast = dialogue_cast();
  for (std::uint64_t seed = 0; seed < 20; ++seed)
    for (int s = 1; s <= 3; ++s) {
      for (std::size_t k = 0; k < kPreferenceKindCount; ++k) {
        Rng rng(derive_seed(seed, s, k));
        auto p = pref(static_cast<PreferenceKind>(k), s, cast.speaker);
        auto text = render_utterance(p, cast.speaker, cast.world, rng);
        ASSERT_EQ(std::get<Preference>(parse_utterance(text, cast.speaker, cast.world)), p) << text;
      }
      for (std::size_t k = 0; k < kConflictKindCount; ++k) {
        Rng rng(derive_seed(seed, s, 100 + k));
        Conflict c = canonical({cast.speaker, cast.other, static_cast<ConflictKind>(k), s});
        auto text = render_utterance(c, cast.speaker, cast.world, rng);
        ASSERT_EQ(std::get<Conflict>(parse_utterance(text, cast.speaker, cast.world)), c) << text;
      }
    }
}

TEST(Dialogue, GibberishFailsWithEmptyPrefix) {
  auto cast = dialogue_cast();
  try {
    parse_utterance("gibberish", cast.speaker, cast.world);
    FAIL() << "expected a parse error";
  } catch (const UtteranceParseError& e) {
    EXPECT_EQ(e.matched_prefix(), "");
  }
}

TEST(Dialogue, MutatedSentencesFailGracefully) {
  auto cast = dialogue_cast();
  Rng rng(12);
  for (std::size_t k = 0; k < kPreferenceKindCount; ++k) {
    auto text = render_utterance(pref(static_cast<PreferenceKind>(k), 2, cast.speaker), cast.speaker, cast.world, rng);
    // The {names} slot is free text, so mutate the fixed wording around it.
    std::string mutated = "Perhaps " + text;
    EXPECT_THROW(parse_utterance(mutated, cast.speaker, cast.world), UtteranceParseError) << mutated;
    std::string adverb = text;
    adverb.replace(adverb.find("quite"), 5, "very");
    EXPECT_THROW(parse_utterance(adverb, cast.speaker, cast.world), UtteranceParseError) << adverb;
    std::string cut = text.substr(0, text.size() - 3);
    EXPECT_THROW(parse_utterance(cut, cast.speaker, cast.world), UtteranceParseError) << cut;
  }
}

TEST(Dialogue, PrefixReportsHowFarItGot) {
  auto cast = dialogue_cast();
  try {
    parse_utterance("I absolutely must be able to see the radio from my seat.", cast.speaker, cast.world);
    FAIL();
  } catch (const UtteranceParseError& e) {
    EXPECT_EQ(e.matched_prefix(), "I absolutely must be able to see the ");
  }
}

TEST(Dialogue, Sentinel) {
  EXPECT_TRUE(is_sentinel("I have nothing more to share."));
  EXPECT_FALSE(is_sentinel("I have nothing."));
}

TEST(Dialogue, PackNeedsThreeTemplatesPerKind) {
  nlohmann::json j = {{"locale", "en"},
                      {"adverbs", {"slightly", "quite", "absolutely"}},
                      {"sentinel", "Done."},
                      {"templates", nlohmann::json::object()}};
  EXPECT_THROW(utterance_pack_from_json(j), ValidationError);
  for (const auto& [kind, list] : builtin_utterance_pack().templates) EXPECT_GE(list.size(), 3u) << kind;
  EXPECT_EQ(builtin_utterance_pack().templates.size(), kConstraintKindCount);
}
