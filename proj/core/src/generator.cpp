#include "seatplan/generator.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <set>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "seatplan/error.hpp"

namespace seatplan {

namespace {

constexpr const char* kLadderSpec =
    "seatplan-generator/1;template=(L-1)/14;prefs=[1+s/5,1+round(4s/13)];conflicts=[c/2,c=round(s*(n/2)/13)];"
    "retries=200;max_prefs=5;max_conflicts=2;strengths=uniform";

int sample_strength(const std::array<double, 3>& mix, Rng& rng) {
  const double total = mix[0] + mix[1] + mix[2];
  double u = rng.unit() * total;
  for (int i = 0; i < 2; ++i) {
    if (u < mix[i]) return i + 1;
    u -= mix[i];
  }
  return 3;
}

struct Attempt {
  std::vector<ResidentId> party;
  std::vector<std::size_t> seat_of;  // party index -> scene seat index
};

}  // namespace

DifficultyLevel difficulty_level(int level) {
  if (level < 1 || level > kLevelCount)
    throw std::invalid_argument("level " + std::to_string(level) + " outside 1.." + std::to_string(kLevelCount));
  DifficultyLevel d;
  d.level = level;
  const int tpl = (level - 1) / kLevelsPerTemplate;
  const int step = (level - 1) % kLevelsPerTemplate;
  d.template_id = static_cast<TemplateId>(tpl);
  const int seats = scene_template(d.template_id).seat_total();
  d.prefs_max = 1 + static_cast<int>(std::lround(4.0 * step / 13.0));
  d.prefs_min = 1 + step / 5;
  const int cmax = seats / 2;
  d.conflicts_max = static_cast<int>(std::lround(static_cast<double>(step * cmax) / 13.0));
  d.conflicts_min = d.conflicts_max / 2;
  return d;
}

std::string instance_id(int level, int index) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "L%02d-%03d", level, index);
  return buf;
}

std::string generator_version() {
  const std::string spec = kLadderSpec;
  char buf[24];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a(spec.data(), spec.size())));
  return buf;
}

std::uint64_t instance_seed(std::uint64_t base, int level, int index) {
  return derive_seed(base, static_cast<std::uint64_t>(level), static_cast<std::uint64_t>(index));
}

Generated generate_instance(const DifficultyLevel& level, const World& world, std::uint64_t seed, const Config& cfg,
                            std::string id) {
  Rng rng(seed);
  const SceneTemplate& tpl = scene_template(level.template_id);
  SceneInstance scene = instantiate_scene(tpl, rng, cfg.spatial);
  const EnvDigest digest = export_ground_truth_features(scene, cfg.spatial);
  const auto neighbors = seat_neighbor_indices(scene);
  const std::size_t n = scene.seats.size();
  if (id.empty()) id = instance_id(level.level, 0);

  for (int attempt = 0; attempt < kGenerationRetries; ++attempt) {
    std::vector<ResidentId> party = sample_party(world, n, rng);
    std::vector<std::size_t> seat_of(n);
    std::iota(seat_of.begin(), seat_of.end(), std::size_t{0});
    rng.shuffle(seat_of);
    std::vector<int> npc_at(n);
    for (std::size_t i = 0; i < n; ++i) npc_at[seat_of[i]] = static_cast<int>(i);

    // Preferences: only kinds that the ground truth satisfies.
    std::vector<Preference> prefs;
    bool ok = true;
    for (std::size_t i = 0; i < n && ok; ++i) {
      const Resident& owner = world.resident(party[i]);
      const SeatDigest& sd = digest.seats[seat_of[i]];
      std::vector<PreferenceKind> satisfied;
      for (std::size_t k = 0; k < kPreferenceKindCount; ++k) {
        Preference p;
        p.owner = owner.id;
        p.kind = static_cast<PreferenceKind>(k);
        if (p.kind == PreferenceKind::dominant_hand_clearance) p.hand = owner.dominant_hand;
        bool good = false;
        if (p.category() == Category::embodied) {
          good = grade_embodied(p, sd, cfg.spatial) == 1;
        } else {
          for (int j : neighbors[seat_of[i]])
            if (social_match(p, owner, world.resident(party[npc_at[j]]), world)) good = true;
        }
        if (good) satisfied.push_back(p.kind);
      }
      const int want = std::min(rng.between(level.prefs_min, level.prefs_max), kMaxPreferencesPerNpc);
      if (static_cast<int>(satisfied.size()) < want) {
        ok = false;
        break;
      }
      rng.shuffle(satisfied);
      std::sort(satisfied.begin(), satisfied.begin() + want);
      for (int k = 0; k < want; ++k) {
        Preference p;
        p.owner = owner.id;
        p.kind = satisfied[k];
        p.strength = sample_strength(level.strength_mix, rng);
        if (p.kind == PreferenceKind::dominant_hand_clearance) p.hand = owner.dominant_hand;
        prefs.push_back(std::move(p));
      }
    }
    if (!ok) continue;

    // Conflicts: related, non-adjacent pairs with a compatible kind.
    struct Candidate {
      std::size_t a, b;
      std::vector<ConflictKind> kinds;
    };
    std::vector<Candidate> candidates;
    for (std::size_t a = 0; a < n; ++a)
      for (std::size_t b = a + 1; b < n; ++b) {
        const auto& nb = neighbors[seat_of[a]];
        if (std::find(nb.begin(), nb.end(), static_cast<int>(seat_of[b])) != nb.end()) continue;
        const auto rel = world.relation_between(party[a], party[b]);
        if (rel.empty()) continue;
        Candidate c{a, b, {}};
        for (std::size_t k = 0; k < kConflictKindCount; ++k)
          if (conflict_compatible(static_cast<ConflictKind>(k), rel)) c.kinds.push_back(static_cast<ConflictKind>(k));
        if (!c.kinds.empty()) candidates.push_back(std::move(c));
      }
    const int want_conflicts = rng.between(level.conflicts_min, level.conflicts_max);
    rng.shuffle(candidates);
    std::vector<int> per_npc(n, 0);
    std::vector<Conflict> conflicts;
    for (const auto& c : candidates) {
      if (static_cast<int>(conflicts.size()) == want_conflicts) break;
      if (per_npc[c.a] >= kMaxConflictsPerNpc || per_npc[c.b] >= kMaxConflictsPerNpc) continue;
      ++per_npc[c.a];
      ++per_npc[c.b];
      Conflict k;
      k.a = party[c.a];
      k.b = party[c.b];
      k.kind = rng.pick(c.kinds);
      k.strength = sample_strength(level.strength_mix, rng);
      conflicts.push_back(canonical(std::move(k)));
    }
    if (static_cast<int>(conflicts.size()) < want_conflicts) continue;

    Generated g;
    auto& inst = g.instance;
    inst.id = id;
    inst.level = level.level;
    inst.seed = seed;
    inst.generator_version = generator_version();
    inst.party = party;
    inst.cast = world.restricted_to(party);
    inst.preferences = std::move(prefs);
    inst.conflicts = std::move(conflicts);
    inst.scene = std::move(scene);
    g.truth.instance_id = id;
    for (std::size_t i = 0; i < n; ++i) g.truth.assignment[party[i]] = inst.scene.seats[seat_of[i]].id;
    return g;
  }
  throw GenerationError("level " + std::to_string(level.level) + ": no valid arrangement after " +
                            std::to_string(kGenerationRetries) + " draws",
                        level.level);
}

KindProfile instance_profile(const ScenarioInstance& inst) {
  KindProfile p;
  const std::string tpl(to_string(inst.scene.template_id));
  for (const auto& pref : inst.preferences) ++p[std::string(to_string(pref.kind)) + "|" + tpl];
  for (const auto& c : inst.conflicts) ++p[std::string(to_string(c.kind)) + "|" + tpl];
  return p;
}

std::map<std::string, long> DatasetManifest::kind_counts() const {
  std::map<std::string, long> out;
  for (const auto& e : entries)
    for (const auto& [key, n] : e.profile) out[key.substr(0, key.find('|'))] += n;
  return out;
}

KindProfile DatasetManifest::joint_profile() const {
  KindProfile out;
  for (const auto& e : entries)
    for (const auto& [key, n] : e.profile) out[key] += n;
  return out;
}

DatasetManifest generate_dataset(const std::vector<int>& levels, int per_level, const World& world,
                                 std::uint64_t seed, const Config& cfg,
                                 const std::function<void(const Generated&)>& sink) {
  if (per_level < 1) throw std::invalid_argument("per_level must be at least 1");
  DatasetManifest m;
  m.generator_version = generator_version();
  m.seed = seed;
  m.per_level = per_level;
  m.levels = levels;
  for (int level : levels) {
    const DifficultyLevel d = difficulty_level(level);
    for (int i = 0; i < per_level; ++i) {
      const std::uint64_t s = instance_seed(seed, level, i);
      Generated g;
      try {
        g = generate_instance(d, world, s, cfg, instance_id(level, i));
      } catch (const GenerationError&) {
        throw;
      } catch (const Error& e) {
        throw GenerationError("level " + std::to_string(level) + ": " + e.what(), level);
      }
      ManifestEntry e;
      e.id = g.instance.id;
      e.level = level;
      e.seed = s;
      e.template_id = g.instance.scene.template_id;
      e.npc_count = static_cast<int>(g.instance.party.size());
      e.preference_count = static_cast<int>(g.instance.preferences.size());
      e.conflict_count = static_cast<int>(g.instance.conflicts.size());
      e.profile = instance_profile(g.instance);
      if (sink) sink(g);
      m.entries.push_back(std::move(e));
    }
  }
  return m;
}

nlohmann::json manifest_to_json(const DatasetManifest& m) {
  nlohmann::json entries = nlohmann::json::array();
  for (const auto& e : m.entries)
    entries.push_back({{"id", e.id},
                       {"level", e.level},
                       {"seed", e.seed},
                       {"template", to_string(e.template_id)},
                       {"npc_count", e.npc_count},
                       {"preference_count", e.preference_count},
                       {"conflict_count", e.conflict_count},
                       {"profile", e.profile}});
  return {{"schema_version", kInstanceSchemaVersion},
          {"generator_version", m.generator_version},
          {"seed", m.seed},
          {"per_level", m.per_level},
          {"levels", m.levels},
          {"instance_count", m.entries.size()},
          {"kind_counts", m.kind_counts()},
          {"joint_profile", m.joint_profile()},
          {"entries", entries}};
}

DatasetManifest manifest_from_json(const nlohmann::json& j) {
  try {
    DatasetManifest m;
    m.generator_version = j.at("generator_version").get<std::string>();
    m.seed = j.at("seed").get<std::uint64_t>();
    m.per_level = j.at("per_level").get<int>();
    m.levels = j.at("levels").get<std::vector<int>>();
    for (const auto& e : j.at("entries")) {
      ManifestEntry x;
      x.id = e.at("id").get<std::string>();
      x.level = e.at("level").get<int>();
      x.seed = e.at("seed").get<std::uint64_t>();
      x.template_id = template_from_string(e.at("template").get<std::string>());
      x.npc_count = e.at("npc_count").get<int>();
      x.preference_count = e.at("preference_count").get<int>();
      x.conflict_count = e.at("conflict_count").get<int>();
      x.profile = e.at("profile").get<KindProfile>();
      m.entries.push_back(std::move(x));
    }
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("manifest: ") + e.what());
  }
}

double tv_distance(const KindProfile& p, const KindProfile& q) {
  double np = 0, nq = 0;
  for (const auto& [k, v] : p) np += static_cast<double>(v);
  for (const auto& [k, v] : q) nq += static_cast<double>(v);
  if (np == 0 && nq == 0) return 0.0;
  if (np == 0 || nq == 0) return 1.0;
  std::set<std::string> keys;
  for (const auto& [k, v] : p) keys.insert(k);
  for (const auto& [k, v] : q) keys.insert(k);
  double sum = 0;
  for (const auto& k : keys) {
    auto a = p.find(k), b = q.find(k);
    const double x = a == p.end() ? 0.0 : static_cast<double>(a->second) / np;
    const double y = b == q.end() ? 0.0 : static_cast<double>(b->second) / nq;
    sum += std::abs(x - y);
  }
  return sum / 2.0;
}

KindProfile pooled_profile(const DatasetManifest& m, const std::vector<std::string>& ids) {
  std::set<std::string> want(ids.begin(), ids.end());
  KindProfile out;
  for (const auto& e : m.entries)
    if (want.count(e.id))
      for (const auto& [k, v] : e.profile) out[k] += v;
  return out;
}

namespace {

// Dense view of the manifest for fast subset scoring.
struct DenseProfiles {
  std::vector<std::vector<double>> rows;  // per entry, counts per cell
  std::vector<double> target;             // normalized full-set distribution

  explicit DenseProfiles(const DatasetManifest& m) {
    std::map<std::string, std::size_t> cell;
    for (const auto& e : m.entries)
      for (const auto& [k, v] : e.profile) cell.emplace(k, 0);
    std::size_t i = 0;
    for (auto& [k, idx] : cell) idx = i++;
    target.assign(cell.size(), 0.0);
    for (const auto& e : m.entries) {
      std::vector<double> row(cell.size(), 0.0);
      for (const auto& [k, v] : e.profile) row[cell[k]] = static_cast<double>(v);
      for (std::size_t c = 0; c < row.size(); ++c) target[c] += row[c];
      rows.push_back(std::move(row));
    }
    const double total = std::accumulate(target.begin(), target.end(), 0.0);
    if (total > 0)
      for (auto& t : target) t /= total;
  }

  double tv(const std::vector<double>& sum) const {
    const double total = std::accumulate(sum.begin(), sum.end(), 0.0);
    if (total <= 0) return target.empty() ? 0.0 : 1.0;
    double d = 0;
    for (std::size_t c = 0; c < sum.size(); ++c) d += std::abs(sum[c] / total - target[c]);
    return d / 2.0;
  }

  double tv_with(std::vector<double>& sum, const std::vector<double>& add, const std::vector<double>* remove) const {
    for (std::size_t c = 0; c < sum.size(); ++c) sum[c] += add[c] - (remove ? (*remove)[c] : 0.0);
    const double d = tv(sum);
    for (std::size_t c = 0; c < sum.size(); ++c) sum[c] -= add[c] - (remove ? (*remove)[c] : 0.0);
    return d;
  }
};

std::vector<std::size_t> greedy_pick(const DenseProfiles& dp, std::size_t k, std::vector<double>& sum) {
  const std::size_t n = dp.rows.size();
  std::vector<char> used(n, 0);
  std::vector<std::size_t> chosen;
  sum.assign(dp.target.size(), 0.0);
  while (chosen.size() < k) {
    std::size_t best = n;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) {
      if (used[i]) continue;
      const double d = dp.tv_with(sum, dp.rows[i], nullptr);
      if (d < best_d - 1e-12) {
        best_d = d;
        best = i;
      }
    }
    used[best] = 1;
    chosen.push_back(best);
    for (std::size_t c = 0; c < sum.size(); ++c) sum[c] += dp.rows[best][c];
  }
  return chosen;
}

std::vector<std::string> ids_of(const DatasetManifest& m, std::vector<std::size_t> idx) {
  std::sort(idx.begin(), idx.end());
  std::vector<std::string> out;
  for (auto i : idx) out.push_back(m.entries[i].id);
  return out;
}

void check_k(const DatasetManifest& m, std::size_t k) {
  if (k == 0) throw std::invalid_argument("subset size must be positive");
  if (k > m.entries.size()) throw std::invalid_argument("subset size exceeds dataset size");
}

}  // namespace

std::vector<std::string> select_representative_greedy(const DatasetManifest& m, std::size_t k) {
  check_k(m, k);
  DenseProfiles dp(m);
  std::vector<double> sum;
  return ids_of(m, greedy_pick(dp, k, sum));
}

std::vector<std::string> select_representative_subset(const DatasetManifest& m, std::size_t k) {
  check_k(m, k);
  DenseProfiles dp(m);
  std::vector<double> sum;
  auto chosen = greedy_pick(dp, k, sum);
  std::vector<char> in(m.entries.size(), 0);
  for (auto i : chosen) in[i] = 1;
  double current = dp.tv(sum);
  for (int pass = 0; pass < 50; ++pass) {
    bool improved = false;
    for (std::size_t slot = 0; slot < chosen.size(); ++slot) {
      const std::size_t out = chosen[slot];
      std::size_t best = out;
      double best_d = current;
      for (std::size_t i = 0; i < m.entries.size(); ++i) {
        if (in[i]) continue;
        const double d = dp.tv_with(sum, dp.rows[i], &dp.rows[out]);
        if (d < best_d - 1e-12) {
          best_d = d;
          best = i;
        }
      }
      if (best != out) {
        for (std::size_t c = 0; c < sum.size(); ++c) sum[c] += dp.rows[best][c] - dp.rows[out][c];
        in[out] = 0;
        in[best] = 1;
        chosen[slot] = best;
        current = best_d;
        improved = true;
      }
    }
    if (!improved) break;
  }
  return ids_of(m, chosen);
}

}  // namespace seatplan
