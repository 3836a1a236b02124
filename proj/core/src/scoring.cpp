#include "seatplan/scoring.hpp"

#include <algorithm>
#include <cstdio>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "seatplan/error.hpp"

namespace seatplan {

double remap_raw(double x) {
  // Horner form of the printed coefficients.
  return ((((-10.87 * x + 21.99) * x - 12.65) * x + 2.568) * x - 0.045) * x;
}

double remap(double x) {
  if (!(x >= 0.0 && x <= 1.0)) throw std::domain_error("remap: argument outside [0, 1]");
  return std::clamp(remap_raw(x), 0.0, 1.0) + 0.0;  // + 0.0 turns -0 into 0
}

std::string_view to_string(CategoryMode m) { return m == CategoryMode::coarse ? "coarse" : "fine"; }

CategoryMode category_mode_from_string(std::string_view s) {
  if (s == "coarse") return CategoryMode::coarse;
  if (s == "fine") return CategoryMode::fine;
  throw ParseError("unknown category mode '" + std::string(s) + "'");
}

namespace {

const std::vector<std::string>& mode_categories(CategoryMode m) {
  static const std::vector<std::string> coarse = {"embodied", "social", "conflict"};
  static const std::vector<std::string> fine = {"embodied", "relation", "group", "topic", "conflict"};
  return m == CategoryMode::coarse ? coarse : fine;
}

std::string reporting_category(const Preference& p, CategoryMode m) {
  if (m == CategoryMode::coarse) return std::string(to_string(p.category()));
  return std::string(to_string(subcategory_of(p.kind)));
}

}  // namespace

ScoringLayout ScoringLayout::build(const ScenarioInstance& inst, CategoryMode mode) {
  const auto& all = mode_categories(mode);
  std::vector<int> totals(all.size(), 0);
  std::vector<int> raw_cat;
  ScoringLayout l;
  l.mode = mode;
  auto index_of = [&](const std::string& name) {
    return static_cast<int>(std::find(all.begin(), all.end(), name) - all.begin());
  };
  for (const auto& p : inst.preferences) {
    raw_cat.push_back(index_of(reporting_category(p, mode)));
    l.weight_of.push_back(p.weight());
  }
  for (const auto& c : inst.conflicts) {
    raw_cat.push_back(index_of("conflict"));
    l.weight_of.push_back(c.weight());
  }
  for (std::size_t i = 0; i < raw_cat.size(); ++i) totals[raw_cat[i]] += l.weight_of[i];
  std::vector<int> remap_index(all.size(), -1);
  for (std::size_t c = 0; c < all.size(); ++c)
    if (totals[c] > 0) {
      remap_index[c] = static_cast<int>(l.category_names.size());
      l.category_names.push_back(all[c]);
      l.category_weight.push_back(totals[c]);
    }
  for (int c : raw_cat) l.category_of.push_back(remap_index[c]);
  return l;
}

double ScoringLayout::scaled(const std::vector<int>& grades) const {
  std::vector<double> x;
  return scaled(grades, x);
}

double ScoringLayout::scaled(const std::vector<int>& grades, std::vector<double>& x) const {
  std::vector<int> met(category_names.size(), 0);
  for (std::size_t i = 0; i < grades.size(); ++i)
    if (grades[i]) met[category_of[i]] += weight_of[i];
  x.assign(category_names.size(), 0.0);
  double num = 0.0, den = 0.0;
  for (std::size_t c = 0; c < category_names.size(); ++c) {
    x[c] = static_cast<double>(met[c]) / static_cast<double>(category_weight[c]);
    num += category_weight[c] * remap(x[c]);
    den += category_weight[c];
  }
  return den > 0 ? 100.0 * num / den : 0.0;
}

std::vector<int> grade_constraints(const ScenarioInstance& inst, const Assignment& asg, const SpatialConfig& cfg) {
  validate_assignment(inst, asg);
  const EnvDigest digest = export_ground_truth_features(inst.scene, cfg);
  const Adjacency adj = seat_adjacency(inst.scene);
  std::vector<int> grades;
  grades.reserve(inst.constraint_count());
  for (const auto& p : inst.preferences) {
    if (p.category() == Category::embodied)
      grades.push_back(grade_embodied(p, *digest.find(asg.at(p.owner)), cfg));
    else
      grades.push_back(check_social(p, asg, adj, inst.cast));
  }
  for (const auto& c : inst.conflicts) grades.push_back(check_conflict(c, asg, adj));
  return grades;
}

ScoreReport score_instance(const ScenarioInstance& inst, const Assignment& asg, CategoryMode mode,
                           const SpatialConfig& cfg) {
  const auto grades = grade_constraints(inst, asg, cfg);
  const auto layout = ScoringLayout::build(inst, mode);
  ScoreReport r;
  r.instance_id = inst.id;
  r.mode = mode;
  std::vector<double> x;
  r.scaled_score = layout.scaled(grades, x);
  for (std::size_t c = 0; c < x.size(); ++c)
    r.per_category.push_back({layout.category_names[c], x[c], remap(x[c]), layout.category_weight[c]});
  for (std::size_t i = 0; i < inst.preferences.size(); ++i) {
    const auto& p = inst.preferences[i];
    r.per_constraint.push_back({ScenarioInstance::preference_ref(i), std::string(to_string(p.kind)),
                                layout.category_names[layout.category_of[i]], p.weight(), grades[i]});
  }
  for (std::size_t i = 0; i < inst.conflicts.size(); ++i) {
    const std::size_t k = inst.preferences.size() + i;
    r.per_constraint.push_back({ScenarioInstance::conflict_ref(i), std::string(to_string(inst.conflicts[i].kind)),
                                layout.category_names[layout.category_of[k]], inst.conflicts[i].weight(), grades[k]});
  }
  r.fully_satisfied = std::all_of(grades.begin(), grades.end(), [](int g) { return g == 1; });
  return r;
}

double prioritization_gap(const std::vector<ScoreReport>& reports) {
  long hi = 0, hi_met = 0, lo = 0, lo_met = 0;
  for (const auto& r : reports)
    for (const auto& g : r.per_constraint) {
      if (g.weight == 3) {
        ++hi;
        hi_met += g.grade;
      } else if (g.weight == 1) {
        ++lo;
        lo_met += g.grade;
      }
    }
  if (hi == 0) throw UndefinedMetricError("prioritization gap: no weight-3 constraints");
  if (lo == 0) throw UndefinedMetricError("prioritization gap: no weight-1 constraints");
  return 100.0 * static_cast<double>(hi_met) / static_cast<double>(hi) -
         100.0 * static_cast<double>(lo_met) / static_cast<double>(lo);
}

ReflectionReport reflect(const ScenarioInstance& inst, const Assignment& asg, const SpatialConfig& cfg) {
  validate_assignment(inst, asg);
  const Adjacency adj = seat_adjacency(inst.scene);
  ReflectionReport r;
  r.instance_id = inst.id;
  for (std::size_t i = 0; i < inst.preferences.size(); ++i) {
    const auto& p = inst.preferences[i];
    Judgement j = p.category() == Category::embodied
                      ? judge_embodied(p, inst.scene.seat(asg.at(p.owner)), inst.scene, cfg)
                      : judge_social(p, asg, adj, inst.cast, inst.scene);
    const Resident* owner = inst.cast.find(p.owner);
    r.annotations.push_back({ScenarioInstance::preference_ref(i), std::string(to_string(p.kind)),
                             std::string(to_string(p.category())), p.weight(), j.grade == 1, {p.owner},
                             (owner ? owner->name : p.owner) + ": " + j.reason});
  }
  for (std::size_t i = 0; i < inst.conflicts.size(); ++i) {
    const auto& c = inst.conflicts[i];
    Judgement j = judge_conflict(c, asg, adj, inst.cast, inst.scene);
    r.annotations.push_back({ScenarioInstance::conflict_ref(i), std::string(to_string(c.kind)), "conflict",
                             c.weight(), j.grade == 1, {c.a, c.b}, j.reason});
  }
  std::vector<const Annotation*> unmet;
  for (const auto& a : r.annotations)
    if (!a.satisfied) unmet.push_back(&a);
  std::sort(unmet.begin(), unmet.end(), [](const Annotation* a, const Annotation* b) {
    return a->weight != b->weight ? a->weight > b->weight : a->ref < b->ref;
  });
  for (const auto* a : unmet) r.unmet.push_back(a->ref);
  return r;
}

nlohmann::json score_report_to_json(const ScoreReport& r) {
  nlohmann::json pc = nlohmann::json::array(), cats = nlohmann::json::array();
  for (const auto& g : r.per_constraint)
    pc.push_back({{"ref", g.ref}, {"kind", g.kind}, {"category", g.category}, {"weight", g.weight}, {"grade", g.grade}});
  for (const auto& c : r.per_category)
    cats.push_back({{"category", c.category}, {"x", c.x}, {"remapped", c.remapped}, {"weight", c.weight}});
  return {{"schema_version", 1},
          {"instance_id", r.instance_id},
          {"category_mode", to_string(r.mode)},
          {"per_constraint", pc},
          {"per_category", cats},
          {"scaled_score", r.scaled_score},
          {"fully_satisfied", r.fully_satisfied}};
}

ScoreReport score_report_from_json(const nlohmann::json& j) {
  try {
    ScoreReport r;
    r.instance_id = j.at("instance_id").get<std::string>();
    r.mode = category_mode_from_string(j.at("category_mode").get<std::string>());
    for (const auto& g : j.at("per_constraint"))
      r.per_constraint.push_back({g.at("ref").get<std::string>(), g.at("kind").get<std::string>(),
                                  g.at("category").get<std::string>(), g.at("weight").get<int>(),
                                  g.at("grade").get<int>()});
    for (const auto& c : j.at("per_category"))
      r.per_category.push_back({c.at("category").get<std::string>(), c.at("x").get<double>(),
                                c.at("remapped").get<double>(), c.at("weight").get<int>()});
    r.scaled_score = j.at("scaled_score").get<double>();
    r.fully_satisfied = j.at("fully_satisfied").get<bool>();
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("score report: ") + e.what());
  }
}

nlohmann::json reflection_to_json(const ReflectionReport& r) {
  nlohmann::json ann = nlohmann::json::array();
  for (const auto& a : r.annotations)
    ann.push_back({{"ref", a.ref},
                   {"kind", a.kind},
                   {"category", a.category},
                   {"weight", a.weight},
                   {"satisfied", a.satisfied},
                   {"parties", a.parties},
                   {"reason", a.reason}});
  return {{"instance_id", r.instance_id}, {"annotations", ann}, {"unmet", r.unmet}};
}

ReflectionReport reflection_from_json(const nlohmann::json& j) {
  try {
    ReflectionReport r;
    r.instance_id = j.at("instance_id").get<std::string>();
    for (const auto& a : j.at("annotations"))
      r.annotations.push_back({a.at("ref").get<std::string>(), a.at("kind").get<std::string>(),
                               a.at("category").get<std::string>(), a.at("weight").get<int>(),
                               a.at("satisfied").get<bool>(), a.at("parties").get<std::vector<std::string>>(),
                               a.at("reason").get<std::string>()});
    r.unmet = j.at("unmet").get<std::vector<std::string>>();
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("reflection report: ") + e.what());
  }
}

std::string score_csv_header() {
  return "instance_id,category_mode,scaled_score,fully_satisfied,embodied,social,relation,group,topic,conflict";
}

std::string score_csv_row(const ScoreReport& r) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", r.scaled_score);
  std::string row = r.instance_id + "," + std::string(to_string(r.mode)) + "," + buf + "," +
                    (r.fully_satisfied ? "true" : "false");
  for (const char* name : {"embodied", "social", "relation", "group", "topic", "conflict"}) {
    row += ",";
    for (const auto& c : r.per_category)
      if (c.category == name) {
        std::snprintf(buf, sizeof buf, "%.6f", c.x);
        row += buf;
      }
  }
  return row;
}

}  // namespace seatplan
