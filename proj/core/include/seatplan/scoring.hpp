#pragma once

// The automatic evaluator: weighted per-category fractions, the quintic remap,
// 0-100 scaling, prioritization gap and reflection reports.

#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "seatplan/config.hpp"
#include "seatplan/scenario.hpp"

namespace seatplan {

/// -10.87x^5 + 21.99x^4 - 12.65x^3 + 2.568x^2 - 0.045x, unclamped.
double remap_raw(double x);

/// remap_raw clamped to [0, 1]. Throws std::domain_error outside [0, 1].
double remap(double x);

/// coarse: embodied / social / conflict. fine: social split into relation,
/// group and topic.
enum class CategoryMode { coarse, fine };

std::string_view to_string(CategoryMode m);
CategoryMode category_mode_from_string(std::string_view s);

/// Which scoring category each constraint falls in, and its weight. Built
/// once per instance and shared by the evaluator and the solvers so that both
/// aggregate identically.
struct ScoringLayout {
  CategoryMode mode = CategoryMode::coarse;
  std::vector<std::string> category_names;  // categories present, fixed order
  std::vector<int> category_of;             // per constraint: preferences first, then conflicts
  std::vector<int> weight_of;
  std::vector<int> category_weight;         // sum of member weights

  static ScoringLayout build(const ScenarioInstance& inst, CategoryMode mode);

  /// Scaled 0-100 score for grades in constraint order.
  double scaled(const std::vector<int>& grades) const;
  /// Same, plus the per-category fractions.
  double scaled(const std::vector<int>& grades, std::vector<double>& x) const;
};

struct GradedConstraint {
  std::string ref;
  std::string kind;
  std::string category;  // reporting category under the chosen mode
  int weight = 1;
  int grade = 0;
};

struct CategoryScore {
  std::string category;
  double x = 0.0;
  double remapped = 0.0;
  int weight = 0;
};

struct ScoreReport {
  std::string instance_id;
  CategoryMode mode = CategoryMode::coarse;
  std::vector<GradedConstraint> per_constraint;
  std::vector<CategoryScore> per_category;
  double scaled_score = 0.0;
  bool fully_satisfied = false;
};

/// Grades of every constraint in instance order (preferences, then conflicts)
/// from the ground-truth geometry of the instance.
std::vector<int> grade_constraints(const ScenarioInstance& inst, const Assignment& asg, const SpatialConfig& cfg = {});

/// Throws AssignmentError unless asg is a bijection over the party.
ScoreReport score_instance(const ScenarioInstance& inst, const Assignment& asg,
                           CategoryMode mode = CategoryMode::coarse, const SpatialConfig& cfg = {});

/// Pooled satisfaction rate of weight-3 constraints minus that of weight-1
/// constraints, in percentage points. Throws UndefinedMetricError when either
/// pool is empty.
double prioritization_gap(const std::vector<ScoreReport>& reports);

struct Annotation {
  std::string ref;
  std::string kind;
  std::string category;  // embodied, social or conflict
  int weight = 1;
  bool satisfied = false;
  std::vector<ResidentId> parties;
  std::string reason;
};

struct ReflectionReport {
  std::string instance_id;
  std::vector<Annotation> annotations;  // instance order
  std::vector<std::string> unmet;       // refs, weight descending then ref
};

ReflectionReport reflect(const ScenarioInstance& inst, const Assignment& asg, const SpatialConfig& cfg = {});

nlohmann::json score_report_to_json(const ScoreReport& r);
ScoreReport score_report_from_json(const nlohmann::json& j);
nlohmann::json reflection_to_json(const ReflectionReport& r);
ReflectionReport reflection_from_json(const nlohmann::json& j);

std::string score_csv_header();
/// instance id, scaled score, fully satisfied, then x per category.
std::string score_csv_row(const ScoreReport& r);

}  // namespace seatplan
