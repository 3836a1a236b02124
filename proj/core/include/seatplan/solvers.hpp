#pragma once

// Exact branch-and-bound, greedy seeding, simulated annealing and the
// propose/reflect loop.

#include <functional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "seatplan/config.hpp"
#include "seatplan/model.hpp"
#include "seatplan/rng.hpp"
#include "seatplan/scoring.hpp"

namespace seatplan {

enum class Termination { converged, iteration_limit, budget, optimal, completed, aborted };
std::string_view to_string(Termination t);

struct TraceStep {
  int iteration = 0;
  std::string assignment_digest;
  double score = 0.0;
  double best = 0.0;  // best-so-far, non-decreasing
  int unmet = 0;
};

struct SolverTrace {
  std::string solver;
  std::vector<TraceStep> steps;
  double wall_ms = 0.0;
  long nodes = 0;
  long moves = 0;
  int iterations = 0;  // reflect loop: proposals after the first
  int invalid_proposals = 0;
  Termination termination = Termination::completed;
  bool optimal = false;
};

struct SolveResult {
  Assignment assignment;
  double score = 0.0;  // under the model
  SolverTrace trace;
};

/// Short stable hash of an assignment.
std::string assignment_digest(const Assignment& a);

/// Branch-and-bound with the optimistic bound of SeatingModel::bound. Optimal
/// when trace.optimal is set; otherwise the node budget ran out and the
/// incumbent is returned. Throws BudgetExhaustedError if no complete
/// assignment was reached.
SolveResult solve_exact(const SeatingModel& m, long node_budget);

/// Weight-aware: NPCs by descending constraint weight, each to the seat with
/// the largest weighted gain (ties to the lower seat index). Weight-blind:
/// random NPC order, every constraint weighs 1.
Assignment solve_greedy(const SeatingModel& m, Rng& rng, bool weight_aware = true);

/// Swap-move simulated annealing from the weight-aware greedy assignment.
SolveResult solve_local_search(const SeatingModel& m, const AnnealConfig& schedule, Rng& rng);

struct ProposalContext {
  int iteration = 0;
  const Assignment* previous = nullptr;
  const ReflectionReport* report = nullptr;
};

/// Anything that can propose seatings from reflection feedback.
class Proposer {
 public:
  virtual ~Proposer() = default;
  virtual Assignment propose(const ProposalContext& ctx) = 0;
};

/// Starts from weight-aware greedy on its model, then repairs the
/// highest-weight unmet constraint that some single swap improves under the
/// model. Proposes the previous assignment again when nothing helps.
class RepairAgent : public Proposer {
 public:
  explicit RepairAgent(SeatingModel model) : model_(std::move(model)) {}
  Assignment propose(const ProposalContext& ctx) override;
  const SeatingModel& model() const { return model_; }

 private:
  SeatingModel model_;
};

/// The judge scores and annotates a proposal; it throws AssignmentError for
/// proposals that are not bijections.
using Judge = std::function<std::pair<double, ReflectionReport>(const Assignment&)>;

/// Iterates propose -> judge until the proposal repeats or `max_iters`
/// further proposals were made. An invalid proposal is retried once, then the
/// loop aborts. `final_assignment`, when given, receives the last valid
/// proposal.
SolverTrace reflect_loop(Proposer& agent, const Judge& judge, int max_iters, Assignment* final_assignment = nullptr);

/// Judge backed by score_instance and reflect.
Judge evaluator_judge(const ScenarioInstance& inst, const SpatialConfig& cfg = {});

nlohmann::json trace_to_json(const SolverTrace& t);
SolverTrace trace_from_json(const nlohmann::json& j);

}  // namespace seatplan
