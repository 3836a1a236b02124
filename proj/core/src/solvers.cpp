#include "seatplan/solvers.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>

#include <nlohmann/json.hpp>

#include "seatplan/error.hpp"

namespace seatplan {

namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

constexpr std::array<std::string_view, 6> kTerminationNames = {"converged", "iteration_limit", "budget",
                                                               "optimal",   "completed",       "aborted"};

int unmet_count(const SeatingModel& m, const Placement& p) {
  const auto g = m.grades(p);
  return static_cast<int>(std::count(g.begin(), g.end(), 0));
}

void push_step(SolverTrace& t, int iteration, const Assignment& a, double score, int unmet) {
  const double best = t.steps.empty() ? score : std::max(t.steps.back().best, score);
  t.steps.push_back({iteration, assignment_digest(a), score, best, unmet});
}

Placement greedy_placement(const SeatingModel& m, Rng& rng, bool weight_aware) {
  const int n = static_cast<int>(m.npc_count());
  const int seats = static_cast<int>(m.seat_count());
  if (seats < n) throw AssignmentError("fewer known seats than party members");
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  if (weight_aware) {
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
      if (m.npc_weight(a) != m.npc_weight(b)) return m.npc_weight(a) > m.npc_weight(b);
      return m.npcs()[a] < m.npcs()[b];
    });
  } else {
    rng.shuffle(order);
  }
  Placement p(n, -1);
  std::vector<int> occupant(seats, -1);
  for (int npc : order) {
    int best_seat = -1, best_gain = std::numeric_limits<int>::min();
    for (int s = 0; s < seats; ++s) {
      if (occupant[s] >= 0) continue;
      const int g = m.placement_gain(p, occupant, npc, s, !weight_aware);
      if (g > best_gain) {
        best_gain = g;
        best_seat = s;
      }
    }
    p[npc] = best_seat;
    occupant[best_seat] = npc;
  }
  return p;
}

}  // namespace

std::string_view to_string(Termination t) { return kTerminationNames[static_cast<std::size_t>(t)]; }

std::string assignment_digest(const Assignment& a) {
  std::string s;
  for (const auto& [r, seat] : a) s += r + "=" + seat + ";";
  char buf[24];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a(s.data(), s.size())));
  return buf;
}

SolveResult solve_exact(const SeatingModel& m, long node_budget) {
  const auto t0 = Clock::now();
  const int n = static_cast<int>(m.npc_count());
  const int seats = static_cast<int>(m.seat_count());
  if (seats < n) throw AssignmentError("fewer known seats than party members");
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return m.npc_weight(a) > m.npc_weight(b); });

  Placement p(n, -1), best_p;
  std::vector<char> taken(seats, 0);
  double best = -1.0;
  long nodes = 0;
  bool out_of_budget = false, perfect = false;
  const double ceiling = m.max_score();

  std::function<void(int)> dfs = [&](int depth) {
    if (out_of_budget || perfect) return;
    if (depth == n) {
      const double s = m.score(p);
      if (s > best) {
        best = s;
        best_p = p;
        if (best >= ceiling) perfect = true;
      }
      return;
    }
    const int npc = order[depth];
    std::vector<std::pair<double, int>> children;
    for (int s = 0; s < seats; ++s) {
      if (taken[s]) continue;
      p[npc] = s;
      children.emplace_back(m.bound(p), s);
      p[npc] = -1;
    }
    std::stable_sort(children.begin(), children.end(),
                     [](const auto& a, const auto& b) { return a.first > b.first; });
    for (const auto& [b, s] : children) {
      if (b <= best) break;
      if (++nodes > node_budget) {
        out_of_budget = true;
        return;
      }
      p[npc] = s;
      taken[s] = 1;
      dfs(depth + 1);
      taken[s] = 0;
      p[npc] = -1;
      if (out_of_budget || perfect) return;
    }
  };
  dfs(0);

  if (best_p.empty())
    throw BudgetExhaustedError("exact search: node budget of " + std::to_string(node_budget) +
                               " exhausted before any complete assignment");
  SolveResult r;
  r.assignment = m.to_assignment(best_p);
  r.score = best;
  r.trace.solver = "exact";
  r.trace.nodes = std::min(nodes, node_budget);
  r.trace.optimal = !out_of_budget;
  r.trace.termination = out_of_budget ? Termination::budget : Termination::optimal;
  push_step(r.trace, 0, r.assignment, best, unmet_count(m, best_p));
  r.trace.wall_ms = elapsed_ms(t0);
  return r;
}

Assignment solve_greedy(const SeatingModel& m, Rng& rng, bool weight_aware) {
  return m.to_assignment(greedy_placement(m, rng, weight_aware));
}

SolveResult solve_local_search(const SeatingModel& m, const AnnealConfig& schedule, Rng& rng) {
  const auto t0 = Clock::now();
  Placement p = greedy_placement(m, rng, true);
  const int seats = static_cast<int>(m.seat_count());
  std::vector<int> occupant(seats, -1);
  for (std::size_t i = 0; i < p.size(); ++i) occupant[p[i]] = static_cast<int>(i);

  auto swap_seats = [&](int s, int t) {
    const int a = occupant[s], b = occupant[t];
    if (a >= 0) p[a] = t;
    if (b >= 0) p[b] = s;
    std::swap(occupant[s], occupant[t]);
  };
  auto random_pair = [&](int& s, int& t) {
    s = static_cast<int>(rng.below(seats));
    t = static_cast<int>(rng.below(seats - 1));
    if (t >= s) ++t;
  };

  double current = m.score(p);
  SolveResult r;
  r.trace.solver = "anneal";
  Placement best_p = p;
  double best = current;
  push_step(r.trace, 0, m.to_assignment(p), current, unmet_count(m, p));

  if (seats >= 2) {
    double temperature;
    if (schedule.initial_temperature) {
      temperature = *schedule.initial_temperature;
    } else {
      double sum = 0.0;
      for (int k = 0; k < schedule.calibration_swaps; ++k) {
        int s, t;
        random_pair(s, t);
        swap_seats(s, t);
        sum += std::abs(m.score(p) - current);
        swap_seats(s, t);
      }
      temperature = schedule.calibration_swaps > 0 ? sum / schedule.calibration_swaps : 0.0;
    }
    for (long move = 1; move <= schedule.move_budget; ++move) {
      int s, t;
      random_pair(s, t);
      const double u = rng.unit();
      swap_seats(s, t);
      const double next = m.score(p);
      const double delta = next - current;
      const bool accept = delta >= 0.0 || (temperature > 0.0 && u < std::exp(delta / temperature));
      if (accept) {
        current = next;
        if (current > best) {
          best = current;
          best_p = p;
          push_step(r.trace, static_cast<int>(move), m.to_assignment(p), current, unmet_count(m, p));
        }
      } else {
        swap_seats(s, t);
      }
      temperature *= schedule.cooling;
      r.trace.moves = move;
      if (best >= m.max_score()) break;
    }
  }
  r.assignment = m.to_assignment(best_p);
  r.score = best;
  r.trace.termination = Termination::budget;
  if (best >= m.max_score()) r.trace.termination = Termination::optimal;
  r.trace.optimal = best >= m.max_score();
  r.trace.wall_ms = elapsed_ms(t0);
  return r;
}

Assignment RepairAgent::propose(const ProposalContext& ctx) {
  if (!ctx.previous) {
    Rng unused(0);
    return solve_greedy(model_, unused, true);
  }
  Placement p = model_.from_assignment(*ctx.previous);
  const int seats = static_cast<int>(model_.seat_count());
  std::vector<int> occupant(seats, -1);
  for (std::size_t i = 0; i < p.size(); ++i) occupant[p[i]] = static_cast<int>(i);
  const double current = model_.score(p);

  std::vector<const Annotation*> unmet;
  if (ctx.report)
    for (const auto& ref : ctx.report->unmet)
      for (const auto& a : ctx.report->annotations)
        if (a.ref == ref) unmet.push_back(&a);

  for (const Annotation* a : unmet) {
    double best = current;
    int best_s = -1, best_t = -1;
    for (const auto& party : a->parties) {
      auto it = std::find(model_.npcs().begin(), model_.npcs().end(), party);
      if (it == model_.npcs().end()) continue;
      const int s = p[it - model_.npcs().begin()];
      for (int t = 0; t < seats; ++t) {
        if (t == s) continue;
        const int x = occupant[s], y = occupant[t];
        p[x] = t;
        if (y >= 0) p[y] = s;
        const double v = model_.score(p);
        p[x] = s;
        if (y >= 0) p[y] = t;
        if (v > best) {
          best = v;
          best_s = s;
          best_t = t;
        }
      }
    }
    if (best_s >= 0) {
      const int x = occupant[best_s], y = occupant[best_t];
      p[x] = best_t;
      if (y >= 0) p[y] = best_s;
      return model_.to_assignment(p);
    }
  }
  return *ctx.previous;
}

SolverTrace reflect_loop(Proposer& agent, const Judge& judge, int max_iters, Assignment* final_assignment) {
  const auto t0 = Clock::now();
  SolverTrace trace;
  trace.solver = "reflect";
  Assignment prev;
  ReflectionReport prev_report;

  // One retry after an invalid proposal, then give up.
  auto attempt = [&](const ProposalContext& ctx, Assignment& out, std::pair<double, ReflectionReport>& judged) {
    for (int tries = 0; tries < 2; ++tries) {
      out = agent.propose(ctx);
      try {
        judged = judge(out);
        return true;
      } catch (const AssignmentError&) {
        ++trace.invalid_proposals;
      }
    }
    return false;
  };

  Assignment a;
  std::pair<double, ReflectionReport> judged;
  if (!attempt({0, nullptr, nullptr}, a, judged)) {
    trace.termination = Termination::aborted;
    trace.wall_ms = elapsed_ms(t0);
    return trace;
  }
  push_step(trace, 0, a, judged.first, static_cast<int>(judged.second.unmet.size()));
  prev = a;
  prev_report = judged.second;
  trace.termination = Termination::iteration_limit;
  for (int it = 1; it <= max_iters; ++it) {
    trace.iterations = it;
    if (!attempt({it, &prev, &prev_report}, a, judged)) {
      trace.termination = Termination::aborted;
      break;
    }
    if (a == prev) {
      trace.termination = Termination::converged;
      break;
    }
    push_step(trace, it, a, judged.first, static_cast<int>(judged.second.unmet.size()));
    prev = a;
    prev_report = judged.second;
  }
  if (final_assignment) *final_assignment = prev;
  trace.wall_ms = elapsed_ms(t0);
  return trace;
}

Judge evaluator_judge(const ScenarioInstance& inst, const SpatialConfig& cfg) {
  return [&inst, cfg](const Assignment& a) {
    auto report = score_instance(inst, a, CategoryMode::coarse, cfg);
    return std::make_pair(report.scaled_score, reflect(inst, a, cfg));
  };
}

nlohmann::json trace_to_json(const SolverTrace& t) {
  nlohmann::json steps = nlohmann::json::array();
  for (const auto& s : t.steps)
    steps.push_back({{"iteration", s.iteration},
                     {"assignment_digest", s.assignment_digest},
                     {"scaled_score", s.score},
                     {"best_so_far", s.best},
                     {"unmet", s.unmet}});
  return {{"solver", t.solver},
          {"steps", steps},
          {"wall_ms", t.wall_ms},
          {"nodes", t.nodes},
          {"moves", t.moves},
          {"iterations", t.iterations},
          {"invalid_proposals", t.invalid_proposals},
          {"termination", to_string(t.termination)},
          {"optimal", t.optimal}};
}

SolverTrace trace_from_json(const nlohmann::json& j) {
  try {
    SolverTrace t;
    t.solver = j.at("solver").get<std::string>();
    for (const auto& s : j.at("steps"))
      t.steps.push_back({s.at("iteration").get<int>(), s.at("assignment_digest").get<std::string>(),
                         s.at("scaled_score").get<double>(), s.at("best_so_far").get<double>(),
                         s.at("unmet").get<int>()});
    t.wall_ms = j.at("wall_ms").get<double>();
    t.nodes = j.at("nodes").get<long>();
    t.moves = j.at("moves").get<long>();
    t.iterations = j.at("iterations").get<int>();
    t.invalid_proposals = j.at("invalid_proposals").get<int>();
    const auto term = j.at("termination").get<std::string>();
    for (std::size_t i = 0; i < kTerminationNames.size(); ++i)
      if (kTerminationNames[i] == term) t.termination = static_cast<Termination>(i);
    t.optimal = j.at("optimal").get<bool>();
    return t;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("trace: ") + e.what());
  }
}

}  // namespace seatplan
