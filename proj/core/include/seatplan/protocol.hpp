#pragma once

// Three-phase agent protocol (elicit, observe, decide) over line-delimited
// JSON messages, the built-in agents that speak it, and the transports.

#include <atomic>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "seatplan/config.hpp"
#include "seatplan/error.hpp"
#include "seatplan/model.hpp"
#include "seatplan/scenario.hpp"
#include "seatplan/scoring.hpp"
#include "seatplan/solvers.hpp"

namespace seatplan {

inline constexpr int kProtocolVersion = 1;

enum class Phase { elicit, observe, decide, done };
std::string_view to_string(Phase p);

/// Error carried back to the peer as an "error" message. The session it
/// concerns is left intact.
class ProtocolError : public Error {
 public:
  ProtocolError(std::string code, const std::string& what) : Error(what), code_(std::move(code)) {}
  const std::string& code() const noexcept { return code_; }

 private:
  std::string code_;
};

struct Budgets {
  int queries = 0;
  int views = 0;
  /// Proposals after the first one.
  int iterations = 0;
};

/// Unset fields take the defaults: queries 2x constraint count, views every
/// viewpoint x heading, iterations 10.
struct BudgetRequest {
  std::optional<int> queries, views, iterations;
};

Budgets default_budgets(const ScenarioInstance& inst);
/// Throws ProtocolError("invalid_budget") for non-positive explicit values.
Budgets resolve_budgets(const ScenarioInstance& inst, const BudgetRequest& req);

struct Proposal {
  Assignment assignment;
  ReflectionReport report;
};

class Session {
 public:
  Session(std::string id, std::shared_ptr<const ScenarioInstance> inst, PerceptionMode mode, Budgets budgets,
          SpatialConfig cfg = {});

  const std::string& id() const { return id_; }
  Phase phase() const { return phase_; }
  PerceptionMode mode() const { return mode_; }
  const Budgets& remaining() const { return remaining_; }
  const ScenarioInstance& instance() const { return *inst_; }
  const std::vector<std::pair<std::string, std::string>>& transcript() const { return transcript_; }
  const std::vector<std::string>& frames_seen() const { return frames_seen_; }
  const std::vector<Proposal>& proposals() const { return proposals_; }

  /// What the agent learns on opening: party cards, their relationships, the
  /// floor plan, budgets, and in gt_perception mode the full geometry digest.
  nlohmann::json opened_payload() const;

  /// Utterance for the slot-th constraint the NPC can tell about, or the
  /// sentinel past the end. Identical for repeated queries.
  std::string query_npc(const ResidentId& npc, int slot);
  ObservationFrame request_view(const std::string& viewpoint_id, int heading);
  ReflectionReport propose(const Assignment& asg);
  /// Scores `asg`, or the last proposal when absent. Ends the session.
  ScoreReport finalize(const std::optional<Assignment>& asg);

 private:
  /// Rejected messages leave the phase where it was.
  void require_phase(Phase p, std::string_view what) const;

  std::string id_;
  std::shared_ptr<const ScenarioInstance> inst_;
  PerceptionMode mode_;
  Budgets budgets_, remaining_;
  SpatialConfig cfg_;
  Phase phase_ = Phase::elicit;
  std::vector<std::pair<std::string, std::string>> transcript_;  // (npc:slot, utterance)
  std::vector<std::string> frames_seen_;
  std::vector<Proposal> proposals_;
};

/// Instances a server can open sessions on, by id.
class InstanceCatalog {
 public:
  void add(ScenarioInstance inst);
  /// Loads every *.json under `dir` (or dir/instances when present).
  void load_dir(const std::filesystem::path& dir);
  std::shared_ptr<const ScenarioInstance> find(const std::string& id) const;
  std::vector<std::string> ids() const;

 private:
  std::map<std::string, std::shared_ptr<const ScenarioInstance>> items_;
};

struct ServerOptions {
  SpatialConfig spatial;
  /// When set, every accepted request is appended to <dir>/<session>.jsonl
  /// and sessions found there are rebuilt on construction.
  std::optional<std::filesystem::path> journal_dir;
};

/// Dispatches protocol messages to sessions. Thread-safe; messages for one
/// session are handled one at a time.
class Server {
 public:
  explicit Server(std::shared_ptr<const InstanceCatalog> catalog, ServerOptions opts = {});

  /// One request in, one response out. Never throws for peer mistakes; those
  /// become "error" messages.
  nlohmann::json handle(const nlohmann::json& request);
  /// As handle, for a raw line; malformed JSON yields an error naming the
  /// byte offset.
  std::string handle_line(const std::string& line);

  /// Inspection for tests and the HTTP front end. Throws ProtocolError.
  std::shared_ptr<Session> session(const std::string& id) const;
  const InstanceCatalog& catalog() const { return *catalog_; }

 private:
  struct Slot {
    std::mutex mu;
    std::shared_ptr<Session> session;
    long last_seq = 0;
  };

  nlohmann::json dispatch(const nlohmann::json& request, bool replaying);
  nlohmann::json open(const nlohmann::json& request, bool replaying);
  void journal(const std::string& session, const nlohmann::json& request) const;
  void replay_journals();

  std::shared_ptr<const InstanceCatalog> catalog_;
  ServerOptions opts_;
  mutable std::mutex mu_;
  std::map<std::string, std::shared_ptr<Slot>> slots_;
  long next_session_ = 1;
};

nlohmann::json error_message(const std::string& session, long seq, const std::string& code,
                             const std::string& message, std::optional<std::size_t> byte_offset = {});

/// Sends one request and returns the response.
using Channel = std::function<nlohmann::json(const nlohmann::json&)>;

/// A channel into an in-process server that also records every exchanged
/// message, requests and responses alternating.
Channel recording_channel(Server& server, std::vector<nlohmann::json>* log);

struct AgentRun {
  std::string session;
  Assignment assignment;
  SolverTrace trace;
  ScoreReport report;   // from the finalize result
  int queries = 0;
  int frames = 0;
  std::vector<Preference> preferences;  // as parsed from the transcript
  std::vector<Conflict> conflicts;
};

/// Queries every NPC until the sentinel and parses what it hears, gathers
/// frames until every seat and every needed feature kind was seen (observed
/// mode), solves exactly up to cfg.solver.exact_seat_limit seats and by
/// local search above, then proposes once and finalizes.
AgentRun run_oracle_agent(const Channel& ch, const std::string& instance_id, PerceptionMode mode,
                          const Config& cfg = {});
/// Convenience: a private in-process server over `inst`.
AgentRun run_oracle_agent(const ScenarioInstance& inst, PerceptionMode mode = PerceptionMode::gt_perception,
                          const Config& cfg = {});

/// Same elicitation and observation as the oracle, then the propose/reflect
/// loop with RepairAgent against the protocol's reflection reports. The trace
/// records the evaluator's score of each proposal, which the agent never sees.
AgentRun run_repair_agent(const ScenarioInstance& inst, PerceptionMode mode, const Config& cfg = {});

/// Serves newline-delimited messages until EOF.
void serve_stream(Server& server, std::istream& in, std::ostream& out);

/// Unix-domain socket listener; one thread per connection. Returns when
/// `stop` becomes true (checked between accepts, about every 100 ms).
void serve_unix_socket(Server& server, const std::filesystem::path& path, const std::atomic<bool>& stop);

/// Hygiene findings for one message: "ground_truth" keys, numeric score fields
/// outside "result" messages, and objects mapping the whole party to its
/// ground-truth seats.
std::vector<std::string> scan_hygiene(const nlohmann::json& message, const GroundTruth* truth = nullptr);

}  // namespace seatplan
