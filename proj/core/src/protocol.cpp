#include "seatplan/protocol.hpp"

#include <poll.h>
#include <sys/socket.h>
#include <sys/un.h>
#include <unistd.h>

#include <algorithm>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <thread>

#include "seatplan/dialogue.hpp"
#include "seatplan/error.hpp"

namespace seatplan {

namespace {

constexpr std::array<std::string_view, 4> kPhaseNames = {"elicit", "observe", "decide", "done"};

const std::map<std::string, std::string> kResponseKind = {
    {"open_session", "opened"}, {"query_npc", "npc_utterance"}, {"request_view", "frame"},
    {"propose", "reflection"},  {"finalize", "result"},         {"resume", "resumed"},
};

nlohmann::json budgets_to_json(const Budgets& b) {
  return {{"queries", b.queries}, {"views", b.views}, {"iterations", b.iterations}};
}

std::string require_string(const nlohmann::json& payload, const char* key) {
  auto it = payload.find(key);
  if (it == payload.end() || !it->is_string())
    throw ProtocolError("malformed", std::string("payload needs a string '") + key + "'");
  return it->get<std::string>();
}

int require_int(const nlohmann::json& payload, const char* key) {
  auto it = payload.find(key);
  if (it == payload.end() || !it->is_number_integer())
    throw ProtocolError("malformed", std::string("payload needs an integer '") + key + "'");
  return it->get<int>();
}

Assignment payload_assignment(const nlohmann::json& payload) {
  auto it = payload.find("assignment");
  if (it == payload.end() || !it->is_object()) throw ProtocolError("malformed", "payload needs an 'assignment' object");
  try {
    return assignment_from_json(*it);
  } catch (const Error& e) {
    throw ProtocolError("malformed", e.what());
  }
}

nlohmann::json response(const std::string& session, long seq, const std::string& kind, nlohmann::json payload) {
  return {{"session", session}, {"seq", seq}, {"kind", kind}, {"payload", std::move(payload)}};
}

}  // namespace

std::string_view to_string(Phase p) { return kPhaseNames[static_cast<std::size_t>(p)]; }

Budgets default_budgets(const ScenarioInstance& inst) {
  Budgets b;
  b.queries = static_cast<int>(2 * inst.constraint_count());
  b.views = static_cast<int>(inst.scene.viewpoints.size()) * kHeadingCount;
  b.iterations = 10;
  return b;
}

Budgets resolve_budgets(const ScenarioInstance& inst, const BudgetRequest& req) {
  Budgets b = default_budgets(inst);
  auto take = [](const std::optional<int>& v, int& into, const char* name) {
    if (!v) return;
    if (*v <= 0) throw ProtocolError("invalid_budget", std::string(name) + " budget must be positive");
    into = *v;
  };
  take(req.queries, b.queries, "query");
  take(req.views, b.views, "view");
  take(req.iterations, b.iterations, "iteration");
  return b;
}

// ---------------------------------------------------------------------------

Session::Session(std::string id, std::shared_ptr<const ScenarioInstance> inst, PerceptionMode mode, Budgets budgets,
                 SpatialConfig cfg)
    : id_(std::move(id)), inst_(std::move(inst)), mode_(mode), budgets_(budgets), remaining_(budgets), cfg_(cfg) {
  if (budgets.queries <= 0 || budgets.views <= 0 || budgets.iterations <= 0)
    throw ProtocolError("invalid_budget", "budgets must be positive");
  if (mode_ == PerceptionMode::gt_perception) frames_seen_.push_back("*");
}

nlohmann::json Session::opened_payload() const {
  nlohmann::json party = nlohmann::json::array();
  for (const auto& id : inst_->party) party.push_back(resident_to_json(inst_->cast.resident(id)));
  nlohmann::json p = {{"protocol_version", kProtocolVersion},
                      {"session", id_},
                      {"instance_id", inst_->id},
                      {"level", inst_->level},
                      {"template", to_string(inst_->scene.template_id)},
                      {"mode", to_string(mode_)},
                      {"phase", to_string(phase_)},
                      {"party", party},
                      {"cast", world_to_json(inst_->cast)},
                      {"floor_plan", floor_plan_to_json(floor_plan(inst_->scene))},
                      {"budgets", budgets_to_json(budgets_)}};
  if (mode_ == PerceptionMode::gt_perception)
    p["digest"] = digest_to_json(export_ground_truth_features(inst_->scene, cfg_));
  return p;
}

void Session::require_phase(Phase p, std::string_view what) const {
  if (phase_ > p)
    throw ProtocolError("phase_violation",
                        std::string(what) + " is not allowed in the " + std::string(to_string(phase_)) + " phase");
}

std::string Session::query_npc(const ResidentId& npc, int slot) {
  if (phase_ != Phase::elicit)
    throw ProtocolError("phase_violation",
                        "query_npc is not allowed in the " + std::string(to_string(phase_)) + " phase");
  if (std::find(inst_->party.begin(), inst_->party.end(), npc) == inst_->party.end())
    throw ProtocolError("unknown_id", "no party member '" + npc + "'");
  if (remaining_.queries <= 0) throw ProtocolError("budget_exhausted", "query budget exhausted");
  --remaining_.queries;
  const auto slots = inst_->slots_of(npc);
  std::string text;
  if (slot < 0 || slot >= static_cast<int>(slots.size())) {
    text = builtin_utterance_pack().sentinel;
  } else {
    Rng rng(derive_seed(inst_->seed, fnv1a(npc.data(), npc.size()), static_cast<std::uint64_t>(slot)));
    text = render_utterance(slots[slot], npc, inst_->cast, rng);
  }
  transcript_.emplace_back(npc + ":" + std::to_string(slot), text);
  return text;
}

ObservationFrame Session::request_view(const std::string& viewpoint_id, int heading) {
  if (mode_ == PerceptionMode::gt_perception)
    throw ProtocolError("phase_violation", "the observe phase is already complete in gt_perception mode");
  require_phase(Phase::observe, "request_view");
  if (heading < 0 || heading >= kHeadingCount) throw ProtocolError("malformed", "heading must be in 0..7");
  if (remaining_.views <= 0) throw ProtocolError("budget_exhausted", "view budget exhausted");
  ObservationFrame f;
  try {
    f = viewpoint_observe(inst_->scene, viewpoint_id, heading, cfg_);
  } catch (const UnknownIdError& e) {
    throw ProtocolError("unknown_id", e.what());
  }
  phase_ = Phase::observe;
  --remaining_.views;
  frames_seen_.push_back(viewpoint_id + "@" + std::to_string(heading));
  return f;
}

ReflectionReport Session::propose(const Assignment& asg) {
  require_phase(Phase::decide, "propose");
  if (static_cast<int>(proposals_.size()) > budgets_.iterations)
    throw ProtocolError("budget_exhausted", "iteration budget exhausted");
  try {
    validate_assignment(*inst_, asg);
  } catch (const AssignmentError& e) {
    throw ProtocolError("invalid_assignment", e.what());
  }
  Proposal p{asg, reflect(*inst_, asg, cfg_)};
  phase_ = Phase::decide;
  proposals_.push_back(p);
  remaining_.iterations = budgets_.iterations + 1 - static_cast<int>(proposals_.size());
  return p.report;
}

ScoreReport Session::finalize(const std::optional<Assignment>& asg) {
  if (phase_ == Phase::done) throw ProtocolError("phase_violation", "the session is already finalized");
  if (!asg && proposals_.empty()) throw ProtocolError("no_proposal", "nothing to finalize");
  const Assignment& a = asg ? *asg : proposals_.back().assignment;
  ScoreReport r;
  try {
    r = score_instance(*inst_, a, CategoryMode::coarse, cfg_);
  } catch (const AssignmentError& e) {
    throw ProtocolError("invalid_assignment", e.what());
  }
  phase_ = Phase::done;
  return r;
}

// ---------------------------------------------------------------------------

void InstanceCatalog::add(ScenarioInstance inst) {
  auto id = inst.id;
  items_[id] = std::make_shared<const ScenarioInstance>(std::move(inst));
}

void InstanceCatalog::load_dir(const std::filesystem::path& dir) {
  namespace fs = std::filesystem;
  fs::path root = fs::is_directory(dir / "instances") ? dir / "instances" : dir;
  if (!fs::is_directory(root)) throw ParseError("no instance directory at " + dir.string());
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(root))
    if (e.is_regular_file() && e.path().extension() == ".json") files.push_back(e.path());
  std::sort(files.begin(), files.end());
  for (const auto& f : files) add(load_instance(f));
}

std::shared_ptr<const ScenarioInstance> InstanceCatalog::find(const std::string& id) const {
  auto it = items_.find(id);
  return it == items_.end() ? nullptr : it->second;
}

std::vector<std::string> InstanceCatalog::ids() const {
  std::vector<std::string> out;
  for (const auto& [id, _] : items_) out.push_back(id);
  return out;
}

// ---------------------------------------------------------------------------

nlohmann::json error_message(const std::string& session, long seq, const std::string& code,
                             const std::string& message, std::optional<std::size_t> byte_offset) {
  nlohmann::json p = {{"code", code}, {"message", message}};
  if (byte_offset) p["byte_offset"] = *byte_offset;
  return response(session, seq, "error", std::move(p));
}

Server::Server(std::shared_ptr<const InstanceCatalog> catalog, ServerOptions opts)
    : catalog_(std::move(catalog)), opts_(std::move(opts)) {
  if (opts_.journal_dir) {
    std::filesystem::create_directories(*opts_.journal_dir);
    replay_journals();
  }
}

std::shared_ptr<Session> Server::session(const std::string& id) const {
  std::lock_guard lock(mu_);
  auto it = slots_.find(id);
  if (it == slots_.end()) throw ProtocolError("unknown_session", "no session '" + id + "'");
  return it->second->session;
}

std::string Server::handle_line(const std::string& line) {
  nlohmann::json request;
  try {
    request = nlohmann::json::parse(line);
  } catch (const nlohmann::json::parse_error& e) {
    auto msg = error_message("", 0, "malformed", std::string("not valid JSON at byte ") + std::to_string(e.byte),
                             e.byte);
    msg["payload"]["line"] = line.substr(0, 200);
    return msg.dump();
  }
  return handle(request).dump();
}

nlohmann::json Server::handle(const nlohmann::json& request) { return dispatch(request, false); }

nlohmann::json Server::open(const nlohmann::json& request, bool replaying) {
  const long seq = request.value("seq", 0L);
  const nlohmann::json payload = request.value("payload", nlohmann::json::object());
  const auto instance_id = require_string(payload, "instance_id");
  auto inst = catalog_->find(instance_id);
  if (!inst) throw ProtocolError("unknown_id", "no instance '" + instance_id + "'");
  PerceptionMode mode = PerceptionMode::observed;
  if (payload.contains("mode")) {
    try {
      mode = perception_mode_from_string(payload.at("mode").get<std::string>());
    } catch (const std::exception& e) {
      throw ProtocolError("malformed", e.what());
    }
  }
  BudgetRequest req;
  if (auto b = payload.find("budgets"); b != payload.end() && b->is_object()) {
    for (auto [key, into] : {std::pair{"queries", &req.queries}, std::pair{"views", &req.views},
                             std::pair{"iterations", &req.iterations}})
      if (b->contains(key)) {
        if (!b->at(key).is_number_integer())
          throw ProtocolError("invalid_budget", std::string(key) + " budget must be an integer");
        *into = b->at(key).get<int>();
      }
  }
  const Budgets budgets = resolve_budgets(*inst, req);

  std::string id;
  auto slot = std::make_shared<Slot>();
  {
    std::lock_guard lock(mu_);
    if (replaying && request.contains("session")) {
      id = request.at("session").get<std::string>();
      if (id.size() > 1 && id[0] == 's') next_session_ = std::max(next_session_, std::stol(id.substr(1)) + 1);
    } else {
      id = "s" + std::to_string(next_session_++);
    }
    slot->session = std::make_shared<Session>(id, inst, mode, budgets, opts_.spatial);
    slot->last_seq = seq;
    slots_[id] = slot;
  }
  if (!replaying) {
    auto logged = request;
    logged["session"] = id;
    journal(id, logged);
  }
  return response(id, seq, "opened", slot->session->opened_payload());
}

nlohmann::json Server::dispatch(const nlohmann::json& request, bool replaying) {
  std::string session_id;
  long seq = 0;
  try {
    if (!request.is_object()) throw ProtocolError("malformed", "a message must be a JSON object");
    if (request.contains("session") && request["session"].is_string()) session_id = request["session"];
    auto seq_it = request.find("seq");
    if (seq_it == request.end() || !seq_it->is_number_integer())
      throw ProtocolError("malformed", "message needs an integer 'seq'");
    seq = seq_it->get<long>();
    auto kind_it = request.find("kind");
    if (kind_it == request.end() || !kind_it->is_string()) throw ProtocolError("malformed", "message needs a 'kind'");
    const std::string kind = *kind_it;
    if (!kResponseKind.count(kind)) throw ProtocolError("unknown_kind", "unknown message kind '" + kind + "'");
    const nlohmann::json payload = request.value("payload", nlohmann::json::object());
    if (!payload.is_object()) throw ProtocolError("malformed", "'payload' must be an object");

    if (kind == "open_session") {
      if (!replaying) session_id.clear();
      return open(request, replaying);
    }
    std::shared_ptr<Slot> slot;
    {
      std::lock_guard lock(mu_);
      auto it = slots_.find(session_id);
      if (it == slots_.end()) throw ProtocolError("unknown_session", "no session '" + session_id + "'");
      slot = it->second;
    }
    std::lock_guard lock(slot->mu);
    Session& s = *slot->session;
    if (kind == "resume")
      return response(session_id, seq, "resumed",
                      {{"phase", to_string(s.phase())},
                       {"last_seq", slot->last_seq},
                       {"remaining", budgets_to_json(s.remaining())},
                       {"opened", s.opened_payload()}});
    if (seq <= slot->last_seq)
      throw ProtocolError("bad_sequence", "seq " + std::to_string(seq) + " does not follow " +
                                              std::to_string(slot->last_seq));

    nlohmann::json out;
    if (kind == "query_npc") {
      const auto npc = require_string(payload, "npc");
      const int slot_index = require_int(payload, "slot");
      const auto text = s.query_npc(npc, slot_index);
      out = response(session_id, seq, "npc_utterance",
                     {{"npc", npc},
                      {"slot", slot_index},
                      {"text", text},
                      {"sentinel", is_sentinel(text)},
                      {"remaining_queries", s.remaining().queries}});
    } else if (kind == "request_view") {
      const auto vp = require_string(payload, "viewpoint");
      const int heading = require_int(payload, "heading");
      const auto frame = s.request_view(vp, heading);
      out = response(session_id, seq, "frame",
                     {{"frame", frame_to_json(frame)}, {"remaining_views", s.remaining().views}});
    } else if (kind == "propose") {
      const auto report = s.propose(payload_assignment(payload));
      out = response(session_id, seq, "reflection",
                     {{"iteration", static_cast<int>(s.proposals().size()) - 1},
                      {"reflection", reflection_to_json(report)},
                      {"remaining_iterations", s.remaining().iterations}});
    } else {
      std::optional<Assignment> asg;
      if (payload.contains("assignment")) asg = payload_assignment(payload);
      const auto report = s.finalize(asg);
      out = response(session_id, seq, "result", {{"report", score_report_to_json(report)}});
    }
    slot->last_seq = seq;
    if (!replaying) journal(session_id, request);
    return out;
  } catch (const ProtocolError& e) {
    return error_message(session_id, seq, e.code(), e.what());
  } catch (const std::exception& e) {
    return error_message(session_id, seq, "internal", e.what());
  }
}

void Server::journal(const std::string& session, const nlohmann::json& request) const {
  if (!opts_.journal_dir) return;
  std::ofstream out(*opts_.journal_dir / (session + ".jsonl"), std::ios::app);
  out << request.dump() << '\n';
}

void Server::replay_journals() {
  namespace fs = std::filesystem;
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(*opts_.journal_dir))
    if (e.path().extension() == ".jsonl") files.push_back(e.path());
  std::sort(files.begin(), files.end());
  for (const auto& f : files) {
    std::ifstream in(f);
    std::string line;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      auto r = dispatch(nlohmann::json::parse(line), true);
      if (r.at("kind") == "error")
        throw ParseError("journal " + f.string() + ": " + r["payload"]["message"].get<std::string>());
    }
  }
}

// ---------------------------------------------------------------------------

Channel recording_channel(Server& server, std::vector<nlohmann::json>* log) {
  return [&server, log](const nlohmann::json& req) {
    auto resp = server.handle(req);
    if (log) {
      log->push_back(req);
      log->push_back(resp);
    }
    return resp;
  };
}

namespace {

class Client {
 public:
  explicit Client(const Channel& ch) : ch_(ch) {}

  nlohmann::json send(const std::string& kind, nlohmann::json payload) {
    nlohmann::json req = {{"seq", ++seq_}, {"kind", kind}, {"payload", std::move(payload)}};
    if (!session_.empty()) req["session"] = session_;
    auto resp = ch_(req);
    if (resp.at("kind") == "error")
      throw ProtocolError(resp["payload"].value("code", "error"), resp["payload"].value("message", ""));
    if (kind == "open_session") session_ = resp.at("session").get<std::string>();
    return resp.at("payload");
  }
  const std::string& session() const { return session_; }

 private:
  const Channel& ch_;
  std::string session_;
  long seq_ = 0;
};

struct Perceived {
  ScenarioInstance local;  // rebuilt from what the agent was told
  EnvDigest digest;
  int queries = 0;
  int frames = 0;
  Budgets budgets;
};

Perceived perceive(Client& c, const std::string& instance_id, PerceptionMode mode, const Config& cfg) {
  const auto opened = c.send("open_session", {{"instance_id", instance_id}, {"mode", to_string(mode)}});
  Perceived out;
  out.local.id = instance_id;
  out.local.level = opened.at("level").get<int>();
  out.local.cast = world_from_json(opened.at("cast"));
  for (const auto& card : opened.at("party")) out.local.party.push_back(card.at("id").get<std::string>());
  out.budgets = {opened["budgets"]["queries"].get<int>(), opened["budgets"]["views"].get<int>(),
                 opened["budgets"]["iterations"].get<int>()};

  std::set<FeatureKind> needed;
  for (const auto& npc : out.local.party) {
    for (int slot = 0;; ++slot) {
      const auto r = c.send("query_npc", {{"npc", npc}, {"slot", slot}});
      ++out.queries;
      if (r.at("sentinel").get<bool>()) break;
      const auto parsed = parse_utterance(r.at("text").get<std::string>(), npc, out.local.cast);
      if (const auto* p = std::get_if<Preference>(&parsed)) {
        out.local.preferences.push_back(*p);
        if (auto f = feature_of(p->kind)) needed.insert(*f);
      } else {
        const auto& k = std::get<Conflict>(parsed);
        if (std::find(out.local.conflicts.begin(), out.local.conflicts.end(), k) == out.local.conflicts.end())
          out.local.conflicts.push_back(k);
      }
    }
  }

  if (mode == PerceptionMode::gt_perception) {
    out.digest = digest_from_json(opened.at("digest"));
    return out;
  }
  const FloorPlan plan = floor_plan_from_json(opened.at("floor_plan"));
  std::vector<ObservationFrame> frames;
  std::set<std::string> seats;
  std::set<FeatureKind> kinds;
  int views_left = out.budgets.views;
  for (const auto& vp : plan.viewpoints) {
    for (int h = 0; h < kHeadingCount && views_left > 0; ++h, --views_left) {
      const auto r = c.send("request_view", {{"viewpoint", vp.id}, {"heading", h}});
      frames.push_back(frame_from_json(r.at("frame")));
      for (const auto& s : frames.back().seats) seats.insert(s.id);
      for (const auto& f : frames.back().features)
        if (f.kind) kinds.insert(*f.kind);
    }
    const bool covered = seats.size() >= out.local.party.size() &&
                         std::includes(kinds.begin(), kinds.end(), needed.begin(), needed.end());
    if (covered || views_left <= 0) break;
  }
  out.frames = static_cast<int>(frames.size());
  out.digest = reconstruct_digest(plan, frames, cfg.spatial);
  return out;
}

ScoreReport read_result(const nlohmann::json& payload) { return score_report_from_json(payload.at("report")); }

}  // namespace

AgentRun run_oracle_agent(const Channel& ch, const std::string& instance_id, PerceptionMode mode, const Config& cfg) {
  Client c(ch);
  Perceived seen = perceive(c, instance_id, mode, cfg);
  const SeatingModel model(seen.local, seen.digest, cfg.spatial);

  AgentRun run;
  run.session = c.session();
  run.queries = seen.queries;
  run.frames = seen.frames;
  run.preferences = seen.local.preferences;
  run.conflicts = seen.local.conflicts;

  SolveResult solved;
  bool done = false;
  if (static_cast<int>(model.seat_count()) <= cfg.solver.exact_seat_limit) {
    try {
      solved = solve_exact(model, cfg.solver.exact_node_budget);
      done = true;
    } catch (const BudgetExhaustedError&) {
    }
  }
  if (!done) {
    Rng rng(fnv1a(instance_id.data(), instance_id.size()));
    solved = solve_local_search(model, cfg.solver.anneal, rng);
  }
  run.assignment = solved.assignment;
  run.trace = solved.trace;
  c.send("propose", {{"assignment", assignment_to_json(run.assignment)}});
  run.report = read_result(c.send("finalize", nlohmann::json::object()));
  return run;
}

AgentRun run_oracle_agent(const ScenarioInstance& inst, PerceptionMode mode, const Config& cfg) {
  auto catalog = std::make_shared<InstanceCatalog>();
  catalog->add(inst);
  Server server(catalog, {cfg.spatial, std::nullopt});
  return run_oracle_agent(recording_channel(server, nullptr), inst.id, mode, cfg);
}

AgentRun run_repair_agent(const ScenarioInstance& inst, PerceptionMode mode, const Config& cfg) {
  auto catalog = std::make_shared<InstanceCatalog>();
  catalog->add(inst);
  Server server(catalog, {cfg.spatial, std::nullopt});
  const Channel ch = recording_channel(server, nullptr);
  Client c(ch);
  Perceived seen = perceive(c, inst.id, mode, cfg);

  AgentRun run;
  run.session = c.session();
  run.queries = seen.queries;
  run.frames = seen.frames;
  run.preferences = seen.local.preferences;
  run.conflicts = seen.local.conflicts;

  RepairAgent agent(SeatingModel(seen.local, seen.digest, cfg.spatial));
  const Judge judge = [&](const Assignment& a) {
    nlohmann::json r;
    try {
      r = c.send("propose", {{"assignment", assignment_to_json(a)}});
    } catch (const ProtocolError& e) {
      if (e.code() == "invalid_assignment") throw AssignmentError(e.what());
      throw;
    }
    const double measured = score_instance(inst, a, CategoryMode::coarse, cfg.spatial).scaled_score;
    return std::make_pair(measured, reflection_from_json(r.at("reflection")));
  };
  run.trace = reflect_loop(agent, judge, std::min(cfg.solver.reflect_max_iters, seen.budgets.iterations),
                           &run.assignment);
  if (run.trace.steps.empty()) throw ProtocolError("aborted", "repair agent produced no valid proposal");
  run.report = read_result(c.send("finalize", {{"assignment", assignment_to_json(run.assignment)}}));
  return run;
}

// ---------------------------------------------------------------------------

void serve_stream(Server& server, std::istream& in, std::ostream& out) {
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    out << server.handle_line(line) << '\n' << std::flush;
  }
}

namespace {

void serve_connection(Server& server, int fd, const std::atomic<bool>& stop) {
  std::string buffer;
  char chunk[4096];
  while (!stop) {
    pollfd p{fd, POLLIN, 0};
    const int ready = ::poll(&p, 1, 100);
    if (ready < 0) break;
    if (ready == 0) continue;
    const ssize_t n = ::recv(fd, chunk, sizeof chunk, 0);
    if (n <= 0) break;
    buffer.append(chunk, static_cast<std::size_t>(n));
    std::size_t nl;
    while ((nl = buffer.find('\n')) != std::string::npos) {
      std::string line = buffer.substr(0, nl);
      buffer.erase(0, nl + 1);
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.empty()) continue;
      const std::string reply = server.handle_line(line) + "\n";
      std::size_t sent = 0;
      while (sent < reply.size()) {
        const ssize_t w = ::send(fd, reply.data() + sent, reply.size() - sent, MSG_NOSIGNAL);
        if (w <= 0) {
          ::close(fd);
          return;
        }
        sent += static_cast<std::size_t>(w);
      }
    }
  }
  ::close(fd);
}

}  // namespace

void serve_unix_socket(Server& server, const std::filesystem::path& path, const std::atomic<bool>& stop) {
  const int listener = ::socket(AF_UNIX, SOCK_STREAM, 0);
  if (listener < 0) throw Error(std::string("socket: ") + std::strerror(errno));
  sockaddr_un addr{};
  addr.sun_family = AF_UNIX;
  const std::string p = path.string();
  if (p.size() >= sizeof addr.sun_path) {
    ::close(listener);
    throw Error("socket path too long: " + p);
  }
  std::strncpy(addr.sun_path, p.c_str(), sizeof addr.sun_path - 1);
  ::unlink(p.c_str());
  if (::bind(listener, reinterpret_cast<sockaddr*>(&addr), sizeof addr) < 0 || ::listen(listener, 16) < 0) {
    const std::string err = std::strerror(errno);
    ::close(listener);
    throw Error("cannot listen on " + p + ": " + err);
  }
  std::vector<std::thread> workers;
  while (!stop) {
    pollfd pfd{listener, POLLIN, 0};
    if (::poll(&pfd, 1, 100) <= 0) continue;
    const int fd = ::accept(listener, nullptr, nullptr);
    if (fd < 0) continue;
    workers.emplace_back(serve_connection, std::ref(server), fd, std::cref(stop));
  }
  for (auto& w : workers) w.join();
  ::close(listener);
  ::unlink(p.c_str());
}

// ---------------------------------------------------------------------------

std::vector<std::string> scan_hygiene(const nlohmann::json& message, const GroundTruth* truth) {
  static const std::set<std::string> score_keys = {"scaled_score", "per_category", "remapped", "best_so_far"};
  const bool result = message.is_object() && message.value("kind", "") == "result";
  std::vector<std::string> findings;
  std::function<void(const nlohmann::json&, const std::string&)> walk = [&](const nlohmann::json& j,
                                                                           const std::string& path) {
    if (j.is_object()) {
      if (truth && !truth->assignment.empty()) {
        bool all = true;
        for (const auto& [r, seat] : truth->assignment) {
          auto it = j.find(r);
          if (it == j.end() || !it->is_string() || it->get<std::string>() != seat) {
            all = false;
            break;
          }
        }
        if (all) findings.push_back(path + ": ground-truth seating");
      }
      for (const auto& [key, value] : j.items()) {
        const std::string sub = path + "/" + key;
        if (key == "ground_truth") findings.push_back(sub + ": ground_truth field");
        if (!result && score_keys.count(key)) findings.push_back(sub + ": score outside a result message");
        walk(value, sub);
      }
    } else if (j.is_array()) {
      for (std::size_t i = 0; i < j.size(); ++i) walk(j[i], path + "/" + std::to_string(i));
    }
  };
  walk(message, "");
  return findings;
}

}  // namespace seatplan
