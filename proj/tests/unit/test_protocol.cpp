#include <gtest/gtest.h>

#include <sys/socket.h>
#include <sys/un.h>
#include <unistd.h>

#include <algorithm>
#include <cstring>
#include <chrono>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>

#include "fixtures.hpp"
#include "seatplan/dialogue.hpp"
#include "seatplan/protocol.hpp"

using namespace seatplan;
using nlohmann::json;
using seatplan::test::generated;

namespace {

struct Fixture {
  Generated small = generated(8);   // template A
  Generated large = generated(70);  // template E
  std::shared_ptr<InstanceCatalog> catalog = std::make_shared<InstanceCatalog>();

  Fixture() {
    catalog->add(small.instance);
    catalog->add(large.instance);
  }
};

Fixture& fx() {
  static Fixture f;
  return f;
}

json msg(const std::string& session, long seq, const std::string& kind, json payload = json::object()) {
  return {{"session", session}, {"seq", seq}, {"kind", kind}, {"payload", std::move(payload)}};
}

json open(Server& server, const std::string& id, const std::string& mode = "observed", json budgets = nullptr) {
  json p = {{"instance_id", id}, {"mode", mode}};
  if (!budgets.is_null()) p["budgets"] = budgets;
  return server.handle({{"seq", 1}, {"kind", "open_session"}, {"payload", p}});
}

std::string error_code(const json& r) { return r.at("kind") == "error" ? r["payload"].value("code", "") : ""; }

}  // namespace

TEST(Budgets, DefaultsAndValidation) {
  const auto& inst = fx().large.instance;
  auto b = default_budgets(inst);
  EXPECT_EQ(b.queries, 2 * static_cast<int>(inst.constraint_count()));
  EXPECT_EQ(b.views, static_cast<int>(inst.scene.viewpoints.size()) * kHeadingCount);
  EXPECT_EQ(b.iterations, 10);
  EXPECT_EQ(resolve_budgets(inst, {3, std::nullopt, std::nullopt}).queries, 3);
  EXPECT_THROW(resolve_budgets(inst, {0, std::nullopt, std::nullopt}), ProtocolError);
  EXPECT_THROW(resolve_budgets(inst, {std::nullopt, -1, std::nullopt}), ProtocolError);
}

TEST(Session, ObservedStartsEmptyInElicit) {
  Session s("s1", std::make_shared<ScenarioInstance>(fx().small.instance), PerceptionMode::observed,
            default_budgets(fx().small.instance));
  EXPECT_EQ(s.phase(), Phase::elicit);
  EXPECT_TRUE(s.transcript().empty());
  EXPECT_TRUE(s.frames_seen().empty());
  EXPECT_FALSE(s.opened_payload().contains("digest"));
}

TEST(Session, GroundTruthModeShipsTheDigest) {
  Session s("s1", std::make_shared<ScenarioInstance>(fx().small.instance), PerceptionMode::gt_perception,
            default_budgets(fx().small.instance));
  EXPECT_EQ(s.phase(), Phase::elicit);
  auto p = s.opened_payload();
  ASSERT_TRUE(p.contains("digest"));
  EXPECT_EQ(p["digest"]["seats"].size(), fx().small.instance.scene.seats.size());
  EXPECT_THROW(s.request_view(fx().small.instance.scene.viewpoints[0].id, 0), ProtocolError);
}

TEST(Session, SlotsThenSentinelAndRepeatsVerbatim) {
  const auto& inst = fx().large.instance;
  Session s("s1", std::make_shared<ScenarioInstance>(inst), PerceptionMode::observed, default_budgets(inst));
  const auto& npc = inst.party[0];
  const auto slots = inst.slots_of(npc);
  std::set<std::string> texts;
  for (std::size_t i = 0; i < slots.size(); ++i) texts.insert(s.query_npc(npc, static_cast<int>(i)));
  EXPECT_EQ(texts.size(), slots.size());
  EXPECT_TRUE(is_sentinel(s.query_npc(npc, static_cast<int>(slots.size()))));
  const auto first = s.query_npc(npc, 1);
  EXPECT_EQ(s.query_npc(npc, 1), first);
  EXPECT_THROW(s.query_npc("nobody", 0), ProtocolError);
}

TEST(Session, QueryBudgetIsEnforced) {
  const auto& inst = fx().small.instance;
  Session s("s1", std::make_shared<ScenarioInstance>(inst), PerceptionMode::observed, {2, 5, 1});
  s.query_npc(inst.party[0], 0);
  s.query_npc(inst.party[0], 9);  // sentinel still costs
  try {
    s.query_npc(inst.party[1], 0);
    FAIL();
  } catch (const ProtocolError& e) {
    EXPECT_EQ(e.code(), "budget_exhausted");
  }
}

TEST(Session, PhasesOnlyMoveForward) {
  const auto& inst = fx().small.instance;
  Session s("s1", std::make_shared<ScenarioInstance>(inst), PerceptionMode::observed, default_budgets(inst));
  s.query_npc(inst.party[0], 0);
  s.request_view(inst.scene.viewpoints[0].id, 0);
  EXPECT_EQ(s.phase(), Phase::observe);
  try {
    s.query_npc(inst.party[0], 0);
    FAIL();
  } catch (const ProtocolError& e) {
    EXPECT_EQ(e.code(), "phase_violation");
  }
  s.propose(fx().small.truth.assignment);
  EXPECT_EQ(s.phase(), Phase::decide);
  EXPECT_THROW(s.request_view(inst.scene.viewpoints[0].id, 1), ProtocolError);
  auto r = s.finalize(std::nullopt);
  EXPECT_EQ(s.phase(), Phase::done);
  EXPECT_NEAR(r.scaled_score, 99.3, 0.05);
  EXPECT_THROW(s.propose(fx().small.truth.assignment), ProtocolError);
}

TEST(Session, IterationBudgetAllowsOneExtraProposal) {
  const auto& inst = fx().small.instance;
  Session s("s1", std::make_shared<ScenarioInstance>(inst), PerceptionMode::gt_perception, {10, 10, 2});
  for (int i = 0; i < 3; ++i) s.propose(fx().small.truth.assignment);
  EXPECT_THROW(s.propose(fx().small.truth.assignment), ProtocolError);
  EXPECT_EQ(s.proposals().size(), 3u);
}

TEST(Session, FinalizeWithoutProposalFails) {
  const auto& inst = fx().small.instance;
  Session s("s1", std::make_shared<ScenarioInstance>(inst), PerceptionMode::observed, default_budgets(inst));
  try {
    s.finalize(std::nullopt);
    FAIL();
  } catch (const ProtocolError& e) {
    EXPECT_EQ(e.code(), "no_proposal");
  }
}

TEST(Session, InvalidProposalIsRejected) {
  const auto& inst = fx().small.instance;
  Session s("s1", std::make_shared<ScenarioInstance>(inst), PerceptionMode::observed, default_budgets(inst));
  auto asg = fx().small.truth.assignment;
  asg.erase(asg.begin());
  try {
    s.propose(asg);
    FAIL();
  } catch (const ProtocolError& e) {
    EXPECT_EQ(e.code(), "invalid_assignment");
  }
}

TEST(Server, SessionsAreIndependent) {
  Server server(fx().catalog);
  auto a = open(server, fx().small.instance.id);
  auto b = open(server, fx().small.instance.id);
  EXPECT_EQ(a.at("session"), "s1");
  EXPECT_EQ(b.at("session"), "s2");
  server.handle(msg("s1", 2, "query_npc", {{"npc", fx().small.instance.party[0]}, {"slot", 0}}));
  EXPECT_EQ(server.session("s1")->transcript().size(), 1u);
  EXPECT_TRUE(server.session("s2")->transcript().empty());
}

TEST(Server, ErrorsKeepTheSessionAlive) {
  Server server(fx().catalog);
  open(server, fx().small.instance.id);
  const auto npc = fx().small.instance.party[0];
  EXPECT_EQ(error_code(server.handle(msg("s1", 2, "propose", {{"assignment", json::object()}}))), "invalid_assignment");
  EXPECT_EQ(error_code(server.handle(msg("s1", 2, "request_view", {{"viewpoint", "nowhere"}, {"heading", 0}}))), "unknown_id");
  EXPECT_EQ(server.session("s1")->phase(), Phase::elicit);
  EXPECT_EQ(error_code(server.handle(msg("s1", 2, "teleport"))), "unknown_kind");
  EXPECT_EQ(error_code(server.handle(msg("s9", 2, "query_npc", {{"npc", npc}, {"slot", 0}}))), "unknown_session");
  EXPECT_EQ(error_code(server.handle(msg("s1", 2, "query_npc", {{"npc", "ghost"}, {"slot", 0}}))), "unknown_id");
  EXPECT_EQ(error_code(server.handle(msg("s1", 2, "query_npc", {{"npc", npc}}))), "malformed");
  auto ok = server.handle(msg("s1", 2, "query_npc", {{"npc", npc}, {"slot", 0}}));
  EXPECT_EQ(ok.at("kind"), "npc_utterance");
  EXPECT_EQ(error_code(server.handle(msg("s1", 2, "query_npc", {{"npc", npc}, {"slot", 1}}))), "bad_sequence");
  EXPECT_EQ(error_code(server.handle(msg("s1", 1, "query_npc", {{"npc", npc}, {"slot", 1}}))), "bad_sequence");
  EXPECT_EQ(server.handle(msg("s1", 7, "query_npc", {{"npc", npc}, {"slot", 1}})).at("kind"), "npc_utterance");
}

TEST(Server, ProposeDuringElicitIsAllowedButViewAfterIsNot) {
  Server server(fx().catalog);
  open(server, fx().small.instance.id);
  auto r = server.handle(msg("s1", 2, "propose", {{"assignment", assignment_to_json(fx().small.truth.assignment)}}));
  EXPECT_EQ(r.at("kind"), "reflection");
  auto v = server.handle(msg("s1", 3, "request_view", {{"viewpoint", fx().small.instance.scene.viewpoints[0].id}, {"heading", 0}}));
  EXPECT_EQ(error_code(v), "phase_violation");
}

TEST(Server, GroundTruthModeRejectsViews) {
  Server server(fx().catalog);
  open(server, fx().small.instance.id, "gt_perception");
  auto v = server.handle(msg("s1", 2, "request_view", {{"viewpoint", fx().small.instance.scene.viewpoints[0].id}, {"heading", 0}}));
  EXPECT_EQ(error_code(v), "phase_violation");
}

TEST(Server, InvalidBudgetOnOpen) {
  Server server(fx().catalog);
  EXPECT_EQ(error_code(open(server, fx().small.instance.id, "observed", {{"queries", 0}})), "invalid_budget");
  EXPECT_EQ(error_code(open(server, fx().small.instance.id, "observed", {{"views", "many"}})), "invalid_budget");
  EXPECT_EQ(error_code(open(server, "L99-999")), "unknown_id");
}

TEST(Server, MalformedLineNamesByteOffset) {
  Server server(fx().catalog);
  auto r = json::parse(server.handle_line(R"({"seq": 1, "kind": open_session})"));
  EXPECT_EQ(r.at("kind"), "error");
  EXPECT_EQ(r["payload"]["code"], "malformed");
  ASSERT_TRUE(r["payload"].contains("byte_offset"));
  EXPECT_EQ(r["payload"]["byte_offset"].get<int>(), 20);
  EXPECT_EQ(json::parse(server.handle_line("[1,2]"))["payload"]["code"], "malformed");
}

TEST(Server, ResponsesAreDeterministic) {
  auto run = [] {
    Server server(fx().catalog);
    std::vector<json> log;
    run_oracle_agent(recording_channel(server, &log), fx().large.instance.id, PerceptionMode::observed);
    return log;
  };
  EXPECT_EQ(run(), run());
}

TEST(OracleAgent, TranscriptRecoversTheConstraintMultiset) {
  for (int level : {3, 25, 48, 70}) {
    auto g = generated(level);
    auto run = run_oracle_agent(g.instance, PerceptionMode::gt_perception);
    auto prefs = run.preferences, want = g.instance.preferences;
    auto key = [](const Preference& p) { return preference_to_json(p).dump(); };
    auto sorted = [&](std::vector<Preference> v) {
      std::vector<std::string> k;
      for (const auto& p : v) k.push_back(key(p));
      std::sort(k.begin(), k.end());
      return k;
    };
    EXPECT_EQ(sorted(prefs), sorted(want));
    std::vector<std::string> got_c, want_c;
    for (const auto& c : run.conflicts) got_c.push_back(conflict_to_json(canonical(c)).dump());
    for (const auto& c : g.instance.conflicts) want_c.push_back(conflict_to_json(canonical(c)).dump());
    std::sort(got_c.begin(), got_c.end());
    std::sort(want_c.begin(), want_c.end());
    EXPECT_EQ(got_c, want_c);
  }
}

TEST(OracleAgent, SolvesSmallInstancesPerfectly) {
  for (int level = 1; level <= 42; level += 5) {
    auto run = run_oracle_agent(generated(level).instance, PerceptionMode::gt_perception);
    EXPECT_NEAR(run.report.scaled_score, 99.3, 0.05);
    EXPECT_EQ(run.frames, 0);
  }
}

TEST(OracleAgent, ObservedModeUsesFrames) {
  auto run = run_oracle_agent(fx().large.instance, PerceptionMode::observed);
  EXPECT_GE(run.frames, 1);
  EXPECT_LE(run.frames, default_budgets(fx().large.instance).views);
  EXPECT_GT(run.report.scaled_score, 0.0);
}

TEST(Hygiene, ObservedTranscriptIsClean) {
  Server server(fx().catalog);
  std::vector<json> log;
  run_oracle_agent(recording_channel(server, &log), fx().large.instance.id, PerceptionMode::observed);
  ASSERT_FALSE(log.empty());
  for (const auto& m : log) {
    auto findings = scan_hygiene(m, &fx().large.truth);
    EXPECT_TRUE(findings.empty()) << m.value("kind", "") << ": " << findings.front();
  }
}

TEST(Hygiene, ScannerCatchesLeaks) {
  json leak = msg("s1", 3, "reflection", {{"scaled_score", 50.0}});
  EXPECT_FALSE(scan_hygiene(leak).empty());
  json result = msg("s1", 3, "result", {{"report", {{"scaled_score", 50.0}}}});
  EXPECT_TRUE(scan_hygiene(result).empty());
  json gt = msg("s1", 3, "frame", {{"ground_truth", 1}});
  EXPECT_FALSE(scan_hygiene(gt).empty());
  json seats = msg("s1", 3, "frame", {{"x", assignment_to_json(fx().small.truth.assignment)}});
  EXPECT_FALSE(scan_hygiene(seats, &fx().small.truth).empty());
}

TEST(Transport, StreamMatchesInProcessRun) {
  Server recorder(fx().catalog);
  std::vector<json> log;
  auto direct = run_oracle_agent(recording_channel(recorder, &log), fx().large.instance.id, PerceptionMode::observed);
  std::ostringstream requests;
  for (std::size_t i = 0; i < log.size(); i += 2) requests << log[i].dump() << '\n';
  requests << "{oops\n";

  Server streamed(fx().catalog);
  std::istringstream in(requests.str());
  std::ostringstream out;
  serve_stream(streamed, in, out);
  std::istringstream lines(out.str());
  std::string line;
  std::vector<json> responses;
  while (std::getline(lines, line)) responses.push_back(json::parse(line));
  ASSERT_EQ(responses.size(), log.size() / 2 + 1);
  for (std::size_t i = 0; i + 1 < responses.size(); ++i) EXPECT_EQ(responses[i], log[2 * i + 1]);
  EXPECT_EQ(responses.back()["payload"]["code"], "malformed");
  EXPECT_EQ(responses[responses.size() - 2]["payload"]["report"]["scaled_score"], direct.report.scaled_score);
}

TEST(Transport, JournalResumesAfterRestart) {
  auto dir = seatplan::test::temp_dir("journal");
  const auto npc = fx().small.instance.party[0];
  std::string first_text;
  {
    Server server(fx().catalog, {{}, dir});
    open(server, fx().small.instance.id);
    first_text = server.handle(msg("s1", 2, "query_npc", {{"npc", npc}, {"slot", 0}}))["payload"]["text"];
  }
  Server restarted(fx().catalog, {{}, dir});
  auto r = restarted.handle(msg("s1", 3, "resume"));
  ASSERT_EQ(r.at("kind"), "resumed");
  EXPECT_EQ(r["payload"]["last_seq"], 2);
  EXPECT_EQ(restarted.session("s1")->transcript().size(), 1u);
  EXPECT_EQ(restarted.handle(msg("s1", 3, "query_npc", {{"npc", npc}, {"slot", 0}}))["payload"]["text"], first_text);
  EXPECT_EQ(open(restarted, fx().small.instance.id).at("session"), "s2");
}

TEST(Transport, UnixSocketRoundTrip) {
  auto dir = seatplan::test::temp_dir("sock");
  const auto path = dir / "p.sock";
  Server server(fx().catalog);
  std::atomic<bool> stop{false};
  std::thread listener([&] { serve_unix_socket(server, path, stop); });
  for (int i = 0; i < 100 && !std::filesystem::exists(path); ++i) std::this_thread::sleep_for(std::chrono::milliseconds(10));

  int fd = ::socket(AF_UNIX, SOCK_STREAM, 0);
  sockaddr_un addr{};
  addr.sun_family = AF_UNIX;
  std::strncpy(addr.sun_path, path.c_str(), sizeof addr.sun_path - 1);
  ASSERT_EQ(::connect(fd, reinterpret_cast<sockaddr*>(&addr), sizeof addr), 0);
  std::string req = json{{"seq", 1}, {"kind", "open_session"}, {"payload", {{"instance_id", fx().small.instance.id}}}}.dump() + "\n";
  ASSERT_EQ(::write(fd, req.data(), req.size()), static_cast<ssize_t>(req.size()));
  std::string reply;
  char buf[4096];
  while (reply.find('\n') == std::string::npos) {
    auto n = ::read(fd, buf, sizeof buf);
    if (n <= 0) break;
    reply.append(buf, static_cast<std::size_t>(n));
  }
  ::close(fd);
  stop = true;
  listener.join();
  auto r = json::parse(reply.substr(0, reply.find('\n')));
  EXPECT_EQ(r.at("kind"), "opened");
  EXPECT_EQ(r["payload"]["instance_id"], fx().small.instance.id);
}
