#include <gtest/gtest.h>

#include <fstream>
#include <sstream>
#include <thread>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "fixtures.hpp"
#include "seatplan/error.hpp"
#include "seatplan/harness.hpp"
#include "serve.hpp"

using namespace seatplan;
namespace fs = std::filesystem;
using nlohmann::json;
using seatplan::test::temp_dir;

namespace {

fs::path dataset() {
  static const fs::path dir = [] {
    auto d = temp_dir("serve-ds");
    cmd_gen({{1, 30}, 1, 2, d, SEATPLAN_DATA_DIR "/world.json", {}});
    return d;
  }();
  return dir;
}

// One front end on an ephemeral port for the lifetime of the fixture.
class Http : public ::testing::Test {
 protected:
  void start(bool strict_human = false) {
    static_dir_ = temp_dir(strict_human ? "static-strict" : "static");
    std::ofstream(static_dir_ / "index.html") << "<!doctype html><title>console</title>";
    ServeOptions opts{dataset(), static_dir_, {}, strict_human};
    front_ = std::make_unique<HttpFrontEnd>(opts);
    front_->mount(server_);
    port_ = server_.bind_to_any_port("127.0.0.1");
    ASSERT_GT(port_, 0);
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
    client_ = std::make_unique<httplib::Client>("127.0.0.1", port_);
  }
  void TearDown() override {
    server_.stop();
    if (thread_.joinable()) thread_.join();
  }

  std::pair<int, json> get(const std::string& path) {
    auto r = client_->Get(path);
    if (!r) return {0, json()};
    return {r->status, json::parse(r->body, nullptr, false)};
  }
  std::pair<int, json> post(const std::string& path, const json& body) {
    auto r = client_->Post(path, body.dump(), "application/json");
    if (!r) return {0, json()};
    return {r->status, json::parse(r->body, nullptr, false)};
  }
  std::string open(const std::string& id) {
    auto [status, msg] = post("/api/v1/sessions", {{"instance_id", id}, {"mode", "observed"}});
    EXPECT_EQ(status, 200) << msg.dump();
    return msg.at("session");
  }
  std::string first_id() { return get("/api/v1/instances").second["instances"][0]["id"]; }

  httplib::Server server_;
  std::unique_ptr<HttpFrontEnd> front_;
  std::unique_ptr<httplib::Client> client_;
  std::thread thread_;
  fs::path static_dir_;
  int port_ = 0;
};

}  // namespace

TEST_F(Http, ListsInstances) {
  start();
  auto [status, body] = get("/api/v1/instances");
  EXPECT_EQ(status, 200);
  ASSERT_EQ(body["instances"].size(), 2u);
  for (const auto& e : body["instances"]) {
    EXPECT_TRUE(e.contains("id"));
    EXPECT_TRUE(e.contains("level"));
    EXPECT_TRUE(e.contains("template"));
    EXPECT_GE(e["npc_count"].get<int>(), 4);
  }
}

TEST_F(Http, InstanceViewCarriesNoGroundTruth) {
  start();
  const auto id = first_id();
  auto [status, view] = get("/api/v1/instances/" + id);
  EXPECT_EQ(status, 200);
  auto gt = load_ground_truth(dataset() / "ground_truth" / (id + ".json"));
  EXPECT_TRUE(scan_hygiene(view, &gt).empty()) << view.dump();
  EXPECT_EQ(get("/api/v1/instances/L99-999").first, 404);
}

TEST_F(Http, FullSessionExportMatchesEval) {
  start();
  const auto id = first_id();
  const auto sid = open(id);
  auto view = get("/api/v1/instances/" + id).second;

  auto [qs, q] = post("/api/v1/sessions/" + sid + "/messages",
                      {{"kind", "query_npc"}, {"payload", {{"npc", view["cards"][0]["id"]}, {"slot", 0}}}});
  EXPECT_EQ(qs, 200) << q.dump();
  EXPECT_EQ(q["kind"], "npc_utterance");

  EXPECT_EQ(get("/api/v1/sessions/" + sid + "/export").first, 404);

  auto gt = load_ground_truth(dataset() / "ground_truth" / (id + ".json"));
  auto [ss, reflection] = post("/api/v1/sessions/" + sid + "/submit", {{"assignment", assignment_to_json(gt.assignment)}});
  EXPECT_EQ(ss, 200) << reflection.dump();
  EXPECT_EQ(reflection["kind"], "reflection");
  EXPECT_TRUE(reflection["payload"].contains("reflection"));

  auto [fs_, result] = post("/api/v1/sessions/" + sid + "/finalize", json::object());
  ASSERT_EQ(fs_, 200) << result.dump();
  const double served = result["payload"]["report"]["scaled_score"];

  auto [es, exported] = get("/api/v1/sessions/" + sid + "/export");
  ASSERT_EQ(es, 200);
  auto out = temp_dir("serve-export");
  write_json_file(out / "answer.json", exported);
  auto r = cmd_eval({dataset() / "instances" / (id + ".json"), out / "answer.json", {}, {}, CategoryMode::coarse, {}});
  EXPECT_EQ(r.scaled_score, served);

  std::ifstream log(dataset() / "logs" / (sid + ".jsonl"));
  std::string line;
  int lines = 0;
  while (std::getline(log, line)) {
    auto j = json::parse(line);
    EXPECT_TRUE(j.contains("ts_ms"));
    EXPECT_EQ(j["session"], sid);
    ++lines;
  }
  EXPECT_GE(lines, 4);
}

TEST_F(Http, StatusCodes) {
  start();
  const auto sid = open(first_id());
  EXPECT_EQ(post("/api/v1/sessions/nope/messages", {{"kind", "query_npc"}, {"payload", json::object()}}).first, 404);
  EXPECT_EQ(post("/api/v1/sessions", {{"instance_id", "L99-999"}}).first, 404);
  EXPECT_EQ(post("/api/v1/sessions/" + sid + "/submit", {{"assignment", {{"x", "y"}}}}).first, 400);
  auto r = client_->Post("/api/v1/sessions", "{not json", "application/json");
  ASSERT_TRUE(r);
  EXPECT_EQ(r->status, 400);
  auto [fs_, fin] = post("/api/v1/sessions/" + sid + "/finalize", json::object());
  EXPECT_EQ(fs_, 400);
  EXPECT_EQ(fin["payload"]["code"], "no_proposal");
  const auto id = first_id();
  auto gt = load_ground_truth(dataset() / "ground_truth" / (id + ".json"));
  ASSERT_EQ(post("/api/v1/sessions/" + sid + "/submit", {{"assignment", assignment_to_json(gt.assignment)}}).first, 200);
  auto [qs, q] = post("/api/v1/sessions/" + sid + "/messages",
                      {{"kind", "query_npc"}, {"payload", {{"npc", "nobody"}, {"slot", 0}}}});
  EXPECT_EQ(qs, 409) << q.dump();
}

TEST_F(Http, StrictHumanHidesFeedback) {
  start(true);
  const auto id = first_id();
  const auto sid = open(id);
  auto gt = load_ground_truth(dataset() / "ground_truth" / (id + ".json"));
  auto [status, msg] = post("/api/v1/sessions/" + sid + "/submit", {{"assignment", assignment_to_json(gt.assignment)}});
  EXPECT_EQ(status, 200);
  EXPECT_EQ(msg["payload"], (json{{"feedback", "disabled"}}));
}

TEST_F(Http, ServesStaticFiles) {
  start();
  auto r = client_->Get("/index.html");
  ASSERT_TRUE(r);
  EXPECT_EQ(r->status, 200);
  EXPECT_NE(r->body.find("console"), std::string::npos);
  EXPECT_EQ(client_->Get("/missing.js")->status, 404);
}

TEST(HttpFrontEndSetup, MissingDataDirThrows) {
  EXPECT_THROW(HttpFrontEnd(ServeOptions{"/nonexistent/seatplan-data", std::nullopt, {}, false}), Error);
}
