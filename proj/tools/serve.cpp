#include "serve.hpp"

#include <chrono>
#include <fstream>

#include <httplib.h>

#include "seatplan/error.hpp"

namespace seatplan {

namespace {

void send_json(httplib::Response& res, const nlohmann::json& body, int status = 200) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

int status_for(const std::string& code) {
  if (code == "unknown_session" || code == "unknown_id") return 404;
  if (code == "phase_violation" || code == "budget_exhausted" || code == "bad_sequence") return 409;
  if (code == "internal") return 500;
  return 400;
}

// Protocol responses map onto HTTP: errors get a 4xx/5xx status.
void send_protocol(httplib::Response& res, const nlohmann::json& msg) {
  if (msg.at("kind") == "error")
    send_json(res, msg, status_for(msg["payload"].value("code", "")));
  else
    send_json(res, msg);
}

std::optional<nlohmann::json> parse_body(const httplib::Request& req, httplib::Response& res) {
  if (req.body.empty()) return nlohmann::json::object();
  try {
    auto j = nlohmann::json::parse(req.body);
    if (!j.is_object()) throw ParseError("body must be a JSON object");
    return j;
  } catch (const std::exception& e) {
    send_json(res, error_message("", 0, "malformed", e.what()), 400);
    return std::nullopt;
  }
}

}  // namespace

HttpFrontEnd::HttpFrontEnd(ServeOptions opts) : opts_(std::move(opts)), catalog_(std::make_shared<InstanceCatalog>()) {
  if (!std::filesystem::is_directory(opts_.data_dir))
    throw Error("data directory " + opts_.data_dir.string() + " does not exist");
  catalog_->load_dir(opts_.data_dir);
  std::filesystem::create_directories(opts_.data_dir / "logs");
  protocol_ = std::make_unique<Server>(catalog_, ServerOptions{opts_.config.spatial, std::nullopt});
}

HttpFrontEnd::~HttpFrontEnd() = default;

nlohmann::json HttpFrontEnd::instance_view(const std::string& id) const {
  auto inst = catalog_->find(id);
  if (!inst) throw ProtocolError("unknown_id", "no instance '" + id + "'");
  Budgets unlimited{1 << 30, 1, 1};
  Session reader("view", inst, PerceptionMode::observed, unlimited, opts_.config.spatial);
  nlohmann::json cards = nlohmann::json::array();
  for (const auto& npc : inst->party) {
    nlohmann::json utterances = nlohmann::json::array();
    const int n = static_cast<int>(inst->slots_of(npc).size());
    for (int slot = 0; slot < n; ++slot) utterances.push_back(reader.query_npc(npc, slot));
    auto card = resident_to_json(inst->cast.resident(npc));
    card["utterances"] = utterances;
    cards.push_back(card);
  }
  return {{"instance_id", inst->id},
          {"level", inst->level},
          {"scene", scene_to_json(inst->scene)},
          {"cards", cards},
          {"cast", world_to_json(inst->cast)}};
}

nlohmann::json HttpFrontEnd::call(const std::string& session, const std::string& kind, nlohmann::json payload) {
  long seq;
  {
    std::lock_guard lock(mu_);
    seq = ++seq_[session];
  }
  return protocol_->handle({{"session", session}, {"seq", seq}, {"kind", kind}, {"payload", std::move(payload)}});
}

void HttpFrontEnd::log(const std::string& session, const std::string& action, const nlohmann::json& detail) {
  const auto now = std::chrono::duration_cast<std::chrono::milliseconds>(
                       std::chrono::system_clock::now().time_since_epoch())
                       .count();
  std::lock_guard lock(mu_);
  std::ofstream out(opts_.data_dir / "logs" / (session + ".jsonl"), std::ios::app);
  out << nlohmann::json{{"ts_ms", now}, {"session", session}, {"action", action}, {"detail", detail}}.dump() << '\n';
}

void HttpFrontEnd::mount(httplib::Server& http) {
  http.Get("/api/v1/instances", [this](const httplib::Request&, httplib::Response& res) {
    nlohmann::json list = nlohmann::json::array();
    for (const auto& id : catalog_->ids()) {
      auto inst = catalog_->find(id);
      list.push_back({{"id", id},
                      {"level", inst->level},
                      {"template", to_string(inst->scene.template_id)},
                      {"npc_count", inst->party.size()}});
    }
    send_json(res, {{"instances", list}});
  });

  http.Get(R"(/api/v1/instances/([^/]+))", [this](const httplib::Request& req, httplib::Response& res) {
    try {
      send_json(res, instance_view(req.matches[1]));
    } catch (const ProtocolError& e) {
      send_json(res, error_message("", 0, e.code(), e.what()), 404);
    }
  });

  http.Post("/api/v1/sessions", [this](const httplib::Request& req, httplib::Response& res) {
    auto body = parse_body(req, res);
    if (!body) return;
    auto msg = protocol_->handle({{"seq", 1}, {"kind", "open_session"}, {"payload", *body}});
    if (msg.at("kind") == "opened") {
      const std::string sid = msg.at("session");
      {
        std::lock_guard lock(mu_);
        seq_[sid] = 1;
      }
      log(sid, "open", {{"instance_id", body->value("instance_id", "")}, {"mode", body->value("mode", "observed")}});
    }
    send_protocol(res, msg);
  });

  // Raw protocol access for external agents: the body is one message.
  http.Post(R"(/api/v1/sessions/([^/]+)/messages)", [this](const httplib::Request& req, httplib::Response& res) {
    auto body = parse_body(req, res);
    if (!body) return;
    const std::string sid = req.matches[1];
    auto msg = call(sid, body->value("kind", ""), body->value("payload", nlohmann::json::object()));
    log(sid, body->value("kind", ""), {{"response", msg.at("kind")}});
    send_protocol(res, msg);
  });

  http.Post(R"(/api/v1/sessions/([^/]+)/submit)", [this](const httplib::Request& req, httplib::Response& res) {
    auto body = parse_body(req, res);
    if (!body) return;
    const std::string sid = req.matches[1];
    auto msg = call(sid, "propose", {{"assignment", body->value("assignment", nlohmann::json::object())}});
    if (msg.at("kind") == "reflection") {
      {
        std::lock_guard lock(mu_);
        last_assignment_[sid] = assignment_from_json(body->at("assignment"));
      }
      if (opts_.strict_human) msg["payload"] = {{"feedback", "disabled"}};
    }
    log(sid, "submit", {{"response", msg.at("kind")}, {"assignment", body->value("assignment", nlohmann::json())}});
    send_protocol(res, msg);
  });

  http.Post(R"(/api/v1/sessions/([^/]+)/finalize)", [this](const httplib::Request& req, httplib::Response& res) {
    auto body = parse_body(req, res);
    if (!body) return;
    const std::string sid = req.matches[1];
    nlohmann::json payload = nlohmann::json::object();
    if (body->contains("assignment")) payload["assignment"] = body->at("assignment");
    auto msg = call(sid, "finalize", payload);
    if (msg.at("kind") == "result" && body->contains("assignment")) {
      std::lock_guard lock(mu_);
      last_assignment_[sid] = assignment_from_json(body->at("assignment"));
    }
    log(sid, "finalize", {{"response", msg.at("kind")}});
    send_protocol(res, msg);
  });

  http.Get(R"(/api/v1/sessions/([^/]+)/export)", [this](const httplib::Request& req, httplib::Response& res) {
    const std::string sid = req.matches[1];
    std::optional<Assignment> asg;
    {
      std::lock_guard lock(mu_);
      if (auto it = last_assignment_.find(sid); it != last_assignment_.end()) asg = it->second;
    }
    if (!asg) {
      send_json(res, error_message(sid, 0, "no_proposal", "nothing to export"), 404);
      return;
    }
    std::shared_ptr<Session> s;
    try {
      s = protocol_->session(sid);
    } catch (const ProtocolError& e) {
      send_json(res, error_message(sid, 0, e.code(), e.what()), 404);
      return;
    }
    log(sid, "export", nlohmann::json::object());
    send_json(res, answer_to_json(s->instance().id, *asg));
  });

  if (opts_.static_dir) http.set_mount_point("/", opts_.static_dir->string());
}

void run_http_server(const ServeOptions& opts, int port) {
  HttpFrontEnd front(opts);
  httplib::Server http;
  front.mount(http);
  if (!http.bind_to_port("127.0.0.1", port)) throw Error("port " + std::to_string(port) + " is busy");
  http.listen_after_bind();
}

}  // namespace seatplan
