#pragma once

// HTTP front end for the protocol and the human console.

#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>

#include <nlohmann/json.hpp>

#include "seatplan/config.hpp"
#include "seatplan/protocol.hpp"

namespace httplib {
class Server;
}

namespace seatplan {

struct ServeOptions {
  std::filesystem::path data_dir;  // dataset with instances/; logs go to data_dir/logs
  std::optional<std::filesystem::path> static_dir;
  Config config;
  /// Human baseline without reflection feedback.
  bool strict_human = false;
};

/// Routes under /api/v1/ plus static files under /. Owns the protocol server.
class HttpFrontEnd {
 public:
  explicit HttpFrontEnd(ServeOptions opts);
  ~HttpFrontEnd();

  /// Registers every route on `http`.
  void mount(httplib::Server& http);

  /// The instance as the console sees it: geometry, NPC cards and every
  /// utterance. Never contains ground truth.
  nlohmann::json instance_view(const std::string& id) const;

  Server& protocol() { return *protocol_; }

 private:
  nlohmann::json call(const std::string& session, const std::string& kind, nlohmann::json payload);
  void log(const std::string& session, const std::string& action, const nlohmann::json& detail);

  ServeOptions opts_;
  std::shared_ptr<InstanceCatalog> catalog_;
  std::unique_ptr<Server> protocol_;
  std::mutex mu_;
  std::map<std::string, long> seq_;
  std::map<std::string, Assignment> last_assignment_;
};

/// Blocks serving on 127.0.0.1:port. Throws Error if the port is busy or the
/// data directory is missing.
void run_http_server(const ServeOptions& opts, int port);

}  // namespace seatplan
