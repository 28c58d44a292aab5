#pragma once

#include <atomic>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "fulfil/dsl/world.hpp"
#include "fulfil/router/router.hpp"

namespace httplib {
class Server;
}

namespace fulfil::service {

struct InteractionLogEntry {
  long seq = 0;
  std::string timestamp;
  std::string query;
  /// "in_domain" or "out_of_domain".
  std::string route;
  std::string kind;
  std::optional<std::string> snippet;
  std::vector<std::string> logs;
  router::TokenUsage usage;
  long latency_ms = 0;
  int plan_version_before = 0;
  int plan_version_after = 0;
  std::optional<std::string> error_detail;
};

nlohmann::json to_json(const InteractionLogEntry& e);
InteractionLogEntry entry_from_json(const nlohmann::json& j);

struct Session {
  std::string id;
  std::string created_at;
  std::vector<InteractionLogEntry> entries;
};

struct ServiceConfig {
  std::string instance_name = "instance";
  /// One JSONL file per session, appended on every chat. Off when empty.
  std::optional<std::filesystem::path> session_dir;
  std::string cors_origin = "*";
  long step_budget = 10000;
  /// Static files (the planner UI build) served under "/" when set.
  std::optional<std::filesystem::path> static_dir;
};

/// Status code plus JSON body; the HTTP layer is a thin shell over these.
struct Reply {
  int status = 200;
  nlohmann::json body;
};

class Service {
 public:
  Service(dsl::World world, std::shared_ptr<router::Backend> backend, ServiceConfig cfg);

  Reply chat(const std::string& request_body);
  Reply plan() const;
  Reply optimize();
  Reply session_log(const std::string& id) const;
  Reply health() const;

  /// Registers every route plus CORS headers on `server`.
  void install(httplib::Server& server);

  int plan_version() const;

 private:
  Session& session_for(const std::string& id);
  void persist(const std::string& id, const InteractionLogEntry& e);
  void load_sessions();

  dsl::World world_;
  std::shared_ptr<router::Backend> backend_;
  ServiceConfig cfg_;

  // Guards world_: exclusive for anything that can change model or plan.
  mutable std::shared_mutex world_mu_;
  std::atomic<int> writers_{0};

  mutable std::mutex sessions_mu_;
  std::map<std::string, Session> sessions_;
  long next_session_ = 0;
};

/// Current UTC time as ISO-8601 with milliseconds.
std::string now_iso();

}  // namespace fulfil::service
