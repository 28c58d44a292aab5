#include <cctype>
#include <chrono>
#include <ctime>
#include <fstream>
#include <random>

#include <httplib.h>

#include "fulfil/opt/plan_store.hpp"
#include "fulfil/service/service.hpp"

namespace fulfil::service {

namespace {

nlohmann::json opt_string(const std::optional<std::string>& s) { return s ? nlohmann::json(*s) : nlohmann::json(nullptr); }

bool valid_session_id(const std::string& id) {
  if (id.empty() || id.size() > 64) return false;
  for (char c : id)
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '-' && c != '_') return false;
  return true;
}

Reply error(int status, const std::string& msg) { return {status, {{"error", msg}}}; }

// Counts pending and running writers so /plan/optimize can refuse to queue.
struct WriterMark {
  std::atomic<int>& n;
  explicit WriterMark(std::atomic<int>& c) : n(c) { ++n; }
  ~WriterMark() { --n; }
};

}  // namespace

std::string now_iso() {
  auto now = std::chrono::system_clock::now();
  auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(now.time_since_epoch()).count() % 1000;
  std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[40];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%S", &tm);
  char out[48];
  std::snprintf(out, sizeof out, "%s.%03dZ", buf, static_cast<int>(ms));
  return out;
}

nlohmann::json to_json(const InteractionLogEntry& e) {
  return {{"seq", e.seq},
          {"timestamp", e.timestamp},
          {"query", e.query},
          {"route", e.route},
          {"kind", e.kind},
          {"snippet", opt_string(e.snippet)},
          {"logs", e.logs},
          {"usage", router::to_json(e.usage)},
          {"latency_ms", e.latency_ms},
          {"plan_version_before", e.plan_version_before},
          {"plan_version_after", e.plan_version_after},
          {"error_detail", opt_string(e.error_detail)}};
}

InteractionLogEntry entry_from_json(const nlohmann::json& j) {
  InteractionLogEntry e;
  e.seq = j.at("seq").get<long>();
  e.timestamp = j.at("timestamp").get<std::string>();
  e.query = j.at("query").get<std::string>();
  e.route = j.at("route").get<std::string>();
  e.kind = j.at("kind").get<std::string>();
  if (!j.at("snippet").is_null()) e.snippet = j["snippet"].get<std::string>();
  e.logs = j.at("logs").get<std::vector<std::string>>();
  e.usage = router::usage_from_json(j.at("usage"));
  e.latency_ms = j.at("latency_ms").get<long>();
  e.plan_version_before = j.at("plan_version_before").get<int>();
  e.plan_version_after = j.at("plan_version_after").get<int>();
  if (j.contains("error_detail") && !j["error_detail"].is_null()) e.error_detail = j["error_detail"].get<std::string>();
  return e;
}

Service::Service(dsl::World world, std::shared_ptr<router::Backend> backend, ServiceConfig cfg)
    : world_(std::move(world)), backend_(std::move(backend)), cfg_(std::move(cfg)) {
  if (!backend_) throw std::invalid_argument("service needs a backend");
  if (cfg_.session_dir) {
    std::filesystem::create_directories(*cfg_.session_dir);
    load_sessions();
  }
}

void Service::load_sessions() {
  for (const auto& f : std::filesystem::directory_iterator(*cfg_.session_dir)) {
    if (f.path().extension() != ".jsonl") continue;
    Session s;
    s.id = f.path().stem().string();
    std::ifstream in(f.path());
    std::string line;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      s.entries.push_back(entry_from_json(nlohmann::json::parse(line)));
    }
    s.created_at = s.entries.empty() ? now_iso() : s.entries.front().timestamp;
    sessions_[s.id] = std::move(s);
  }
}

Session& Service::session_for(const std::string& id) {
  auto it = sessions_.find(id);
  if (it != sessions_.end()) return it->second;
  Session s;
  s.id = id;
  s.created_at = now_iso();
  return sessions_.emplace(id, std::move(s)).first->second;
}

void Service::persist(const std::string& id, const InteractionLogEntry& e) {
  if (!cfg_.session_dir) return;
  std::ofstream out(*cfg_.session_dir / (id + ".jsonl"), std::ios::app);
  out << to_json(e).dump() << "\n";
}

int Service::plan_version() const {
  std::shared_lock lock(world_mu_);
  return world_.plan.version();
}

Reply Service::chat(const std::string& request_body) {
  auto started = std::chrono::steady_clock::now();
  nlohmann::json req;
  try {
    req = nlohmann::json::parse(request_body);
  } catch (const nlohmann::json::parse_error&) {
    return error(400, "body is not valid JSON");
  }
  if (!req.is_object() || !req.contains("query") || !req["query"].is_string()) {
    return error(400, "body must be an object with a string \"query\"");
  }
  std::string query = req["query"].get<std::string>();
  if (query.find_first_not_of(" \t\r\n") == std::string::npos) return error(400, "query is empty");

  std::string session_id;
  if (req.contains("session_id") && !req["session_id"].is_null()) {
    if (!req["session_id"].is_string() || !valid_session_id(req["session_id"].get<std::string>())) {
      return error(400, "session_id must be 1-64 characters from [A-Za-z0-9_-]");
    }
    session_id = req["session_id"].get<std::string>();
  } else {
    static thread_local std::mt19937_64 rng(std::random_device{}());
    char buf[32];
    std::lock_guard lock(sessions_mu_);
    std::snprintf(buf, sizeof buf, "s%ld-%08llx", ++next_session_, static_cast<unsigned long long>(rng() & 0xffffffffULL));
    session_id = buf;
    session_for(session_id);
  }

  int before = 0, after = 0;
  bool ran = false;
  router::Executor exec = [&](const dsl::Script& script) {
    ran = true;
    if (dsl::mutates(script)) {
      WriterMark mark(writers_);
      std::unique_lock lock(world_mu_);
      before = world_.plan.version();
      dsl::ExecEnv env{{}, world_.hosts(), cfg_.step_budget, {}};
      auto r = dsl::execute(script, env);
      world_.model.reset();
      after = world_.plan.version();
      return r;
    }
    std::shared_lock lock(world_mu_);
    before = after = world_.plan.version();
    dsl::ExecEnv env{{}, world_.hosts(), cfg_.step_budget, {}};
    return dsl::execute(script, env);
  };
  router::Answer answer = router::handle_query(query, *backend_, exec);
  if (!ran) before = after = plan_version();

  InteractionLogEntry e;
  e.query = query;
  e.route = answer.route.in_domain ? "in_domain" : "out_of_domain";
  e.kind = router::to_string(answer.kind);
  e.snippet = answer.snippet;
  e.logs = answer.logs;
  e.usage = answer.usage;
  e.error_detail = answer.error_detail;
  e.plan_version_before = before;
  e.plan_version_after = after;
  e.latency_ms = std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - started).count();
  {
    std::lock_guard lock(sessions_mu_);
    Session& s = session_for(session_id);
    e.seq = static_cast<long>(s.entries.size()) + 1;
    e.timestamp = now_iso();
    s.entries.push_back(e);
    persist(session_id, e);
  }

  nlohmann::json body = {{"session_id", session_id}, {"answer", router::to_json(answer)}, {"entry", to_json(e)}};
  return {answer.backend_error ? 503 : 200, body};
}

Reply Service::plan() const {
  std::shared_lock lock(world_mu_);
  if (!world_.plan.current()) return error(404, "no plan committed yet");
  return {200, opt::to_json(*world_.plan.current())};
}

Reply Service::optimize() {
  if (writers_.load() > 0) return error(409, "another model mutation is in flight");
  WriterMark mark(writers_);
  std::unique_lock lock(world_mu_);
  // Scenario constraints never survive a request, so this is the baseline.
  return {200, opt::to_json(world_.model.optimize())};
}

Reply Service::session_log(const std::string& id) const {
  std::lock_guard lock(sessions_mu_);
  auto it = sessions_.find(id);
  if (it == sessions_.end()) return error(404, "unknown session '" + id + "'");
  nlohmann::json entries = nlohmann::json::array();
  for (const auto& e : it->second.entries) entries.push_back(to_json(e));
  return {200, {{"session_id", id}, {"created_at", it->second.created_at}, {"entries", entries}}};
}

Reply Service::health() const {
  return {200, {{"status", "ok"}, {"instance", cfg_.instance_name}, {"backend", backend_->kind()}}};
}

void Service::install(httplib::Server& server) {
  auto send = [](httplib::Response& res, const Reply& r) {
    res.status = r.status;
    res.set_content(r.body.dump(), "application/json");
  };
  std::string origin = cfg_.cors_origin;
  server.set_post_routing_handler([origin](const httplib::Request&, httplib::Response& res) {
    res.set_header("Access-Control-Allow-Origin", origin);
    res.set_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS");
    res.set_header("Access-Control-Allow-Headers", "Content-Type");
  });
  server.Options(R"(/.*)", [](const httplib::Request&, httplib::Response& res) { res.status = 204; });

  server.Post("/chat", [this, send](const httplib::Request& req, httplib::Response& res) { send(res, chat(req.body)); });
  server.Get("/plan", [this, send](const httplib::Request&, httplib::Response& res) { send(res, plan()); });
  server.Post("/plan/optimize", [this, send](const httplib::Request&, httplib::Response& res) { send(res, optimize()); });
  server.Get(R"(/sessions/([A-Za-z0-9_\-]+)/log)", [this, send](const httplib::Request& req, httplib::Response& res) {
    send(res, session_log(req.matches[1]));
  });
  server.Get("/health", [this, send](const httplib::Request&, httplib::Response& res) { send(res, health()); });
  server.set_exception_handler([send](const httplib::Request&, httplib::Response& res, std::exception_ptr ep) {
    std::string msg = "internal error";
    try {
      std::rethrow_exception(ep);
    } catch (const std::exception& e) {
      msg = e.what();
    } catch (...) {
    }
    send(res, error(500, msg));
  });
  if (cfg_.static_dir) server.set_mount_point("/", cfg_.static_dir->string());
}

}  // namespace fulfil::service
