#include <cstdlib>
#include <fstream>
#include <sstream>

#include <httplib.h>

#include "fulfil/router/router.hpp"

namespace fulfil::router {

namespace {

std::string read_text(const std::filesystem::path& p) {
  std::ifstream in(p);
  if (!in) throw std::runtime_error("cannot read " + p.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

void load_prompts(RemoteSpec& spec, const std::filesystem::path& root) {
  spec.gate_prompt = read_text(root / "prompts" / "gate.txt");
  spec.coder_prompt = read_text(root / "prompts" / "coder.txt");
}

RemoteSpec apply_env(RemoteSpec spec) {
  auto get = [](const char* name) -> std::optional<std::string> {
    const char* v = std::getenv(name);
    if (!v || !*v) return std::nullopt;
    return std::string(v);
  };
  if (auto v = get("FULFIL_BACKEND_URL")) spec.endpoint = *v;
  if (auto v = get("FULFIL_BACKEND_MODEL")) spec.model = *v;
  if (auto v = get("FULFIL_BACKEND_AUTH_HEADER")) spec.auth_header = *v;
  if (auto v = get("FULFIL_BACKEND_AUTH")) spec.auth_value = *v;
  return spec;
}

RemoteBackend::RemoteBackend(RemoteSpec spec, std::shared_ptr<const std::vector<taskgen::TaskTemplate>> library)
    : spec_(std::move(spec)), library_(std::move(library)) {
  if (spec_.max_input_tokens <= 0 || spec_.max_output_tokens <= 0) {
    throw std::invalid_argument("token caps must be positive");
  }
  const std::string& url = spec_.endpoint;
  if (url.rfind("http://", 0) != 0) throw std::invalid_argument("endpoint must be an http:// URL: '" + url + "'");
  std::size_t slash = url.find('/', 7);
  scheme_host_ = url.substr(0, slash);
  path_ = slash == std::string::npos ? "/v1/chat/completions" : url.substr(slash);
  if (scheme_host_.size() <= 7) throw std::invalid_argument("endpoint has no host: '" + url + "'");
  if (spec_.gate_prompt.empty()) spec_.gate_prompt = "Is this query in-domain or out-of-domain? {query}";
  if (spec_.coder_prompt.empty()) spec_.coder_prompt = "Write the snippet for: {query}";
}

std::string RemoteBackend::complete(const std::string& prompt, int max_tokens, TokenUsage& usage) {
  long prompt_tokens = count_tokens(prompt);
  if (prompt_tokens > spec_.max_input_tokens) {
    throw BackendError("prompt has about " + std::to_string(prompt_tokens) + " tokens, over the cap of " +
                       std::to_string(spec_.max_input_tokens));
  }
  nlohmann::json body = {{"model", spec_.model},
                         {"messages", {{{"role", "user"}, {"content", prompt}}}},
                         {"max_tokens", max_tokens}};
  httplib::Client cli(scheme_host_);
  cli.set_connection_timeout(spec_.timeout_seconds, 0);
  cli.set_read_timeout(spec_.timeout_seconds, 0);
  httplib::Headers headers;
  if (!spec_.auth_value.empty()) headers.emplace(spec_.auth_header, spec_.auth_value);

  auto res = cli.Post(path_, headers, body.dump(), "application/json");
  if (!res) throw BackendError("request to " + spec_.endpoint + " failed: " + httplib::to_string(res.error()));
  if (res->status != 200) throw BackendError("backend answered HTTP " + std::to_string(res->status));

  std::string content;
  try {
    auto j = nlohmann::json::parse(res->body);
    content = j.at("choices").at(0).at("message").at("content").get<std::string>();
    if (j.contains("usage") && j["usage"].is_object()) {
      usage.input_tokens += j["usage"].value("prompt_tokens", prompt_tokens);
      usage.output_tokens += j["usage"].value("completion_tokens", count_tokens(content));
    } else {
      usage.input_tokens += prompt_tokens;
      usage.output_tokens += count_tokens(content);
    }
  } catch (const nlohmann::json::exception& e) {
    throw BackendError(std::string("malformed completion response: ") + e.what());
  }
  return content;
}

RouteDecision RemoteBackend::classify(const std::string& query, TokenUsage& usage) {
  std::string verdict = complete(fill_prompt(spec_.gate_prompt, query), 16, usage);
  bool unparsed = false;
  RouteDecision d = parse_verdict(verdict, unparsed);
  if (unparsed) {
    std::lock_guard lock(warn_mu_);
    warnings_.push_back("unparseable verdict '" + verdict + "' for query '" + query + "', treated as out-of-domain");
  }
  return d;
}

std::string RemoteBackend::generate_snippet(const std::string& query, const RouteDecision& decision,
                                            TokenUsage& usage) {
  if (!decision.in_domain) throw std::invalid_argument("generate_snippet needs an in-domain decision");
  return strip_fences(complete(fill_prompt(spec_.coder_prompt, query), spec_.max_output_tokens, usage));
}

std::string RemoteBackend::default_response() const { return default_guidance(library_.get()); }

std::vector<std::string> RemoteBackend::warnings() const {
  std::lock_guard lock(warn_mu_);
  return warnings_;
}

}  // namespace fulfil::router
