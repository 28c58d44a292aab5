#pragma once

#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "fulfil/dsl/dsl.hpp"
#include "fulfil/taskgen/template.hpp"

namespace fulfil::router {

struct TokenUsage {
  long input_tokens = 0;
  long output_tokens = 0;

  TokenUsage& operator+=(const TokenUsage& o) {
    input_tokens += o.input_tokens;
    output_tokens += o.output_tokens;
    return *this;
  }
  bool operator==(const TokenUsage&) const = default;
};

struct RouteDecision {
  bool in_domain = false;
  std::optional<std::string> task_id;
  double confidence = 0.0;
};

enum class AnswerKind { TaskResult, DefaultResponse, ExecutionFailure };
std::string to_string(AnswerKind k);

struct Answer {
  AnswerKind kind = AnswerKind::DefaultResponse;
  std::vector<std::string> logs;
  std::optional<std::string> snippet;
  TokenUsage usage;
  RouteDecision route;
  std::optional<std::string> error_detail;
  /// The model backend could not be reached or answered garbage.
  bool backend_error = false;
};

/// Transport failures and malformed responses from a remote model.
class BackendError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A required slot could not be found in the query.
class ExtractionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Approximate tokenizer: alphanumeric runs and single punctuation marks are
/// fragments; a fragment longer than 8 chars counts ceil(len/4), others 1.
long count_tokens(std::string_view text);

class Backend {
 public:
  virtual ~Backend() = default;
  virtual std::string kind() const = 0;
  virtual RouteDecision classify(const std::string& query, TokenUsage& usage) = 0;
  /// Requires decision.in_domain.
  virtual std::string generate_snippet(const std::string& query, const RouteDecision& decision,
                                       TokenUsage& usage) = 0;
  /// Guidance text for out-of-domain queries.
  virtual std::string default_response() const;
};

/// Token-bag similarity between a query and one query variant. Slot holes
/// score when some query token matches the slot pattern.
double similarity(std::string_view query, const std::string& variant, const taskgen::TaskTemplate& t);

/// Slot values found in `query` for the holes of `variant`; throws
/// ExtractionError when a hole has no matching token.
std::map<std::string, std::string> extract_slots(std::string_view query, const std::string& variant,
                                                 const taskgen::TaskTemplate& t);

/// Nearest-template retrieval over a fixed library.
class FixtureBackend : public Backend {
 public:
  explicit FixtureBackend(std::shared_ptr<const std::vector<taskgen::TaskTemplate>> library, double threshold = 0.35);

  std::string kind() const override { return "fixture"; }
  RouteDecision classify(const std::string& query, TokenUsage& usage) override;
  std::string generate_snippet(const std::string& query, const RouteDecision& decision, TokenUsage& usage) override;
  std::string default_response() const override;

  double threshold() const { return threshold_; }

 private:
  const taskgen::TaskTemplate& find(const std::string& task_id) const;

  std::shared_ptr<const std::vector<taskgen::TaskTemplate>> library_;
  double threshold_;
};

struct RemoteSpec {
  /// Full URL of the chat-completion route, e.g. http://host:8000/v1/chat/completions.
  std::string endpoint;
  std::string auth_header = "Authorization";
  std::string auth_value;
  std::string model;
  int max_output_tokens = 500;
  int max_input_tokens = 1024;
  /// Prompt templates with a `{query}` hole.
  std::string gate_prompt;
  std::string coder_prompt;
  int timeout_seconds = 60;
};

/// Reads prompts/gate.txt and prompts/coder.txt under `root`.
void load_prompts(RemoteSpec& spec, const std::filesystem::path& root);

/// Applies FULFIL_BACKEND_URL, FULFIL_BACKEND_MODEL, FULFIL_BACKEND_AUTH_HEADER
/// and FULFIL_BACKEND_AUTH when set.
RemoteSpec apply_env(RemoteSpec spec);

class RemoteBackend : public Backend {
 public:
  explicit RemoteBackend(RemoteSpec spec, std::shared_ptr<const std::vector<taskgen::TaskTemplate>> library = nullptr);

  std::string kind() const override { return "remote"; }
  RouteDecision classify(const std::string& query, TokenUsage& usage) override;
  std::string generate_snippet(const std::string& query, const RouteDecision& decision, TokenUsage& usage) override;
  std::string default_response() const override;

  /// Warnings from unparseable verdicts, oldest first.
  std::vector<std::string> warnings() const;

 private:
  std::string complete(const std::string& prompt, int max_tokens, TokenUsage& usage);

  RemoteSpec spec_;
  std::shared_ptr<const std::vector<taskgen::TaskTemplate>> library_;
  std::string scheme_host_;
  std::string path_;
  mutable std::mutex warn_mu_;
  std::vector<std::string> warnings_;
};

/// Verdict text to a decision. Unknown verdicts are out-of-domain and set
/// `unparsed`.
RouteDecision parse_verdict(std::string_view text, bool& unparsed);

/// Removes the first ``` fence pair (and its language tag) if present.
std::string strip_fences(std::string_view text);

/// Replaces every `{query}` in `tmpl`.
std::string fill_prompt(std::string_view tmpl, std::string_view query);

/// Guidance listing the task categories, with one sample query per category
/// when a library is given.
std::string default_guidance(const std::vector<taskgen::TaskTemplate>* library);

using Executor = std::function<dsl::ExecutionResult(const dsl::Script&)>;

/// Gate, code, execute. Never throws; every failure is reported in the Answer.
Answer handle_query(const std::string& query, Backend& backend, const Executor& exec);

/// Executes against `hosts` and drops any scenario constraints the snippet
/// left behind.
Executor direct_executor(dsl::Hosts hosts, long step_budget = 10000);

nlohmann::json to_json(const TokenUsage& u);
nlohmann::json to_json(const RouteDecision& d);
nlohmann::json to_json(const Answer& a);
TokenUsage usage_from_json(const nlohmann::json& j);

}  // namespace fulfil::router
