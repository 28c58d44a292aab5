#include <algorithm>
#include <cctype>
#include <regex>
#include <set>

#include "fulfil/router/router.hpp"

namespace fulfil::router {

namespace {

bool alnum(char c) { return std::isalnum(static_cast<unsigned char>(c)) != 0; }

std::string lower(std::string s) {
  for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

std::vector<std::string> words(std::string_view text) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < text.size();) {
    if (!alnum(text[i])) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j < text.size() && alnum(text[j])) ++j;
    out.emplace_back(text.substr(i, j - i));
    i = j;
  }
  return out;
}

const std::set<std::string>& stopwords() {
  static const std::set<std::string> words = {
      "a",    "about", "all",  "am",    "an",   "and",  "any",  "are",  "as",   "at",    "be",   "by",
      "can",  "could", "did",  "do",    "does", "for",  "from", "give", "have", "how",   "i",    "if",
      "in",   "is",    "it",   "its",   "me",   "my",   "of",   "on",   "or",   "please", "s",   "should",
      "so",   "some",  "tell", "that",  "the",  "their", "there", "this", "to",  "us",    "was",  "we",
      "were", "what",  "when", "where", "which", "who", "will", "with", "would", "you",  "your"};
  return words;
}

// Lowercase and strip a common inflection so "docking", "docked" and
// "docks" meet "dock".
std::string normalize(const std::string& word) {
  std::string w = lower(word);
  auto strip = [&](std::string_view suffix, std::size_t keep) {
    if (w.size() >= suffix.size() + keep && w.compare(w.size() - suffix.size(), suffix.size(), suffix) == 0) {
      w.resize(w.size() - suffix.size());
      return true;
    }
    return false;
  };
  if (!strip("ing", 3) && !strip("ed", 3) && !strip("es", 4)) {
    if (w.size() > 3 && w.back() == 's' && w[w.size() - 2] != 's') w.pop_back();
  }
  return w;
}

// A variant split into its holes (with patterns) and its normalized content
// words.
struct Compiled {
  std::string text;
  std::vector<std::string> holes;
  std::vector<std::regex> patterns;
  std::vector<std::string> literals;
};

Compiled compile(const std::string& variant, const taskgen::TaskTemplate& t) {
  Compiled c;
  c.text = variant;
  c.holes = taskgen::template_holes(variant);
  std::map<std::string, std::string> blanks;
  for (const auto& h : c.holes) {
    blanks[h] = " ";
    c.patterns.emplace_back(t.pattern_for(h));
  }
  for (const auto& w : words(taskgen::fill_template(variant, blanks).text))
    if (!stopwords().count(lower(w))) c.literals.push_back(normalize(w));
  return c;
}

struct MatchResult {
  double score = 0;
  std::map<std::string, std::string> slots;
  std::vector<std::string> missing;
};

MatchResult match(const std::vector<std::string>& query, const Compiled& v) {
  MatchResult r;
  std::vector<bool> used(query.size(), false);
  std::size_t k = 0;
  std::size_t next = 0;
  for (std::size_t h = 0; h < v.holes.size(); ++h) {
    auto fits = [&](std::size_t i) { return !used[i] && std::regex_match(query[i], v.patterns[h]); };
    std::optional<std::size_t> hit;
    for (std::size_t i = next; i < query.size() && !hit; ++i)
      if (fits(i)) hit = i;
    for (std::size_t i = 0; i < next && i < query.size() && !hit; ++i)
      if (fits(i)) hit = i;
    if (!hit) {
      r.missing.push_back(v.holes[h]);
      continue;
    }
    used[*hit] = true;
    next = *hit + 1;
    r.slots.emplace(v.holes[h], query[*hit]);
    ++k;
  }
  std::multiset<std::string> bag(v.literals.begin(), v.literals.end());
  std::size_t m = 0;
  std::size_t content = k;
  for (std::size_t i = 0; i < query.size(); ++i) {
    if (used[i] || stopwords().count(lower(query[i]))) continue;
    ++content;
    auto it = bag.find(normalize(query[i]));
    if (it == bag.end()) continue;
    bag.erase(it);
    ++m;
  }
  double denom = static_cast<double>(content + v.literals.size() + v.holes.size());
  r.score = denom == 0 ? 0.0 : 2.0 * static_cast<double>(m + k) / denom;
  return r;
}

std::string example_query(const taskgen::TaskTemplate& t) {
  std::map<std::string, std::string> first;
  for (const auto& [slot, values] : t.slot_domains)
    if (!values.empty()) first[slot] = values.front();
  return taskgen::fill_template(t.query_variants.front(), first).text;
}

}  // namespace

std::string to_string(AnswerKind k) {
  switch (k) {
    case AnswerKind::TaskResult:
      return "task_result";
    case AnswerKind::DefaultResponse:
      return "default_response";
    case AnswerKind::ExecutionFailure:
      return "execution_failure";
  }
  return "execution_failure";
}

long count_tokens(std::string_view text) {
  long n = 0;
  for (std::size_t i = 0; i < text.size();) {
    unsigned char c = static_cast<unsigned char>(text[i]);
    if (std::isspace(c)) {
      ++i;
      continue;
    }
    if (!alnum(text[i])) {
      ++n;
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j < text.size() && alnum(text[j])) ++j;
    std::size_t len = j - i;
    n += len > 8 ? static_cast<long>((len + 3) / 4) : 1;
    i = j;
  }
  return n;
}

std::string default_guidance(const std::vector<taskgen::TaskTemplate>* library) {
  std::string out =
      "I can only help with fulfillment planning. Supported tasks: data extraction, plan generation and what-if "
      "analysis.";
  if (!library || library->empty()) return out;
  out += " For example:";
  for (auto cat : {taskgen::Category::DataExtraction, taskgen::Category::PlanGeneration, taskgen::Category::WhatIf}) {
    auto it = std::find_if(library->begin(), library->end(), [&](const auto& t) { return t.category == cat; });
    if (it != library->end()) out += " \"" + example_query(*it) + "\"";
  }
  return out;
}

std::string Backend::default_response() const { return default_guidance(nullptr); }

double similarity(std::string_view query, const std::string& variant, const taskgen::TaskTemplate& t) {
  return match(words(query), compile(variant, t)).score;
}

std::map<std::string, std::string> extract_slots(std::string_view query, const std::string& variant,
                                                 const taskgen::TaskTemplate& t) {
  auto r = match(words(query), compile(variant, t));
  if (!r.missing.empty()) {
    throw ExtractionError("task '" + t.task_id + "': no value for slot '" + r.missing.front() + "' in the query");
  }
  return r.slots;
}

FixtureBackend::FixtureBackend(std::shared_ptr<const std::vector<taskgen::TaskTemplate>> library, double threshold)
    : library_(std::move(library)), threshold_(threshold) {
  if (!library_) throw std::invalid_argument("fixture backend needs a template library");
  if (!(threshold_ >= 0 && threshold_ <= 1)) throw std::invalid_argument("threshold must be in [0, 1]");
}

const taskgen::TaskTemplate& FixtureBackend::find(const std::string& task_id) const {
  for (const auto& t : *library_)
    if (t.task_id == task_id) return t;
  throw ExtractionError("unknown task '" + task_id + "'");
}

RouteDecision FixtureBackend::classify(const std::string& query, TokenUsage& usage) {
  usage.input_tokens += count_tokens(query);
  usage.output_tokens += 1;
  auto q = words(query);
  double best = 0;
  const taskgen::TaskTemplate* winner = nullptr;
  for (const auto& t : *library_) {
    for (const auto& v : t.query_variants) {
      double s = match(q, compile(v, t)).score;
      // ties go to the smaller task_id
      if (s > best || (s == best && winner && s > 0 && t.task_id < winner->task_id)) {
        best = s;
        winner = &t;
      }
    }
  }
  RouteDecision d;
  d.confidence = best;
  if (winner && best >= threshold_) {
    d.in_domain = true;
    d.task_id = winner->task_id;
  }
  return d;
}

std::string FixtureBackend::generate_snippet(const std::string& query, const RouteDecision& decision,
                                             TokenUsage& usage) {
  if (!decision.in_domain || !decision.task_id) throw std::invalid_argument("generate_snippet needs an in-domain decision");
  const auto& t = find(*decision.task_id);
  usage.input_tokens += count_tokens(query);
  auto q = words(query);
  MatchResult best;
  best.score = -1;
  for (const auto& v : t.query_variants) {
    auto r = match(q, compile(v, t));
    if (r.score > best.score) best = std::move(r);
  }
  if (!best.missing.empty()) {
    throw ExtractionError("task '" + t.task_id + "': no value for slot '" + best.missing.front() + "' in the query");
  }
  std::string code = taskgen::fill_template(t.gold_snippet, best.slots).text;
  usage.output_tokens += count_tokens(code);
  return code;
}

std::string FixtureBackend::default_response() const { return default_guidance(library_.get()); }

RouteDecision parse_verdict(std::string_view text, bool& unparsed) {
  auto trim = [](std::string s) {
    auto keep = [](char c) { return alnum(c) || c == '_' || c == '-'; };
    while (!s.empty() && !keep(s.back())) s.pop_back();
    std::size_t b = 0;
    while (b < s.size() && !keep(s[b])) ++b;
    return s.substr(b);
  };
  std::vector<std::string> toks;
  std::string cur;
  for (char c : text) {
    if (std::isspace(static_cast<unsigned char>(c))) {
      if (!cur.empty()) toks.push_back(trim(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (!cur.empty()) toks.push_back(trim(cur));
  toks.erase(std::remove(toks.begin(), toks.end(), ""), toks.end());

  RouteDecision d;
  unparsed = false;
  std::string v = toks.empty() ? "" : lower(toks[0]);
  if (v == "in_domain" || v == "in-domain" || v == "yes" || v == "in") {
    d.in_domain = true;
    d.confidence = 1.0;
    if (toks.size() > 1) d.task_id = toks[1];
  } else if (v == "out_of_domain" || v == "out-of-domain" || v == "ood" || v == "no" || v == "out") {
    d.confidence = 1.0;
  } else {
    unparsed = true;
  }
  return d;
}

std::string strip_fences(std::string_view text) {
  std::size_t open = text.find("```");
  if (open == std::string_view::npos) return std::string(text);
  std::size_t body = text.find('\n', open);
  if (body == std::string_view::npos) return std::string(text);
  ++body;
  std::size_t close = text.find("```", body);
  if (close == std::string_view::npos) close = text.size();
  return std::string(text.substr(body, close - body));
}

std::string fill_prompt(std::string_view tmpl, std::string_view query) {
  std::string out;
  const std::string_view hole = "{query}";
  std::size_t i = 0;
  while (true) {
    std::size_t at = tmpl.find(hole, i);
    if (at == std::string_view::npos) break;
    out.append(tmpl.substr(i, at - i));
    out.append(query);
    i = at + hole.size();
  }
  out.append(tmpl.substr(i));
  return out;
}

Answer handle_query(const std::string& query, Backend& backend, const Executor& exec) {
  Answer a;
  auto fail = [&](std::string detail, bool backend_error = false) {
    a.kind = AnswerKind::ExecutionFailure;
    a.error_detail = std::move(detail);
    a.backend_error = backend_error;
    return a;
  };
  if (query.find_first_not_of(" \t\r\n") == std::string::npos) return fail("empty query");

  try {
    a.route = backend.classify(query, a.usage);
  } catch (const BackendError& e) {
    return fail(std::string("backend error: ") + e.what(), true);
  } catch (const std::exception& e) {
    return fail(std::string("classification failed: ") + e.what());
  }
  if (!a.route.in_domain) {
    a.route.task_id.reset();
    a.kind = AnswerKind::DefaultResponse;
    a.logs = {backend.default_response()};
    return a;
  }

  std::string code;
  try {
    code = backend.generate_snippet(query, a.route, a.usage);
  } catch (const BackendError& e) {
    return fail(std::string("backend error: ") + e.what(), true);
  } catch (const std::exception& e) {
    return fail(std::string("code generation failed: ") + e.what());
  }
  a.snippet = code;

  dsl::Script script;
  try {
    script = dsl::parse_script(code);
  } catch (const dsl::ParseError& e) {
    return fail(std::string("parse_error: ") + e.what());
  }

  dsl::ExecutionResult res;
  try {
    res = exec(script);
  } catch (const std::exception& e) {
    return fail(std::string("runtime_error: ") + e.what());
  }
  a.logs = std::move(res.logs);
  if (res.status != dsl::Status::Ok) return fail(dsl::to_string(res.status) + ": " + res.error_detail.value_or(""));
  a.kind = AnswerKind::TaskResult;
  return a;
}

Executor direct_executor(dsl::Hosts hosts, long step_budget) {
  return [hosts, step_budget](const dsl::Script& script) {
    dsl::ExecEnv env{{}, hosts, step_budget, {}};
    auto r = dsl::execute(script, env);
    if (hosts.model) hosts.model->reset();
    return r;
  };
}

nlohmann::json to_json(const TokenUsage& u) {
  return {{"input_tokens", u.input_tokens}, {"output_tokens", u.output_tokens}};
}

TokenUsage usage_from_json(const nlohmann::json& j) {
  TokenUsage u;
  u.input_tokens = j.value("input_tokens", 0L);
  u.output_tokens = j.value("output_tokens", 0L);
  if (u.input_tokens < 0 || u.output_tokens < 0) throw std::invalid_argument("token counts must be nonnegative");
  return u;
}

nlohmann::json to_json(const RouteDecision& d) {
  return {{"in_domain", d.in_domain},
          {"task_id", d.task_id ? nlohmann::json(*d.task_id) : nlohmann::json(nullptr)},
          {"confidence", d.confidence}};
}

nlohmann::json to_json(const Answer& a) {
  return {{"kind", to_string(a.kind)},
          {"logs", a.logs},
          {"snippet", a.snippet ? nlohmann::json(*a.snippet) : nlohmann::json(nullptr)},
          {"usage", to_json(a.usage)},
          {"route", to_json(a.route)},
          {"error_detail", a.error_detail ? nlohmann::json(*a.error_detail) : nlohmann::json(nullptr)},
          {"backend_error", a.backend_error}};
}

}  // namespace fulfil::router
