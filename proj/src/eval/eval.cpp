#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "fulfil/eval/eval.hpp"

namespace fulfil::eval {

namespace {

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

struct Observation {
  dsl::Status status;
  std::vector<std::string> logs;
  int plan_version;
  nlohmann::json plan;
  std::vector<std::string> constraints;
  std::optional<std::string> error;

  bool same_effect(const Observation& o) const {
    return logs == o.logs && plan_version == o.plan_version && plan == o.plan && constraints == o.constraints;
  }
};

// Runs the snippet the way the service does: fresh state, then any leftover
// scenario constraints dropped.
Observation observe(const std::string& code, const dsl::World& base) {
  dsl::World w = base;
  Observation o;
  dsl::ExecEnv env = w.env();
  auto r = dsl::run_snippet(code, env);
  w.model.reset();
  o.status = r.status;
  o.error = r.error_detail;
  for (const auto& line : r.logs) o.logs.push_back(trim(line));
  o.plan_version = w.plan.version();
  o.plan = w.plan.current() ? opt::to_json(*w.plan.current()) : nlohmann::json(nullptr);
  for (const auto& c : w.model.baseline_constraints()) o.constraints.push_back(opt::to_json(c).dump());
  std::sort(o.constraints.begin(), o.constraints.end());
  return o;
}

std::string fixed2(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

// Display width counting UTF-8 code points.
std::size_t width(const std::string& s) {
  std::size_t n = 0;
  for (unsigned char c : s)
    if ((c & 0xC0) != 0x80) ++n;
  return n;
}

std::string pad(const std::string& s, std::size_t w) { return s + std::string(w > width(s) ? w - width(s) : 0, ' '); }

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

EvalRecord from_dataset(const taskgen::DatasetRecord& r) {
  EvalRecord e;
  e.query = r.query;
  e.gold_in_domain = r.in_domain;
  if (r.in_domain) e.gold_task_id = r.task_id;
  e.gold_snippet = r.gold_snippet;
  return e;
}

nlohmann::json to_json(const EvalRecord& r) {
  auto opt = [](const std::optional<std::string>& s) { return s ? nlohmann::json(*s) : nlohmann::json(nullptr); };
  nlohmann::json j = {{"query", r.query},
                      {"gold_in_domain", r.gold_in_domain},
                      {"gold_task_id", opt(r.gold_task_id)},
                      {"gold_snippet", opt(r.gold_snippet)},
                      {"predicted_in_domain", r.predicted_in_domain},
                      {"predicted_snippet", opt(r.predicted_snippet)},
                      {"usage", router::to_json(r.usage)},
                      {"failed", r.failed}};
  j["judged_correct"] = r.judged_correct ? nlohmann::json(*r.judged_correct) : nlohmann::json(nullptr);
  return j;
}

EvalRecord eval_record_from_json(const nlohmann::json& j) {
  auto opt = [&](const char* key) -> std::optional<std::string> {
    if (!j.contains(key) || j[key].is_null()) return std::nullopt;
    return j[key].get<std::string>();
  };
  EvalRecord r;
  r.query = j.at("query").get<std::string>();
  r.gold_in_domain = j.at("gold_in_domain").get<bool>();
  r.gold_task_id = opt("gold_task_id");
  r.gold_snippet = opt("gold_snippet");
  r.predicted_in_domain = j.at("predicted_in_domain").get<bool>();
  r.predicted_snippet = opt("predicted_snippet");
  if (j.contains("usage")) r.usage = router::usage_from_json(j["usage"]);
  r.failed = j.value("failed", false);
  if (j.contains("judged_correct") && !j["judged_correct"].is_null()) r.judged_correct = j["judged_correct"].get<bool>();
  if (r.gold_in_domain != r.gold_snippet.has_value() || r.gold_in_domain != r.gold_task_id.has_value()) {
    throw std::invalid_argument("gold fields disagree with gold_in_domain for '" + r.query + "'");
  }
  return r;
}

std::vector<EvalRecord> read_predictions(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::vector<EvalRecord> out;
  std::string line;
  int n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (trim(line).empty()) continue;
    try {
      out.push_back(eval_record_from_json(nlohmann::json::parse(line)));
    } catch (const std::exception& e) {
      throw std::runtime_error(path.string() + ":" + std::to_string(n) + ": " + e.what());
    }
  }
  return out;
}

void write_predictions(const std::filesystem::path& path, const std::vector<EvalRecord>& records) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  for (const auto& r : records) out << to_json(r).dump() << "\n";
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

bool judge(const EvalRecord& record, const dsl::World& base) {
  if (record.failed) return false;
  if (!record.gold_in_domain) return !record.predicted_in_domain;
  if (!record.gold_snippet) throw std::invalid_argument("in-domain record without gold snippet: '" + record.query + "'");

  Observation gold = observe(*record.gold_snippet, base);
  if (gold.status != dsl::Status::Ok) {
    throw FixtureError("gold snippet fails for '" + record.query + "': " + dsl::to_string(gold.status) + ": " +
                       gold.error.value_or(""));
  }
  if (!record.predicted_in_domain || !record.predicted_snippet) return false;
  Observation pred = observe(*record.predicted_snippet, base);
  return pred.status == dsl::Status::Ok && pred.same_effect(gold);
}

MetricsReport compute_metrics(const std::vector<EvalRecord>& records) {
  if (records.empty()) throw std::invalid_argument("no records to score");
  MetricsReport m;
  std::size_t correct = 0, correct_in = 0;
  for (const auto& r : records) {
    if (!r.judged_correct) throw std::invalid_argument("record not judged: '" + r.query + "'");
    bool ok = *r.judged_correct;
    ++m.n_total;
    if (ok) ++correct;
    if (r.gold_in_domain) {
      ++m.n_in_domain;
      if (ok) ++correct_in;
      if (!r.predicted_in_domain && !r.failed) ++m.fp;
    } else {
      ++m.n_ood;
      if (ok)
        ++m.tp;
      else
        ++m.fn;
    }
  }
  m.overall_acc = 100.0 * static_cast<double>(correct) / static_cast<double>(m.n_total);
  m.coder_acc = m.n_in_domain == 0 ? 100.0 : 100.0 * static_cast<double>(correct_in) / static_cast<double>(m.n_in_domain);
  if (m.tp == 0) {
    m.f1_ood = (m.fp == 0 && m.fn == 0) ? 100.0 : 0.0;
  } else {
    double p = static_cast<double>(m.tp) / static_cast<double>(m.tp + m.fp);
    double r = static_cast<double>(m.tp) / static_cast<double>(m.tp + m.fn);
    m.f1_ood = 200.0 * p * r / (p + r);
  }
  return m;
}

nlohmann::json to_json(const MetricsReport& m) {
  return {{"overall_acc", m.overall_acc}, {"coder_acc", m.coder_acc}, {"f1_ood", m.f1_ood},
          {"n_total", m.n_total},         {"n_in_domain", m.n_in_domain}, {"n_ood", m.n_ood},
          {"tp", m.tp},                   {"fp", m.fp},                   {"fn", m.fn}};
}

CostModel cost_model_from_json(const nlohmann::json& j) {
  CostModel cm;
  std::string kind = j.at("kind").get<std::string>();
  if (kind == "per_token") {
    cm.kind = CostModel::Kind::PerToken;
    cm.input_price = j.at("input_price").get<double>();
    cm.output_price = j.at("output_price").get<double>();
    if (cm.input_price < 0 || cm.output_price < 0) throw std::invalid_argument("prices must be >= 0");
  } else if (kind == "gpu_amortized") {
    cm.kind = CostModel::Kind::GpuAmortized;
    cm.gpu_hourly_rate = j.at("gpu_hourly_rate").get<double>();
    cm.queries_per_hour = j.at("queries_per_hour").get<long>();
    if (cm.gpu_hourly_rate < 0) throw std::invalid_argument("gpu_hourly_rate must be >= 0");
    if (cm.queries_per_hour <= 0) throw std::invalid_argument("queries_per_hour must be positive");
  } else {
    throw std::invalid_argument("unknown cost model kind '" + kind + "'");
  }
  return cm;
}

nlohmann::json to_json(const CostModel& cm) {
  if (cm.kind == CostModel::Kind::PerToken)
    return {{"kind", "per_token"}, {"input_price", cm.input_price}, {"output_price", cm.output_price}};
  return {{"kind", "gpu_amortized"}, {"gpu_hourly_rate", cm.gpu_hourly_rate}, {"queries_per_hour", cm.queries_per_hour}};
}

CostModel load_cost_model(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  return cost_model_from_json(nlohmann::json::parse(in));
}

double query_cost(double input_tokens, double output_tokens, const CostModel& cm) {
  if (cm.kind == CostModel::Kind::GpuAmortized) {
    if (cm.queries_per_hour <= 0) throw std::invalid_argument("queries_per_hour must be positive");
    return cm.gpu_hourly_rate / static_cast<double>(cm.queries_per_hour) * 100.0;
  }
  double dollars = (input_tokens * cm.input_price + output_tokens * cm.output_price) / 1e6;
  return dollars * 100.0;
}

double query_cost(const router::TokenUsage& usage, const CostModel& cm) {
  return query_cost(static_cast<double>(usage.input_tokens), static_cast<double>(usage.output_tokens), cm);
}

std::string format_cents(double cents) { return fixed2(cents); }

CostModel gpt4_turbo_prices() { return {CostModel::Kind::PerToken, 10.0, 30.0, 0, 1}; }
CostModel gpt35_turbo_prices() { return {CostModel::Kind::PerToken, 0.50, 1.50, 0, 1}; }

double incontext_input_tokens(int shots) {
  if (shots < 1) throw std::invalid_argument("shots must be >= 1");
  // Quoted counts where they exist, linear growth of about 4200 per extra
  // example elsewhere.
  switch (shots) {
    case 1:
      return 4300;
    case 2:
      return 8500;
    case 3:
      return 12400;
    default:
      return 4300 + 4200.0 * (shots - 1);
  }
}

RunResult judge_predictions(std::vector<EvalRecord> records, const dsl::World& base, const CostModel& cm) {
  RunResult out;
  double cost = 0;
  for (auto& r : records) {
    r.judged_correct = judge(r, base);
    if (r.failed) out.warnings.push_back("backend failure counted as incorrect: '" + r.query + "'");
    cost += query_cost(r.usage, cm);
  }
  out.metrics = compute_metrics(records);
  out.mean_cost_cents = records.empty() ? 0 : cost / static_cast<double>(records.size());
  out.records = std::move(records);
  return out;
}

RunResult run_eval(const std::vector<taskgen::DatasetRecord>& dataset, router::Backend& backend,
                   const dsl::World& base, const CostModel& cm) {
  std::vector<EvalRecord> records;
  std::vector<std::string> warnings;
  records.reserve(dataset.size());
  for (const auto& d : dataset) {
    EvalRecord e = from_dataset(d);
    try {
      auto decision = backend.classify(d.query, e.usage);
      e.predicted_in_domain = decision.in_domain;
      if (decision.in_domain) {
        try {
          e.predicted_snippet = backend.generate_snippet(d.query, decision, e.usage);
        } catch (const router::ExtractionError&) {
          // no snippet: judged incorrect
        }
      }
    } catch (const router::BackendError& ex) {
      e.failed = true;
      warnings.push_back(std::string("backend error: ") + ex.what());
    }
    records.push_back(std::move(e));
  }
  RunResult out = judge_predictions(std::move(records), base, cm);
  out.warnings.insert(out.warnings.begin(), warnings.begin(), warnings.end());
  return out;
}

double mean(const std::vector<double>& xs) {
  if (xs.empty()) return 0;
  double s = 0;
  for (double x : xs) s += x;
  return s / static_cast<double>(xs.size());
}

double population_stddev(const std::vector<double>& xs) {
  if (xs.size() < 2) return 0;
  double m = mean(xs), ss = 0;
  for (double x : xs) ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<double>(xs.size()));
}

namespace {

struct RowText {
  std::string model, method, overall, coder, f1, cost;
};

std::vector<double> pick(const ReportRow& row, double MetricsReport::*field) {
  std::vector<double> out;
  for (const auto& r : row.runs) out.push_back(r.*field);
  return out;
}

std::string stat_text(const std::vector<double>& xs) {
  if (xs.empty()) return "-";
  if (xs.size() == 1) return fixed2(xs[0]);
  return fixed2(mean(xs)) + " ± " + fixed2(population_stddev(xs));
}

}  // namespace

std::string render_table(const std::vector<ReportRow>& rows) {
  std::vector<RowText> text = {{"Model", "Method", "Overall Acc. (%)", "Coder Acc. (%)", "F-1 (%)", "Cost (¢)"}};
  for (const auto& r : rows) {
    text.push_back({r.model, r.method, stat_text(pick(r, &MetricsReport::overall_acc)),
                    stat_text(pick(r, &MetricsReport::coder_acc)), stat_text(pick(r, &MetricsReport::f1_ood)),
                    r.cost_cents ? format_cents(*r.cost_cents) : "-"});
  }
  std::size_t w[6] = {0, 0, 0, 0, 0, 0};
  for (const auto& t : text) {
    const std::string* cells[6] = {&t.model, &t.method, &t.overall, &t.coder, &t.f1, &t.cost};
    for (int i = 0; i < 6; ++i) w[i] = std::max(w[i], width(*cells[i]));
  }
  std::string out;
  for (std::size_t k = 0; k < text.size(); ++k) {
    const auto& t = text[k];
    const std::string* cells[6] = {&t.model, &t.method, &t.overall, &t.coder, &t.f1, &t.cost};
    std::string line;
    for (int i = 0; i < 6; ++i) line += (i ? " | " : "") + pad(*cells[i], w[i]);
    while (!line.empty() && line.back() == ' ') line.pop_back();
    out += line + "\n";
    if (k == 0) {
      std::string rule;
      for (int i = 0; i < 6; ++i) rule += (i ? "-+-" : "") + std::string(w[i], '-');
      out += rule + "\n";
    }
  }
  return out;
}

std::string render_csv(const std::vector<ReportRow>& rows) {
  std::string out = "model,method,runs,overall_acc,overall_std,coder_acc,coder_std,f1_ood,f1_std,cost_cents\n";
  for (const auto& r : rows) {
    auto o = pick(r, &MetricsReport::overall_acc), c = pick(r, &MetricsReport::coder_acc),
         f = pick(r, &MetricsReport::f1_ood);
    auto num = [](const std::vector<double>& xs, bool sd) {
      if (xs.empty()) return std::string();
      return fixed2(sd ? population_stddev(xs) : mean(xs));
    };
    out += csv_field(r.model) + "," + csv_field(r.method) + "," + std::to_string(r.runs.size()) + "," + num(o, false) +
           "," + num(o, true) + "," + num(c, false) + "," + num(c, true) + "," + num(f, false) + "," + num(f, true) +
           "," + (r.cost_cents ? format_cents(*r.cost_cents) : "") + "\n";
  }
  return out;
}

std::string sweep_csv(const std::vector<SweepCell>& cells, std::vector<std::string>* warnings) {
  std::string out = "model,shots,overall_acc,stddev\n";
  for (const auto& c : cells) {
    if (c.overall.empty()) {
      if (warnings) warnings->push_back("no runs for " + c.model + " at " + std::to_string(c.shots) + " shots");
      continue;
    }
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.4f", population_stddev(c.overall));
    out += csv_field(c.model) + "," + std::to_string(c.shots) + "," + fixed2(mean(c.overall)) + "," + buf + "\n";
  }
  return out;
}

std::vector<SweepCell> run_sweep(const std::filesystem::path& spec, const dsl::World& base,
                                 std::vector<std::string>& warnings) {
  std::ifstream in(spec);
  if (!in) throw std::runtime_error("cannot read " + spec.string());
  nlohmann::json j = nlohmann::json::parse(in);
  std::vector<SweepCell> cells;
  CostModel free_model;
  for (const auto& e : j.at("entries")) {
    SweepCell cell;
    cell.model = e.at("model").get<std::string>();
    cell.shots = e.at("shots").get<int>();
    for (const auto& run : e.value("runs", nlohmann::json::array())) {
      if (run.is_number()) {
        cell.overall.push_back(run.get<double>());
        continue;
      }
      std::filesystem::path p = spec.parent_path() / run.get<std::string>();
      if (!std::filesystem::exists(p)) {
        warnings.push_back("missing predictions file " + p.string());
        continue;
      }
      cell.overall.push_back(judge_predictions(read_predictions(p), base, free_model).metrics.overall_acc);
    }
    cells.push_back(std::move(cell));
  }
  return cells;
}

}  // namespace fulfil::eval
