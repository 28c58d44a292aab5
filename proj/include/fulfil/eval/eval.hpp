#pragma once

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "fulfil/dsl/world.hpp"
#include "fulfil/router/router.hpp"
#include "fulfil/taskgen/generate.hpp"

namespace fulfil::eval {

struct EvalRecord {
  std::string query;
  bool gold_in_domain = true;
  std::optional<std::string> gold_task_id;
  std::optional<std::string> gold_snippet;
  bool predicted_in_domain = false;
  std::optional<std::string> predicted_snippet;
  /// Empty until judged.
  std::optional<bool> judged_correct;
  router::TokenUsage usage;
  /// Set when the backend could not be reached for this record.
  bool failed = false;

  bool operator==(const EvalRecord&) const = default;
};

/// The gold snippet itself does not run: a broken test set, not a model miss.
class FixtureError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

EvalRecord from_dataset(const taskgen::DatasetRecord& r);

nlohmann::json to_json(const EvalRecord& r);
EvalRecord eval_record_from_json(const nlohmann::json& j);
std::vector<EvalRecord> read_predictions(const std::filesystem::path& path);
void write_predictions(const std::filesystem::path& path, const std::vector<EvalRecord>& records);

/// Execution equivalence against fresh copies of `base`: trimmed logs, plan
/// version, committed plan and baseline constraints must all agree.
bool judge(const EvalRecord& record, const dsl::World& base);

struct MetricsReport {
  double overall_acc = 0;
  double coder_acc = 0;
  double f1_ood = 0;
  std::size_t n_total = 0;
  std::size_t n_in_domain = 0;
  std::size_t n_ood = 0;
  /// Confusion counts with out-of-domain as the positive class.
  std::size_t tp = 0, fp = 0, fn = 0;
};

/// Throws std::invalid_argument for an empty list or an unjudged record.
MetricsReport compute_metrics(const std::vector<EvalRecord>& records);
nlohmann::json to_json(const MetricsReport& m);

struct CostModel {
  enum class Kind { PerToken, GpuAmortized };
  Kind kind = Kind::PerToken;
  /// Dollars per million tokens.
  double input_price = 0;
  double output_price = 0;
  /// Dollars per hour.
  double gpu_hourly_rate = 0;
  long queries_per_hour = 1;
};

CostModel cost_model_from_json(const nlohmann::json& j);
nlohmann::json to_json(const CostModel& cm);
CostModel load_cost_model(const std::filesystem::path& path);

/// Cents per query. Token counts may be averages, hence double.
double query_cost(double input_tokens, double output_tokens, const CostModel& cm);
double query_cost(const router::TokenUsage& usage, const CostModel& cm);
/// Two decimals, as in the report.
std::string format_cents(double cents);

/// Price lists for the hosted models, dollars per million tokens.
CostModel gpt4_turbo_prices();
CostModel gpt35_turbo_prices();
/// Approximate prompt size for k in-context examples per task.
double incontext_input_tokens(int shots);
/// Average completion length of the hosted models.
inline constexpr double kHostedOutputTokens = 72.24;

struct RunResult {
  MetricsReport metrics;
  std::vector<EvalRecord> records;
  double mean_cost_cents = 0;
  std::vector<std::string> warnings;
};

/// Routes every query through `backend` (gate and coder only), then judges.
RunResult run_eval(const std::vector<taskgen::DatasetRecord>& dataset, router::Backend& backend,
                   const dsl::World& base, const CostModel& cm);
/// Same judging and aggregation over predictions produced elsewhere.
RunResult judge_predictions(std::vector<EvalRecord> records, const dsl::World& base, const CostModel& cm);

/// One row of the accuracy/cost table. Several runs give mean and stddev.
struct ReportRow {
  std::string model;
  std::string method;
  std::vector<MetricsReport> runs;
  std::optional<double> cost_cents;
};

std::string render_table(const std::vector<ReportRow>& rows);
std::string render_csv(const std::vector<ReportRow>& rows);

/// Population standard deviation; 0 for fewer than two values.
double population_stddev(const std::vector<double>& xs);
double mean(const std::vector<double>& xs);

struct SweepCell {
  std::string model;
  int shots = 0;
  std::vector<double> overall;
};

/// CSV with header model,shots,overall_acc,stddev. Cells without runs are
/// left out and reported in `warnings`.
std::string sweep_csv(const std::vector<SweepCell>& cells, std::vector<std::string>* warnings = nullptr);

/// Reads a sweep spec {"entries":[{"model","shots","runs":[prediction files]}]},
/// judges every run and returns one cell per entry. Paths are relative to
/// the spec file. Missing files are skipped with a warning.
std::vector<SweepCell> run_sweep(const std::filesystem::path& spec, const dsl::World& base,
                                 std::vector<std::string>& warnings);

}  // namespace fulfil::eval
