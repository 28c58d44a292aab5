#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "fulfil/eval/eval.hpp"

using namespace fulfil;
using namespace fulfil::eval;

namespace {

const std::filesystem::path kRoot(FULFIL_SOURCE_DIR);
const std::filesystem::path kData = kRoot / "tests" / "data" / "eval";

const dsl::World& fixture() {
  static const dsl::World w = dsl::load_world(kRoot / "data" / "fixture");
  return w;
}

std::shared_ptr<const std::vector<taskgen::TaskTemplate>> library() {
  static auto lib =
      std::make_shared<const std::vector<taskgen::TaskTemplate>>(taskgen::load_templates(kRoot / "templates"));
  return lib;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Compares with a golden file, or rewrites it when FULFIL_UPDATE_GOLDEN is set.
void expect_golden(const std::string& actual, const std::string& name) {
  auto path = kData / name;
  if (std::getenv("FULFIL_UPDATE_GOLDEN")) {
    std::ofstream(path, std::ios::binary) << actual;
    return;
  }
  EXPECT_EQ(actual, slurp(path)) << "golden file " << name;
}

// A record with a fixed verdict, for metric-only tests.
EvalRecord judged(bool gold_in, bool pred_in, bool correct) {
  EvalRecord r;
  r.query = "q";
  r.gold_in_domain = gold_in;
  if (gold_in) {
    r.gold_task_id = "t";
    r.gold_snippet = "pass";
  }
  r.predicted_in_domain = pred_in;
  r.judged_correct = correct;
  return r;
}

std::vector<EvalRecord> confusion(int tp, int fp, int fn, int in_ok, int in_bad) {
  std::vector<EvalRecord> out;
  for (int i = 0; i < tp; ++i) out.push_back(judged(false, false, true));
  for (int i = 0; i < fn; ++i) out.push_back(judged(false, true, false));
  for (int i = 0; i < fp; ++i) out.push_back(judged(true, false, false));
  for (int i = 0; i < in_ok; ++i) out.push_back(judged(true, true, true));
  for (int i = 0; i < in_bad; ++i) out.push_back(judged(true, true, false));
  return out;
}

EvalRecord in_domain(const std::string& gold, const std::optional<std::string>& pred) {
  EvalRecord r;
  r.query = "q";
  r.gold_task_id = "t";
  r.gold_snippet = gold;
  r.predicted_in_domain = pred.has_value();
  r.predicted_snippet = pred;
  return r;
}

}  // namespace

TEST(Metrics, F1Fixture) {
  // TP=4, FP=1, FN=1 gives P = R = 0.8.
  auto m = compute_metrics(confusion(4, 1, 1, 4, 0));
  EXPECT_NEAR(m.f1_ood, 80.0, 1e-9);
  EXPECT_EQ(m.tp, 4u);
  EXPECT_EQ(m.fp, 1u);
  EXPECT_EQ(m.fn, 1u);
}

TEST(Metrics, RatioFixture) {
  // 10 records, 9 in-domain with 7 correct, 1 OOD correct: 8 of 10.
  auto m = compute_metrics(confusion(1, 0, 0, 7, 2));
  EXPECT_NEAR(m.overall_acc, 80.0, 1e-9);
  EXPECT_NEAR(m.coder_acc, 700.0 / 9.0, 1e-9);
  EXPECT_EQ(format_cents(m.coder_acc), "77.78");
  EXPECT_EQ(m.n_total, m.n_in_domain + m.n_ood);
}

TEST(Metrics, PerfectAndEdges) {
  auto m = compute_metrics(confusion(3, 0, 0, 10, 0));
  EXPECT_EQ(m.overall_acc, 100.0);
  EXPECT_EQ(m.coder_acc, 100.0);
  EXPECT_EQ(m.f1_ood, 100.0);
  // no OOD anywhere and none predicted: nothing to miss
  EXPECT_EQ(compute_metrics(confusion(0, 0, 0, 5, 0)).f1_ood, 100.0);
  EXPECT_EQ(compute_metrics(confusion(0, 2, 0, 5, 0)).f1_ood, 0.0);
  EXPECT_EQ(compute_metrics(confusion(0, 0, 2, 5, 0)).f1_ood, 0.0);
  EXPECT_EQ(compute_metrics(confusion(2, 0, 0, 0, 0)).coder_acc, 100.0);
  EXPECT_THROW(compute_metrics({}), std::invalid_argument);
  auto unjudged = confusion(1, 0, 0, 1, 0);
  unjudged[1].judged_correct.reset();
  EXPECT_THROW(compute_metrics(unjudged), std::invalid_argument);
}

TEST(Metrics, FuzzedConfusionTables) {
  std::mt19937 rng(99);
  for (int i = 0; i < 2000; ++i) {
    int tp = rng() % 20, fp = rng() % 20, fn = rng() % 20, ok = rng() % 30, bad = rng() % 30;
    if (tp + fp + fn + ok + bad == 0) continue;
    auto recs = confusion(tp, fp, fn, ok, bad);
    auto m = compute_metrics(recs);
    for (double v : {m.overall_acc, m.coder_acc, m.f1_ood}) {
      EXPECT_GE(v, 0.0);
      EXPECT_LE(v, 100.0);
    }
    double expect_f1;
    if (tp == 0) {
      expect_f1 = (fp == 0 && fn == 0) ? 100.0 : 0.0;
    } else {
      double p = tp / double(tp + fp), r = tp / double(tp + fn);
      expect_f1 = 100.0 * 2.0 / (1.0 / p + 1.0 / r);
    }
    EXPECT_NEAR(m.f1_ood, expect_f1, 1e-9);
    EXPECT_NEAR(m.overall_acc, 100.0 * (tp + ok) / double(recs.size()), 1e-9);

    std::shuffle(recs.begin(), recs.end(), rng);
    auto shuffled = compute_metrics(recs);
    EXPECT_NEAR(shuffled.overall_acc, m.overall_acc, 1e-9);
    EXPECT_NEAR(shuffled.coder_acc, m.coder_acc, 1e-9);
    EXPECT_NEAR(shuffled.f1_ood, m.f1_ood, 1e-9);

    auto doubled = recs;
    doubled.insert(doubled.end(), recs.begin(), recs.end());
    auto d = compute_metrics(doubled);
    EXPECT_NEAR(d.overall_acc, m.overall_acc, 1e-9);
    EXPECT_NEAR(d.coder_acc, m.coder_acc, 1e-9);
    EXPECT_NEAR(d.f1_ood, m.f1_ood, 1e-9);
  }
}

TEST(Cost, HostedRows) {
  EXPECT_EQ(format_cents(query_cost(4300, 72.24, gpt4_turbo_prices())), "4.52");
  EXPECT_EQ(format_cents(query_cost(8500, 72.24, gpt35_turbo_prices())), "0.44");
  EXPECT_NEAR(query_cost(4300, 72.24, gpt4_turbo_prices()), (4300 * 10.0 + 72.24 * 30.0) / 1e6 * 100, 1e-12);
}

TEST(Cost, GpuAmortized) {
  CostModel cm{CostModel::Kind::GpuAmortized, 0, 0, 2.0, 1000};
  EXPECT_EQ(format_cents(query_cost(123, 456, cm)), "0.20");
  cm.queries_per_hour = 0;
  EXPECT_THROW(query_cost(1, 1, cm), std::invalid_argument);
  EXPECT_THROW(cost_model_from_json({{"kind", "gpu_amortized"}, {"gpu_hourly_rate", 1.0}, {"queries_per_hour", 0}}),
               std::invalid_argument);
  EXPECT_THROW(cost_model_from_json({{"kind", "per_token"}, {"input_price", -1.0}, {"output_price", 1.0}}),
               std::invalid_argument);
  auto back = cost_model_from_json(to_json(gpt4_turbo_prices()));
  EXPECT_EQ(back.input_price, 10.0);
}

TEST(Cost, LinearInTokens) {
  std::mt19937 rng(5);
  auto cm = gpt35_turbo_prices();
  for (int i = 0; i < 500; ++i) {
    double a = rng() % 10000, b = rng() % 500, c = rng() % 10000, d = rng() % 500, k = rng() % 7;
    EXPECT_NEAR(query_cost(a + c, b + d, cm), query_cost(a, b, cm) + query_cost(c, d, cm), 1e-9);
    EXPECT_NEAR(query_cost(k * a, k * b, cm), k * query_cost(a, b, cm), 1e-9);
  }
}

TEST(Cost, IncontextTokenCounts) {
  EXPECT_EQ(incontext_input_tokens(1), 4300);
  EXPECT_EQ(incontext_input_tokens(2), 8500);
  EXPECT_EQ(incontext_input_tokens(3), 12400);
  EXPECT_EQ(incontext_input_tokens(10), 4300 + 4200 * 9);
  EXPECT_THROW(incontext_input_tokens(0), std::invalid_argument);
}

TEST(Judge, IdenticalAndRenamedAreCorrect) {
  std::string gold = "x = retrieve(\"SELECT COUNT(*) FROM demand\")\nlogger.log(x)\n";
  EXPECT_TRUE(judge(in_domain(gold, gold), fixture()));
  EXPECT_TRUE(judge(in_domain(gold, "n = retrieve(\"SELECT COUNT(*) FROM demand\")\nlogger.log(n)\n"), fixture()));
  EXPECT_TRUE(judge(in_domain(gold, "logger.log(retrieve(\"SELECT COUNT(id) FROM demand\"))  \n"), fixture()));
}

TEST(Judge, DifferencesAreIncorrect) {
  std::string gold = "model.optimize()\nplan.update()\n";
  EXPECT_FALSE(judge(in_domain(gold, "model.optimize()\n"), fixture()));
  EXPECT_FALSE(judge(in_domain("logger.log(1)", "logger.log(2)"), fixture()));
  EXPECT_FALSE(judge(in_domain("logger.log(1)", std::nullopt), fixture()));
  EXPECT_FALSE(judge(in_domain("logger.log(1)", "logger.log(1)\nlogger.log(1 / 0)"), fixture()));

  EvalRecord ood;
  ood.query = "how are you";
  ood.gold_in_domain = false;
  ood.predicted_in_domain = true;
  ood.predicted_snippet = "pass";
  EXPECT_FALSE(judge(ood, fixture()));
  ood.predicted_in_domain = false;
  EXPECT_TRUE(judge(ood, fixture()));
}

TEST(Judge, ConstraintSetsCompared) {
  std::string gold =
      "demand.add_constraint(demand_id=\"D\", date=4, enforce=\"Exact Match\")\nmodel.optimize()\nplan.update()\n";
  std::string other =
      "demand.add_constraint(demand_id=\"D2\", date=6, enforce=\"Exact Match\")\nmodel.optimize()\nplan.update()\n";
  EXPECT_TRUE(judge(in_domain(gold, gold), fixture()));
  EXPECT_FALSE(judge(in_domain(gold, other), fixture()));
}

TEST(Judge, BrokenGoldIsFixtureError) {
  EXPECT_THROW(judge(in_domain("logger.log(1 / 0)", "logger.log(1)"), fixture()), FixtureError);
  EXPECT_THROW(judge(in_domain("x = (", "pass"), fixture()), FixtureError);
}

TEST(Judge, GoldAgainstItselfAlwaysCorrect) {
  auto data = taskgen::generate_dataset(*library(), {}, 6, 0.0, {});
  for (const auto& r : data) EXPECT_TRUE(judge(in_domain(*r.gold_snippet, *r.gold_snippet), fixture())) << r.query;
}

TEST(RunEval, FixtureBackendIsPerfectOnOwnData) {
  auto data = taskgen::generate_dataset(*library(), taskgen::load_ood_pool(kRoot / "data" / "ood_pool.txt"), 20, 0.04,
                                        {});
  router::FixtureBackend fb(library());
  auto res = run_eval(data, fb, fixture(), gpt35_turbo_prices());
  EXPECT_EQ(res.metrics.overall_acc, 100.0);
  EXPECT_EQ(res.metrics.coder_acc, 100.0);
  EXPECT_EQ(res.metrics.f1_ood, 100.0);
  EXPECT_TRUE(res.warnings.empty());
  EXPECT_GT(res.mean_cost_cents, 0.0);

  // predictions-file mode reproduces the live numbers
  auto p = std::filesystem::temp_directory_path() / "fulfil_eval_preds.jsonl";
  write_predictions(p, res.records);
  auto again = judge_predictions(read_predictions(p), fixture(), gpt35_turbo_prices());
  EXPECT_EQ(again.metrics.overall_acc, res.metrics.overall_acc);
  EXPECT_EQ(again.metrics.coder_acc, res.metrics.coder_acc);
  EXPECT_EQ(again.metrics.f1_ood, res.metrics.f1_ood);
  EXPECT_EQ(again.mean_cost_cents, res.mean_cost_cents);
}

TEST(RunEval, BackendFailureCountsAsIncorrect) {
  class Down : public router::Backend {
   public:
    std::string kind() const override { return "down"; }
    router::RouteDecision classify(const std::string&, router::TokenUsage&) override {
      throw router::BackendError("unreachable");
    }
    std::string generate_snippet(const std::string&, const router::RouteDecision&, router::TokenUsage&) override {
      return "";
    }
  } down;
  auto data = taskgen::generate_dataset(*library(), {"how are you"}, 1, 0.1, {});
  auto res = run_eval(data, down, fixture(), gpt35_turbo_prices());
  EXPECT_EQ(res.metrics.overall_acc, 0.0);
  EXPECT_FALSE(res.warnings.empty());
}

TEST(Golden, SyntheticPredictionsReport) {
  auto preds = read_predictions(kData / "predictions_synthetic.jsonl");
  CostModel gpu{CostModel::Kind::GpuAmortized, 0, 0, 2.0, 1000};
  auto res = judge_predictions(preds, fixture(), gpu);
  // Built with 5 wrong snippets, 3 in-domain queries called OOD and 1 OOD
  // query answered with code, out of 80 in-domain and 4 OOD records.
  EXPECT_EQ(res.metrics.n_total, 84u);
  EXPECT_EQ(res.metrics.n_ood, 4u);
  EXPECT_NEAR(res.metrics.overall_acc, 100.0 * 75 / 84, 1e-9);
  EXPECT_NEAR(res.metrics.coder_acc, 100.0 * 72 / 80, 1e-9);
  // TP 3, FP 3, FN 1: P = 1/2, R = 3/4.
  EXPECT_NEAR(res.metrics.f1_ood, 200.0 * 0.5 * 0.75 / 1.25, 1e-9);

  std::vector<ReportRow> rows = {{"synthetic-slm", "1000-shot", {res.metrics}, res.mean_cost_cents}};
  for (int k : {1, 2, 3}) {
    rows.push_back({"GPT-3.5-turbo", std::to_string(k) + "-shot", {},
                    query_cost(incontext_input_tokens(k), kHostedOutputTokens, gpt35_turbo_prices())});
    rows.push_back({"GPT-4-turbo", std::to_string(k) + "-shot", {},
                    query_cost(incontext_input_tokens(k), kHostedOutputTokens, gpt4_turbo_prices())});
  }
  expect_golden(render_table(rows), "golden_report.txt");
  expect_golden(render_csv(rows), "golden_report.csv");
}

TEST(Golden, SweepCsv) {
  std::vector<std::string> warnings;
  auto cells = run_sweep(kData / "sweep_spec.json", fixture(), warnings);
  ASSERT_EQ(cells.size(), 7u);
  std::string csv = sweep_csv(cells, &warnings);
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 7);  // header + 6 rows
  EXPECT_EQ(warnings.size(), 2u);                          // missing file, then empty cell
  expect_golden(csv, "golden_sweep.csv");
}

TEST(Sweep, Cardinality) {
  std::vector<SweepCell> cells;
  for (const char* m : {"a", "b"})
    for (int s : {1, 10, 100}) cells.push_back({m, s, {90.0}});
  std::string csv = sweep_csv(cells);
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 7);
  EXPECT_NE(csv.find("a,1,90.00,0.0000\n"), std::string::npos);
}

TEST(Sweep, PopulationStddev) {
  std::vector<double> xs = {95.5, 96.1, 95.9};
  double m = (95.5 + 96.1 + 95.9) / 3;
  double oracle = std::sqrt(((95.5 - m) * (95.5 - m) + (96.1 - m) * (96.1 - m) + (95.9 - m) * (95.9 - m)) / 3);
  EXPECT_NEAR(population_stddev(xs), oracle, 1e-12);
  EXPECT_NEAR(population_stddev(xs), 0.2494, 1e-4);
  EXPECT_EQ(population_stddev({95.5}), 0.0);
}

TEST(Records, JsonRoundTrip) {
  auto r = in_domain("logger.log(1)", "logger.log(1)");
  r.usage = {4, 5};
  r.judged_correct = true;
  EXPECT_EQ(eval_record_from_json(to_json(r)), r);
  auto bad = to_json(r);
  bad["gold_snippet"] = nullptr;
  EXPECT_THROW(eval_record_from_json(bad), std::invalid_argument);
}
