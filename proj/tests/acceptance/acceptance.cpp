// Prints one PASS/FAIL line per acceptance criterion and exits non-zero if
// any criterion fails. Tolerances are pinned below.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <thread>

#include <httplib.h>

#include "fulfil/core/instance_io.hpp"
#include "fulfil/dsl/dsl.hpp"
#include "fulfil/dsl/world.hpp"
#include "fulfil/eval/eval.hpp"
#include "fulfil/opt/model.hpp"
#include "fulfil/query/engine.hpp"
#include "fulfil/service/service.hpp"
#include "fulfil/taskgen/generate.hpp"
#include "support/optimizer_oracle.hpp"
#include "support/query_oracle.hpp"

using namespace fulfil;
namespace fs = std::filesystem;

namespace {

const fs::path kRoot(FULFIL_SOURCE_DIR);

constexpr double kCostTightTol = 0.02;   // cents, the two rows with exact token counts
constexpr double kCostLooseTol = 0.5;    // cents, rows built on approximate token counts
constexpr double kOptimizerBudgetSec = 60.0;
constexpr int kOptimizerInstances = 200;
constexpr int kWhatIfBaselines = 100;
constexpr int kQueryCases = 1000;
constexpr double kMetricTol = 1e-9;
constexpr int kConcurrentChats = 100;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

dsl::World fixture_world() { return dsl::load_world(kRoot / "data" / "fixture"); }

dsl::World world_of(core::Instance inst) { return dsl::World(std::make_shared<const core::Instance>(std::move(inst))); }

std::shared_ptr<const std::vector<taskgen::TaskTemplate>> library() {
  static auto lib =
      std::make_shared<const std::vector<taskgen::TaskTemplate>>(taskgen::load_templates(kRoot / "templates"));
  return lib;
}

// ---------------------------------------------------------------------------

Outcome cost_model() {
  struct Row {
    const char* name;
    eval::CostModel prices;
    int shots;
    double published_cents;
    double tol;
  };
  const std::vector<Row> rows = {
      {"GPT-3.5-turbo 1-shot", eval::gpt35_turbo_prices(), 1, 0.23, kCostLooseTol},
      {"GPT-4-turbo 1-shot", eval::gpt4_turbo_prices(), 1, 4.52, kCostTightTol},
      {"GPT-3.5-turbo 2-shot", eval::gpt35_turbo_prices(), 2, 0.44, kCostTightTol},
      {"GPT-4-turbo 2-shot", eval::gpt4_turbo_prices(), 2, 8.72, kCostLooseTol},
      {"GPT-3.5-turbo 3-shot", eval::gpt35_turbo_prices(), 3, 0.66, kCostLooseTol},
      {"GPT-4-turbo 3-shot", eval::gpt4_turbo_prices(), 3, 12.92, kCostLooseTol},
      {"GPT-4-turbo 5-shot", eval::gpt4_turbo_prices(), 5, 21.32, kCostLooseTol},
      {"GPT-4-turbo 10-shot", eval::gpt4_turbo_prices(), 10, 42.32, kCostLooseTol},
      {"GPT-4-turbo 15-shot", eval::gpt4_turbo_prices(), 15, 63.32, kCostLooseTol},
      {"GPT-4-turbo 20-shot", eval::gpt4_turbo_prices(), 20, 84.32, kCostLooseTol},
  };
  double worst = 0;
  std::string worst_name;
  for (const auto& r : rows) {
    double got = eval::query_cost(eval::incontext_input_tokens(r.shots), eval::kHostedOutputTokens, r.prices);
    double err = std::abs(got - r.published_cents);
    if (err > r.tol) return {false, std::string(r.name) + " = " + fmt("%.4f", got) + " vs " + fmt("%.2f", r.published_cents)};
    if (err > worst) worst = err, worst_name = r.name;
  }
  double g4 = eval::query_cost(4300, 72.24, eval::gpt4_turbo_prices());
  double g35 = eval::query_cost(8500, 72.24, eval::gpt35_turbo_prices());
  return {true, "4.52 -> " + fmt("%.4f", g4) + ", 0.44 -> " + fmt("%.4f", g35) + "; largest gap " +
                    fmt("%.2f", worst) + " (" + worst_name + ")"};
}

Outcome optimizer_oracle() {
  auto start = std::chrono::steady_clock::now();
  std::mt19937_64 rng(0xacce55);
  int feasible = 0;
  for (int i = 0; i < kOptimizerInstances; ++i) {
    auto inst = oracle::random_instance(rng);
    auto cs = oracle::random_constraints(rng, inst, 2);
    auto expected = oracle::brute_force_optimum(inst, cs);
    auto got = opt::solve(inst, cs);
    if (got.feasible != expected.feasible) return {false, "feasibility differs on instance " + std::to_string(i)};
    if (!expected.feasible) continue;
    ++feasible;
    if (*got.objective != expected.objective)
      return {false, "objective " + got.objective->to_string() + " vs " + expected.objective.to_string() +
                         " on instance " + std::to_string(i)};
  }
  double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  bool ok = secs < kOptimizerBudgetSec;
  return {ok, std::to_string(kOptimizerInstances) + " instances (" + std::to_string(feasible) + " feasible), " +
                  fmt("%.2f", secs) + " s"};
}

Outcome what_if_properties() {
  std::mt19937_64 rng(0x5ce7a);
  int baselines = 0, feasible_scenarios = 0, attempts = 0;
  while (baselines < kWhatIfBaselines) {
    if (++attempts > 100 * kWhatIfBaselines) return {false, "could not draw enough feasible baselines"};
    auto inst = std::make_shared<const core::Instance>(oracle::random_instance(rng));
    opt::Model model(inst);
    if (!model.optimize().feasible) continue;
    ++baselines;

    opt::Model before = model;
    auto empty = opt::what_if(model, {});
    if (!empty.feasible || *empty.delta_vs_baseline != core::Fixed{}) return {false, "empty scenario delta != 0"};
    if (!(model == before)) return {false, "model changed after empty what_if"};

    auto cs = oracle::random_constraints(rng, *inst, 3);
    auto r = opt::what_if(model, cs);
    if (!(model == before)) return {false, "model changed after what_if on baseline " + std::to_string(baselines)};
    auto scen = oracle::brute_force_optimum(*inst, cs);
    if (r.feasible != scen.feasible) return {false, "what_if feasibility disagrees with enumeration"};
    if (r.feasible) {
      ++feasible_scenarios;
      if (*r.delta_vs_baseline < core::Fixed{}) return {false, "negative delta " + r.delta_vs_baseline->to_string()};
      if (*r.scenario_objective != scen.objective) return {false, "scenario objective disagrees with enumeration"};
    }
  }
  return {true, std::to_string(baselines) + " baselines, " + std::to_string(feasible_scenarios) +
                    " feasible scenarios, state unchanged"};
}

bool has_null(const query::Value& v) {
  if (v.is_null()) return true;
  if (v.is_list())
    for (const auto& x : v.as_list())
      if (has_null(x)) return true;
  return false;
}

Outcome query_oracle() {
  std::mt19937_64 rng(0x9e3779b9);
  core::Date now(2024, 3, 25);
  int nulls = 0;
  for (int i = 0; i < kQueryCases; ++i) {
    auto raw = oracle::random_tables(rng, now);
    auto store = oracle::to_store(raw, now);
    auto q = oracle::random_query(rng);
    auto got = query::run_query(q.text, store);
    if (!(got == oracle::row_scan(q, raw, now))) return {false, "mismatch on: " + q.text};
    nulls += has_null(got);
  }
  if (nulls == 0) return {false, "no null/empty-aggregate case was drawn"};

  core::Instance empty;
  empty.now = now;
  auto store = query::TableStore::from_instance(empty);
  int w = 0;
  for (int q : {2, 4, 4, 4, 5, 5, 7, 9})
    store.tables.at("inventory").rows.push_back(
        {"S", std::int64_t{w++}, std::int64_t{q}, core::Date(2024, 3, 18)});
  auto sd = query::run_query("SELECT STDDEV(quantity) FROM inventory", store);
  if (!(sd == query::Value{2.0})) return {false, "STDDEV of the classic set is not 2.0"};
  return {true, std::to_string(kQueryCases) + " queries match (" + std::to_string(nulls) +
                    " with null results); STDDEV = 2.0"};
}

Outcome dsl_corpus() {
  int ran = 0;
  for (const auto& entry : fs::directory_iterator(kRoot / "corpus")) {
    if (entry.path().extension() != ".dsl") continue;
    dsl::World w = fixture_world();
    auto env = w.env();
    auto r = dsl::run_snippet(read_file(entry.path()), env);
    if (r.status != dsl::Status::Ok)
      return {false, entry.path().filename().string() + ": " + r.error_detail.value_or("not ok")};
    ++ran;
  }
  if (ran != 6) return {false, "expected 6 snippets, found " + std::to_string(ran)};

  core::Instance infeasible = core::load_instance(kRoot / "data" / "fixture");
  for (auto& d : infeasible.demands)
    if (d.id == "D") d.ideal_dock_week = 0;
  dsl::World wi = world_of(infeasible);
  auto env_i = wi.env();
  auto ri = dsl::run_snippet(read_file(kRoot / "corpus" / "dock_ideal_date.dsl"), env_i);
  const std::vector<std::string> sorry = {"Sorry, impossible to dock demand D at its ideal date."};
  if (ri.logs != sorry) return {false, "infeasible fixture logged something else"};

  core::Instance no_ship = core::load_instance(kRoot / "data" / "fixture");
  no_ship.shipments.clear();
  dsl::World we = world_of(no_ship);
  auto env_e = we.env();
  auto re = dsl::run_snippet(read_file(kRoot / "corpus" / "cross_geo_fraction.dsl"), env_e);
  if (re.logs != std::vector<std::string>{"No shipments at all"}) return {false, "empty-shipment fixture logged something else"};
  return {true, "6 snippets run; infeasible and empty-shipment messages exact"};
}

bool close(double a, double b) { return std::abs(a - b) <= kMetricTol; }

Outcome end_to_end() {
  auto lib = library();
  if (lib->size() < 10) return {false, "only " + std::to_string(lib->size()) + " templates"};
  constexpr int kShots = 20;
  constexpr double kOod = 0.04;
  taskgen::PerturbationConfig cfg;
  cfg.seed = 20240517;
  auto data = taskgen::generate_dataset(*lib, taskgen::load_ood_pool(kRoot / "data" / "ood_pool.txt"), kShots, kOod, cfg);
  dsl::World base = fixture_world();
  router::FixtureBackend backend(lib);
  auto res = eval::run_eval(data, backend, base, {});
  const auto& m = res.metrics;
  if (!(m.overall_acc == 100 && m.coder_acc == 100 && m.f1_ood == 100))
    return {false, "clean run " + fmt("%.2f", m.overall_acc) + "/" + fmt("%.2f", m.coder_acc) + "/" +
                       fmt("%.2f", m.f1_ood)};

  // 20 injected mistakes: 12 wrong snippets, 5 in-domain queries sent to the
  // default response, 3 OOD queries answered with code.
  std::size_t n_in = m.n_in_domain, n_ood = m.n_ood, n = m.n_total;
  auto recs = res.records;
  int wrong = 0, missed = 0, false_code = 0;
  for (std::size_t i = 0; i < recs.size(); ++i) {
    auto& r = recs[i];
    r.judged_correct.reset();
    if (r.gold_in_domain && i % 7 == 0 && wrong < 12) {
      r.predicted_snippet = "logger.log(\"not the answer\")\n";
      ++wrong;
    } else if (r.gold_in_domain && i % 11 == 3 && missed < 5) {
      r.predicted_in_domain = false;
      r.predicted_snippet.reset();
      ++missed;
    } else if (!r.gold_in_domain && false_code < 3) {
      r.predicted_in_domain = true;
      r.predicted_snippet = "model.optimize()\n";
      ++false_code;
    }
  }
  if (wrong + missed + false_code != 20) return {false, "could not inject 20 mistakes"};
  auto inj = eval::judge_predictions(recs, base, {}).metrics;

  double overall = 100.0 * static_cast<double>(n - 20) / static_cast<double>(n);
  double coder = 100.0 * static_cast<double>(n_in - 17) / static_cast<double>(n_in);
  double tp = static_cast<double>(n_ood - 3), fp = 5, fn = 3;
  double f1 = 100.0 * 2 * tp / (2 * tp + fp + fn);
  bool ok = close(inj.overall_acc, overall) && close(inj.coder_acc, coder) && close(inj.f1_ood, f1) &&
            inj.tp == n_ood - 3 && inj.fp == 5 && inj.fn == 3;
  return {ok, std::to_string(lib->size()) + " templates x " + std::to_string(kShots) + " + " + std::to_string(n_ood) +
                  " OOD: 100/100/100; injected " + fmt("%.4f", inj.overall_acc) + "/" + fmt("%.4f", inj.coder_acc) +
                  "/" + fmt("%.4f", inj.f1_ood) + " vs " + fmt("%.4f", overall) + "/" + fmt("%.4f", coder) + "/" +
                  fmt("%.4f", f1)};
}

eval::EvalRecord judged(bool gold_in, bool pred_in, bool correct) {
  eval::EvalRecord r;
  r.query = "q";
  r.gold_in_domain = gold_in;
  if (gold_in) r.gold_task_id = "t", r.gold_snippet = "logger.log(1)\n";
  r.predicted_in_domain = pred_in;
  if (pred_in) r.predicted_snippet = "logger.log(1)\n";
  r.judged_correct = correct;
  return r;
}

Outcome metric_fixtures() {
  // OOD positive: 4 caught, 1 in-domain flagged OOD, 1 OOD missed.
  std::vector<eval::EvalRecord> f1set;
  for (int i = 0; i < 4; ++i) f1set.push_back(judged(false, false, true));
  f1set.push_back(judged(true, false, false));
  f1set.push_back(judged(false, true, false));
  for (int i = 0; i < 4; ++i) f1set.push_back(judged(true, true, true));
  auto a = eval::compute_metrics(f1set);

  std::vector<eval::EvalRecord> acc;
  for (int i = 0; i < 10; ++i) acc.push_back(judged(true, true, i < 8));
  auto b = eval::compute_metrics(acc);
  bool ok = a.tp == 4 && a.fp == 1 && a.fn == 1 && close(a.f1_ood, 80.0) && close(b.overall_acc, 80.0);
  return {ok, "F1 " + fmt("%.2f", a.f1_ood) + ", overall " + fmt("%.2f", b.overall_acc)};
}

Outcome predictions_golden() {
  const fs::path data = kRoot / "tests" / "data" / "eval";
  dsl::World base = fixture_world();
  eval::CostModel gpu{eval::CostModel::Kind::GpuAmortized, 0, 0, 2.0, 1000};
  auto res = eval::judge_predictions(eval::read_predictions(data / "predictions_synthetic.jsonl"), base, gpu);
  std::vector<eval::ReportRow> rows = {{"synthetic-slm", "1000-shot", {res.metrics}, res.mean_cost_cents}};
  for (int k : {1, 2, 3}) {
    rows.push_back({"GPT-3.5-turbo", std::to_string(k) + "-shot", {},
                    eval::query_cost(eval::incontext_input_tokens(k), eval::kHostedOutputTokens, eval::gpt35_turbo_prices())});
    rows.push_back({"GPT-4-turbo", std::to_string(k) + "-shot", {},
                    eval::query_cost(eval::incontext_input_tokens(k), eval::kHostedOutputTokens, eval::gpt4_turbo_prices())});
  }
  if (eval::render_table(rows) != read_file(data / "golden_report.txt")) return {false, "table differs from golden"};
  if (eval::render_csv(rows) != read_file(data / "golden_report.csv")) return {false, "report CSV differs from golden"};

  std::vector<std::string> warnings;
  auto cells = eval::run_sweep(data / "sweep_spec.json", base, warnings);
  std::string csv = eval::sweep_csv(cells, &warnings);
  if (csv != read_file(data / "golden_sweep.csv")) return {false, "sweep CSV differs from golden"};
  // Same input twice gives the same bytes.
  std::vector<std::string> w2;
  if (eval::sweep_csv(eval::run_sweep(data / "sweep_spec.json", base, w2)) != csv) return {false, "sweep not deterministic"};
  return {true, "report table, report CSV and sweep CSV match goldens"};
}

Outcome service_concurrency() {
  service::Service svc(fixture_world(), std::make_shared<router::FixtureBackend>(library()), {});
  httplib::Server server;
  svc.install(server);
  int port = server.bind_to_any_port("127.0.0.1");
  std::thread th([&] { server.listen_after_bind(); });
  server.wait_until_ready();

  const std::vector<std::string> mix = {
      "Update plan",
      "What is the standard deviation of supplier S's inventory in the last 4 weeks?",
      "Dock demand D2 on its ideal dock date!",
      "how are you",
      "Optimize plan",
      "What are the cost implications of not using suppliers from region R on month 2?",
  };
  std::vector<nlohmann::json> bodies(kConcurrentChats);
  std::vector<int> status(kConcurrentChats, 0);
  std::vector<std::thread> clients;
  for (int i = 0; i < kConcurrentChats; ++i) {
    clients.emplace_back([&, i] {
      httplib::Client cli("127.0.0.1", port);
      cli.set_read_timeout(60, 0);
      nlohmann::json req = {{"query", mix[i % mix.size()]}, {"session_id", "a" + std::to_string(i % 9)}};
      auto r = cli.Post("/chat", req.dump(), "application/json");
      if (!r) {
        bodies[i] = httplib::to_string(r.error());
        return;
      }
      status[i] = r->status;
      bodies[i] = nlohmann::json::parse(r->body);
    });
  }
  for (auto& c : clients) c.join();
  server.stop();
  th.join();

  int commits = 0;
  std::map<std::string, std::set<long>> seqs;
  for (int i = 0; i < kConcurrentChats; ++i) {
    if (status[i] != 200)
      return {false, "request " + std::to_string(i) + " got status " + std::to_string(status[i]) + " " + bodies[i].dump()};
    const auto& e = bodies[i]["entry"];
    int before = e["plan_version_before"], after = e["plan_version_after"];
    if (after == before + 1) ++commits;
    else if (after != before) return {false, "entry jumped versions"};
    if (!seqs[bodies[i]["session_id"]].insert(e["seq"].get<long>()).second) return {false, "duplicate seq"};
  }
  if (svc.plan_version() != commits)
    return {false, "version " + std::to_string(svc.plan_version()) + " != commits " + std::to_string(commits)};
  std::size_t logged = 0;
  for (const auto& [sid, s] : seqs) {
    auto log = svc.session_log(sid).body["entries"];
    if (log.size() != s.size()) return {false, "session " + sid + " log size mismatch"};
    logged += log.size();
  }
  if (logged != static_cast<std::size_t>(kConcurrentChats)) return {false, "log entries != responses"};
  return {true, std::to_string(kConcurrentChats) + " concurrent chats, " + std::to_string(commits) +
                    " commits = final version, every response logged"};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"cost-model reproduction", cost_model},
      {"optimizer vs enumeration", optimizer_oracle},
      {"what-if properties", what_if_properties},
      {"query engine vs row scan", query_oracle},
      {"snippet corpus", dsl_corpus},
      {"end-to-end fixture run", end_to_end},
      {"metric fixtures", metric_fixtures},
      {"predictions report and sweep goldens", predictions_golden},
      {"service concurrency invariants", service_concurrency},
  };
  int failed = 0;
  for (const auto& [name, fn] : criteria) {
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failed += !o.pass;
    std::cout << (o.pass ? "PASS" : "FAIL") << "  " << name << ": " << o.detail << std::endl;
  }
  std::cout << (criteria.size() - failed) << "/" << criteria.size() << " criteria passed" << std::endl;
  return failed == 0 ? 0 : 1;
}
