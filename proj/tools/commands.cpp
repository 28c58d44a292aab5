#include "commands.hpp"

#include <csignal>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>

#include <CLI11.hpp>
#include <httplib.h>

#include "fulfil/dsl/world.hpp"
#include "fulfil/eval/eval.hpp"
#include "fulfil/router/router.hpp"
#include "fulfil/service/service.hpp"
#include "fulfil/taskgen/generate.hpp"

namespace fs = std::filesystem;

namespace fulfil::cli {

fs::path data_root() {
  if (const char* env = std::getenv("FULFIL_DATA_ROOT"); env && *env) return env;
  return FULFIL_DEFAULT_DATA_ROOT;
}

namespace {

using Library = std::shared_ptr<const std::vector<taskgen::TaskTemplate>>;

Library load_library(const fs::path& dir) {
  return std::make_shared<const std::vector<taskgen::TaskTemplate>>(taskgen::load_templates(dir));
}

struct BackendArgs {
  std::string kind = "fixture";
  fs::path templates;
  double threshold = 0.35;
  std::string endpoint;
  std::string model;
  fs::path prompts_root;
};

void add_backend_options(CLI::App& app, BackendArgs& a) {
  app.add_option("--backend", a.kind, "fixture or remote")->check(CLI::IsMember({"fixture", "remote"}));
  app.add_option("--templates", a.templates, "task template directory")->check(CLI::ExistingDirectory);
  app.add_option("--threshold", a.threshold, "fixture gate similarity threshold")->check(CLI::Range(0.0, 1.0));
  app.add_option("--endpoint", a.endpoint, "chat-completion URL (env FULFIL_BACKEND_URL wins)");
  app.add_option("--model", a.model, "model name sent to the remote backend");
  app.add_option("--prompts-root", a.prompts_root, "directory holding prompts/gate.txt and prompts/coder.txt");
}

std::shared_ptr<router::Backend> make_backend(const BackendArgs& a) {
  Library lib = load_library(a.templates.empty() ? data_root() / "templates" : a.templates);
  if (a.kind == "fixture") return std::make_shared<router::FixtureBackend>(lib, a.threshold);
  router::RemoteSpec spec;
  spec.endpoint = a.endpoint;
  spec.model = a.model;
  router::load_prompts(spec, a.prompts_root.empty() ? data_root() : a.prompts_root);
  spec = router::apply_env(std::move(spec));
  if (spec.endpoint.empty()) throw CLI::ValidationError("--endpoint", "remote backend needs an endpoint");
  return std::make_shared<router::RemoteBackend>(spec, lib);
}

fs::path instance_or_default(const fs::path& p) { return p.empty() ? data_root() / "data" / "fixture" : p; }

void print_warnings(const std::vector<std::string>& warnings) {
  for (const auto& w : warnings) std::cerr << "warning: " << w << "\n";
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

void report(const eval::RunResult& r, const std::string& model, const std::string& method, bool with_cost,
            const fs::path& csv) {
  eval::ReportRow row{model, method, {r.metrics}, std::nullopt};
  if (with_cost) row.cost_cents = r.mean_cost_cents;
  std::cout << eval::render_table({row});
  std::cout << eval::to_json(r.metrics).dump() << "\n";
  if (!csv.empty()) write_text(csv, eval::render_csv({row}));
  print_warnings(r.warnings);
}

}  // namespace

void setup_gen(CLI::App& app) {
  struct Args {
    fs::path templates, out, ood_pool, training_config, distractions;
    int shots = 0;
    double ood_fraction = 0.04;
    std::uint64_t seed = 0;
    double typo_rate = 0.0;
    double distraction_rate = 0.5;
  };
  auto a = std::make_shared<Args>();
  app.add_option("--templates", a->templates, "task template directory")->check(CLI::ExistingDirectory);
  app.add_option("--shots", a->shots, "records per task")->required()->check(CLI::PositiveNumber);
  app.add_option("--ood-fraction", a->ood_fraction, "share of out-of-domain records")->check(CLI::Range(0.0, 0.99));
  app.add_option("--seed", a->seed, "generation seed");
  app.add_option("--out", a->out, "output JSONL")->required();
  app.add_option("--ood-pool", a->ood_pool, "off-topic queries, one per line")->check(CLI::ExistingFile);
  app.add_option("--typo-rate", a->typo_rate, "per-letter typo probability")->check(CLI::Range(0.0, 1.0));
  app.add_option("--distractions", a->distractions, "distraction phrases, one per line")->check(CLI::ExistingFile);
  app.add_option("--distraction-rate", a->distraction_rate)->check(CLI::Range(0.0, 1.0));
  app.add_option("--training-config", a->training_config, "also write the fine-tuning config JSON here");
  app.callback([a] {
    auto templates = taskgen::load_templates(a->templates.empty() ? data_root() / "templates" : a->templates);
    auto pool = taskgen::load_ood_pool(a->ood_pool.empty() ? data_root() / "data" / "ood_pool.txt" : a->ood_pool);
    taskgen::PerturbationConfig cfg;
    cfg.seed = a->seed;
    cfg.typo_rate = a->typo_rate;
    cfg.distraction_rate = a->distraction_rate;
    if (!a->distractions.empty()) cfg.distraction_phrases = taskgen::load_ood_pool(a->distractions);
    auto records = taskgen::generate_dataset(templates, pool, a->shots, a->ood_fraction, cfg);
    taskgen::write_jsonl(a->out, records);
    if (!a->training_config.empty()) taskgen::export_training_config(a->training_config);
    std::size_t ood = 0;
    for (const auto& r : records) ood += !r.in_domain;
    std::cout << "wrote " << records.size() << " records (" << ood << " out-of-domain) to " << a->out.string()
              << "\n";
  });
}

void setup_eval(CLI::App& app) {
  app.require_subcommand(1);

  struct RunArgs {
    BackendArgs backend;
    fs::path dataset, cost_model, instance, csv, predictions_out;
    std::string model_label = "model", method_label = "method";
  };
  auto r = std::make_shared<RunArgs>();
  CLI::App* run = app.add_subcommand("run", "route a dataset through a backend and score it");
  run->add_option("--dataset", r->dataset, "dataset JSONL")->required()->check(CLI::ExistingFile);
  add_backend_options(*run, r->backend);
  run->add_option("--cost-model", r->cost_model, "cost model JSON")->check(CLI::ExistingFile);
  run->add_option("--instance", r->instance, "instance directory")->check(CLI::ExistingDirectory);
  run->add_option("--csv", r->csv, "also write the report row as CSV");
  run->add_option("--predictions-out", r->predictions_out, "write judged predictions JSONL");
  run->add_option("--label", r->model_label, "model column of the report");
  run->add_option("--method", r->method_label, "method column of the report");
  run->callback([r] {
    auto backend = make_backend(r->backend);
    dsl::World base = dsl::load_world(instance_or_default(r->instance));
    eval::CostModel cm = r->cost_model.empty() ? eval::CostModel{} : eval::load_cost_model(r->cost_model);
    auto result = eval::run_eval(taskgen::read_jsonl(r->dataset), *backend, base, cm);
    if (!r->predictions_out.empty()) eval::write_predictions(r->predictions_out, result.records);
    report(result, r->model_label, r->method_label, !r->cost_model.empty(), r->csv);
  });

  struct JudgeArgs {
    fs::path predictions, cost_model, instance, csv;
    std::string model_label = "model", method_label = "method";
  };
  auto j = std::make_shared<JudgeArgs>();
  CLI::App* judge = app.add_subcommand("judge", "score a predictions JSONL produced elsewhere");
  judge->add_option("--predictions", j->predictions, "predictions JSONL")->required()->check(CLI::ExistingFile);
  judge->add_option("--cost-model", j->cost_model, "cost model JSON")->check(CLI::ExistingFile);
  judge->add_option("--instance", j->instance, "instance directory")->check(CLI::ExistingDirectory);
  judge->add_option("--csv", j->csv, "also write the report row as CSV");
  judge->add_option("--label", j->model_label, "model column of the report");
  judge->add_option("--method", j->method_label, "method column of the report");
  judge->callback([j] {
    dsl::World base = dsl::load_world(instance_or_default(j->instance));
    eval::CostModel cm = j->cost_model.empty() ? eval::CostModel{} : eval::load_cost_model(j->cost_model);
    auto result = eval::judge_predictions(eval::read_predictions(j->predictions), base, cm);
    report(result, j->model_label, j->method_label, !j->cost_model.empty(), j->csv);
  });

  struct SweepArgs {
    fs::path spec, out, instance;
  };
  auto s = std::make_shared<SweepArgs>();
  CLI::App* sweep = app.add_subcommand("sweep", "accuracy versus in-context examples");
  sweep->add_option("--spec", s->spec, "sweep spec JSON")->required()->check(CLI::ExistingFile);
  sweep->add_option("--out", s->out, "output CSV")->required();
  sweep->add_option("--instance", s->instance, "instance directory")->check(CLI::ExistingDirectory);
  sweep->callback([s] {
    dsl::World base = dsl::load_world(instance_or_default(s->instance));
    std::vector<std::string> warnings;
    auto cells = eval::run_sweep(s->spec, base, warnings);
    std::string csv = eval::sweep_csv(cells, &warnings);
    write_text(s->out, csv);
    std::cout << csv;
    print_warnings(warnings);
  });
}

namespace {
httplib::Server* g_server = nullptr;
extern "C" void on_signal(int) {
  if (g_server) g_server->stop();
}
}  // namespace

void setup_serve(CLI::App& app) {
  struct Args {
    BackendArgs backend;
    fs::path instance, session_dir, static_dir;
    std::string host = "127.0.0.1";
    int port = 8080;
    std::string cors = "*";
    std::string name;
  };
  auto a = std::make_shared<Args>();
  app.add_option("--instance", a->instance, "instance directory")->required()->check(CLI::ExistingDirectory);
  add_backend_options(app, a->backend);
  app.add_option("--host", a->host);
  app.add_option("--port", a->port)->check(CLI::Range(0, 65535));
  app.add_option("--session-dir", a->session_dir, "append session logs as JSONL here");
  app.add_option("--static", a->static_dir, "serve a built UI from this directory")->check(CLI::ExistingDirectory);
  app.add_option("--cors-origin", a->cors, "Access-Control-Allow-Origin value");
  app.add_option("--name", a->name, "instance name reported by /health");
  app.callback([a] {
    service::ServiceConfig cfg;
    cfg.instance_name = a->name.empty() ? fs::absolute(a->instance).filename().string() : a->name;
    if (!a->session_dir.empty()) cfg.session_dir = a->session_dir;
    if (!a->static_dir.empty()) cfg.static_dir = a->static_dir;
    cfg.cors_origin = a->cors;
    service::Service svc(dsl::load_world(a->instance), make_backend(a->backend), cfg);

    httplib::Server server;
    svc.install(server);
    g_server = &server;
    std::signal(SIGINT, on_signal);
    std::signal(SIGTERM, on_signal);
    int port = a->port;
    if (port == 0) {
      port = server.bind_to_any_port(a->host);
    } else if (!server.bind_to_port(a->host, port)) {
      throw std::runtime_error("cannot bind " + a->host + ":" + std::to_string(port));
    }
    std::cout << "listening on http://" << a->host << ":" << port << " (" << cfg.instance_name << ", "
              << a->backend.kind << " backend)" << std::endl;
    server.listen_after_bind();
    g_server = nullptr;
  });
}

}  // namespace fulfil::cli
