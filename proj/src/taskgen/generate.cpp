#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>

#include "fulfil/taskgen/generate.hpp"

namespace fulfil::taskgen {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

// Draws are written out by hand so output does not depend on the standard
// library's distribution implementations.
double unit(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }
std::size_t below(std::mt19937_64& rng, std::size_t n) { return static_cast<std::size_t>(rng() % n); }

bool is_letter(char c) { return std::isalpha(static_cast<unsigned char>(c)) != 0; }

}  // namespace

std::mt19937_64 record_stream(std::uint64_t seed, const std::string& task_id, std::uint64_t index) {
  std::uint64_t s = splitmix64(seed);
  s = splitmix64(s ^ fnv1a(task_id));
  s = splitmix64(s ^ index);
  return std::mt19937_64(s);
}

std::string perturb(const std::string& text, const std::vector<std::pair<std::size_t, std::size_t>>& protected_spans,
                    const PerturbationConfig& cfg, std::mt19937_64& stream) {
  std::vector<bool> locked(text.size(), false);
  for (const auto& [b, e] : protected_spans)
    for (std::size_t i = b; i < e && i < text.size(); ++i) locked[i] = true;
  auto eligible = [&](std::size_t i) { return i < text.size() && !locked[i] && is_letter(text[i]); };

  std::string out;
  out.reserve(text.size());
  if (cfg.typo_rate > 0) {
    for (std::size_t i = 0; i < text.size(); ++i) {
      if (!eligible(i) || unit(stream) >= cfg.typo_rate) {
        out += text[i];
        continue;
      }
      if (unit(stream) < 0.5 && eligible(i + 1)) {
        out += text[i + 1];
        out += text[i];
        ++i;
      }
      // otherwise the letter is dropped
    }
  } else {
    out = text;
  }

  if (!cfg.distraction_phrases.empty() && unit(stream) < cfg.distraction_rate) {
    const std::string& phrase = cfg.distraction_phrases[below(stream, cfg.distraction_phrases.size())];
    out = unit(stream) < 0.5 ? phrase + " " + out : out + " " + phrase;
  }
  return out;
}

std::size_t ood_count(std::size_t in_domain, double fraction) {
  if (fraction <= 0) return 0;
  double exact = fraction / (1.0 - fraction) * static_cast<double>(in_domain);
  return static_cast<std::size_t>(std::ceil(exact - 1e-9));
}

std::vector<DatasetRecord> generate_dataset(const std::vector<TaskTemplate>& templates,
                                            const std::vector<std::string>& ood_pool, int shots_per_task,
                                            double ood_fraction, const PerturbationConfig& cfg) {
  if (shots_per_task < 1) throw std::invalid_argument("shots_per_task must be >= 1");
  if (!(ood_fraction >= 0 && ood_fraction < 1)) throw std::invalid_argument("ood_fraction must be in [0, 1)");
  if (cfg.typo_rate < 0 || cfg.typo_rate > 1) throw std::invalid_argument("typo_rate must be in [0, 1]");

  std::vector<const TaskTemplate*> order;
  for (const auto& t : templates) order.push_back(&t);
  std::sort(order.begin(), order.end(), [](auto* a, auto* b) { return a->task_id < b->task_id; });

  std::vector<DatasetRecord> out;
  for (const TaskTemplate* t : order) {
    for (const auto& [slot, values] : t->slot_domains) {
      if (values.empty()) throw TemplateError("template '" + t->task_id + "': slot '" + slot + "' has an empty domain");
    }
    for (int i = 0; i < shots_per_task; ++i) {
      auto stream = record_stream(cfg.seed, t->task_id, static_cast<std::uint64_t>(i));
      DatasetRecord r;
      r.task_id = t->task_id;
      for (const auto& [slot, values] : t->slot_domains) r.slots[slot] = values[below(stream, values.size())];
      FilledText q = fill_template(t->query_variants[static_cast<std::size_t>(i) % t->query_variants.size()], r.slots);
      r.query = perturb(q.text, q.slot_spans, cfg, stream);
      r.gold_snippet = fill_template(t->gold_snippet, r.slots).text;
      r.in_domain = true;
      out.push_back(std::move(r));
    }
  }

  std::size_t n_ood = ood_count(out.size(), ood_fraction);
  if (n_ood > 0 && ood_pool.empty()) throw std::invalid_argument("OOD records requested but the pool is empty");
  for (std::size_t j = 0; j < n_ood; ++j) {
    auto stream = record_stream(cfg.seed, kOodTaskId, j);
    DatasetRecord r;
    r.task_id = kOodTaskId;
    r.in_domain = false;
    r.query = perturb(ood_pool[j % ood_pool.size()], {}, cfg, stream);
    out.push_back(std::move(r));
  }
  return out;
}

nlohmann::json to_json(const DatasetRecord& r) {
  nlohmann::json j = {{"query", r.query}, {"task_id", r.task_id}, {"slots", r.slots}, {"in_domain", r.in_domain}};
  if (r.gold_snippet) j["gold_snippet"] = *r.gold_snippet;
  return j;
}

DatasetRecord record_from_json(const nlohmann::json& j) {
  DatasetRecord r;
  r.query = j.at("query").get<std::string>();
  r.in_domain = j.at("in_domain").get<bool>();
  r.task_id = j.value("task_id", r.in_domain ? std::string() : std::string(kOodTaskId));
  r.slots = j.value("slots", std::map<std::string, std::string>{});
  if (j.contains("gold_snippet") && !j["gold_snippet"].is_null()) r.gold_snippet = j["gold_snippet"].get<std::string>();
  bool ood_id = r.task_id == kOodTaskId;
  if (r.in_domain == ood_id || r.in_domain != r.gold_snippet.has_value()) {
    throw std::invalid_argument("inconsistent record: in_domain, task_id and gold_snippet disagree for '" + r.query + "'");
  }
  return r;
}

std::string to_jsonl(const std::vector<DatasetRecord>& records) {
  std::string out;
  for (const auto& r : records) out += to_json(r).dump() + "\n";
  return out;
}

void write_jsonl(const std::filesystem::path& path, const std::vector<DatasetRecord>& records) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + path.string());
  f << to_jsonl(records);
  if (!f) throw std::runtime_error("write failed: " + path.string());
}

std::vector<DatasetRecord> read_jsonl(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot read " + path.string());
  std::vector<DatasetRecord> out;
  std::string line;
  int n = 0;
  while (std::getline(f, line)) {
    ++n;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      out.push_back(record_from_json(nlohmann::json::parse(line)));
    } catch (const std::exception& e) {
      throw std::runtime_error(path.string() + ":" + std::to_string(n) + ": " + e.what());
    }
  }
  return out;
}

std::vector<std::string> load_ood_pool(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot read " + path.string());
  std::vector<std::string> out;
  std::string line;
  while (std::getline(f, line)) {
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    out.push_back(line);
  }
  return out;
}

nlohmann::json training_config() {
  return {{"batch_size", 16},       {"optimizer", "AdamW"},      {"learning_rate", 0.0002},
          {"max_input_tokens", 1024}, {"max_output_tokens", 500}, {"max_steps", 100000},
          {"adapter", "LoRA"}};
}

void export_training_config(const std::filesystem::path& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + path.string());
  f << training_config().dump(2) << "\n";
  if (!f) throw std::runtime_error("write failed: " + path.string());
}

}  // namespace fulfil::taskgen
