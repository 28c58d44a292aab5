#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "fulfil/taskgen/template.hpp"

namespace fulfil::taskgen {

struct PerturbationConfig {
  /// Per-letter probability of a swap with the next letter or a drop.
  double typo_rate = 0.0;
  std::vector<std::string> distraction_phrases;
  /// Chance of wrapping a query with one phrase (as prefix or suffix).
  double distraction_rate = 0.5;
  std::uint64_t seed = 0;
};

struct DatasetRecord {
  std::string query;
  /// "OOD" for out-of-domain records.
  std::string task_id;
  std::map<std::string, std::string> slots;
  std::optional<std::string> gold_snippet;
  bool in_domain = true;

  bool operator==(const DatasetRecord&) const = default;
};

inline constexpr const char* kOodTaskId = "OOD";

/// Deterministic stream for one record, derived from (seed, task_id, index).
std::mt19937_64 record_stream(std::uint64_t seed, const std::string& task_id, std::uint64_t index);

/// Applies typos outside `protected_spans` and maybe a distraction phrase.
std::string perturb(const std::string& text, const std::vector<std::pair<std::size_t, std::size_t>>& protected_spans,
                    const PerturbationConfig& cfg, std::mt19937_64& stream);

/// Number of OOD records that brings the OOD share of the dataset to `fraction`.
std::size_t ood_count(std::size_t in_domain, double fraction);

/// shots_per_task records per template (sorted by task_id, then index),
/// followed by the OOD records.
std::vector<DatasetRecord> generate_dataset(const std::vector<TaskTemplate>& templates,
                                            const std::vector<std::string>& ood_pool, int shots_per_task,
                                            double ood_fraction, const PerturbationConfig& cfg);

nlohmann::json to_json(const DatasetRecord& r);
DatasetRecord record_from_json(const nlohmann::json& j);

void write_jsonl(const std::filesystem::path& path, const std::vector<DatasetRecord>& records);
std::vector<DatasetRecord> read_jsonl(const std::filesystem::path& path);
std::string to_jsonl(const std::vector<DatasetRecord>& records);

/// One query per line; blank lines and lines starting with '#' are skipped.
std::vector<std::string> load_ood_pool(const std::filesystem::path& path);

/// Fine-tuning hyperparameters, written for reference only.
nlohmann::json training_config();
void export_training_config(const std::filesystem::path& path);

}  // namespace fulfil::taskgen
