#pragma once

#include <filesystem>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

namespace fulfil::taskgen {

enum class Category { DataExtraction, PlanGeneration, WhatIf };

std::string to_string(Category c);
Category parse_category(std::string_view text);

/// One task type: query phrasings and the gold snippet, both with `{slot}`
/// holes (`{{` and `}}` are literal braces), plus the values each slot takes.
struct TaskTemplate {
  std::string task_id;
  Category category = Category::DataExtraction;
  std::vector<std::string> query_variants;
  std::string gold_snippet;
  std::map<std::string, std::vector<std::string>> slot_domains;
  /// Regex a slot value must match as a whole token. Optional per slot.
  std::map<std::string, std::string> slot_patterns;
  bool in_domain = true;

  /// The slot's pattern, or a generic token pattern.
  std::string pattern_for(const std::string& slot) const;
};

class TemplateError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Slot names in order of appearance, duplicates kept.
std::vector<std::string> template_holes(std::string_view text);

struct FilledText {
  std::string text;
  /// [begin, end) byte ranges of inserted slot values.
  std::vector<std::pair<std::size_t, std::size_t>> slot_spans;
};

/// Throws TemplateError for a hole without a value or an unbalanced brace.
FilledText fill_template(std::string_view text, const std::map<std::string, std::string>& slots);

/// Throws TemplateError describing the first problem.
void validate(const TaskTemplate& t);

TaskTemplate template_from_json(const nlohmann::json& j);
nlohmann::json to_json(const TaskTemplate& t);

/// Reads every *.json in `dir`, validated and sorted by task_id.
std::vector<TaskTemplate> load_templates(const std::filesystem::path& dir);

}  // namespace fulfil::taskgen
