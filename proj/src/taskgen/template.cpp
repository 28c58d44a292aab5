#include <algorithm>
#include <cctype>
#include <fstream>
#include <regex>
#include <set>

#include "fulfil/taskgen/template.hpp"

namespace fulfil::taskgen {

std::string to_string(Category c) {
  switch (c) {
    case Category::DataExtraction:
      return "data_extraction";
    case Category::PlanGeneration:
      return "plan_generation";
    case Category::WhatIf:
      return "what_if";
  }
  return "data_extraction";
}

Category parse_category(std::string_view text) {
  if (text == "data_extraction") return Category::DataExtraction;
  if (text == "plan_generation") return Category::PlanGeneration;
  if (text == "what_if") return Category::WhatIf;
  throw TemplateError("unknown category '" + std::string(text) + "'");
}

std::string TaskTemplate::pattern_for(const std::string& slot) const {
  auto it = slot_patterns.find(slot);
  return it == slot_patterns.end() ? "[A-Za-z0-9_]+" : it->second;
}

namespace {

bool is_ident(std::string_view s) {
  if (s.empty() || std::isdigit(static_cast<unsigned char>(s[0]))) return false;
  return std::all_of(s.begin(), s.end(), [](char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; });
}

// Calls on_text for literal runs and on_hole for each slot name.
template <typename Text, typename Hole>
void scan(std::string_view text, Text on_text, Hole on_hole) {
  for (std::size_t i = 0; i < text.size();) {
    char c = text[i];
    if ((c == '{' || c == '}') && i + 1 < text.size() && text[i + 1] == c) {
      on_text(std::string_view(&text[i], 1));
      i += 2;
      continue;
    }
    if (c == '}') throw TemplateError("unbalanced '}' at offset " + std::to_string(i));
    if (c == '{') {
      std::size_t close = text.find('}', i);
      if (close == std::string_view::npos) throw TemplateError("unterminated '{' at offset " + std::to_string(i));
      std::string_view name = text.substr(i + 1, close - i - 1);
      if (!is_ident(name)) throw TemplateError("bad slot name '" + std::string(name) + "'");
      on_hole(std::string(name));
      i = close + 1;
      continue;
    }
    std::size_t next = text.find_first_of("{}", i);
    if (next == std::string_view::npos) next = text.size();
    on_text(text.substr(i, next - i));
    i = next;
  }
}

}  // namespace

std::vector<std::string> template_holes(std::string_view text) {
  std::vector<std::string> out;
  scan(text, [](std::string_view) {}, [&](std::string name) { out.push_back(std::move(name)); });
  return out;
}

FilledText fill_template(std::string_view text, const std::map<std::string, std::string>& slots) {
  FilledText out;
  scan(
      text, [&](std::string_view lit) { out.text += lit; },
      [&](const std::string& name) {
        auto it = slots.find(name);
        if (it == slots.end()) throw TemplateError("no value for slot '" + name + "'");
        std::size_t begin = out.text.size();
        out.text += it->second;
        out.slot_spans.emplace_back(begin, out.text.size());
      });
  return out;
}

void validate(const TaskTemplate& t) {
  auto fail = [&](const std::string& msg) { throw TemplateError("template '" + t.task_id + "': " + msg); };
  if (t.task_id.empty() || t.task_id == "OOD") fail("task_id must be nonempty and not 'OOD'");
  if (t.query_variants.empty()) fail("needs at least one query variant");
  auto check_holes = [&](const std::string& text, const char* where) {
    std::vector<std::string> holes;
    try {
      holes = template_holes(text);
    } catch (const TemplateError& e) {
      fail(std::string(where) + ": " + e.what());
    }
    for (const auto& h : holes)
      if (!t.slot_domains.count(h)) fail(std::string(where) + " uses slot '" + h + "' with no domain");
    return std::set<std::string>(holes.begin(), holes.end());
  };
  auto snippet_slots = check_holes(t.gold_snippet, "gold_snippet");
  for (const auto& v : t.query_variants) {
    if (check_holes(v, "query variant") != snippet_slots) {
      fail("query variant '" + v + "' must use the same slots as the gold snippet");
    }
  }
  for (const auto& [slot, values] : t.slot_domains) {
    if (!snippet_slots.count(slot)) fail("slot '" + slot + "' is never used");
    std::regex re;
    try {
      re = std::regex(t.pattern_for(slot));
    } catch (const std::regex_error&) {
      fail("slot '" + slot + "' has an invalid pattern");
    }
    for (const auto& v : values) {
      if (!std::regex_match(v, re)) fail("value '" + v + "' of slot '" + slot + "' does not match its pattern");
    }
  }
  for (const auto& [slot, pattern] : t.slot_patterns)
    if (!t.slot_domains.count(slot)) fail("pattern for unknown slot '" + slot + "'");
}

TaskTemplate template_from_json(const nlohmann::json& j) {
  TaskTemplate t;
  try {
    t.task_id = j.at("task_id").get<std::string>();
    t.category = parse_category(j.at("category").get<std::string>());
    t.query_variants = j.at("query_variants").get<std::vector<std::string>>();
    t.gold_snippet = j.at("gold_snippet").get<std::string>();
    t.slot_domains = j.value("slot_domains", std::map<std::string, std::vector<std::string>>{});
    t.slot_patterns = j.value("slot_patterns", std::map<std::string, std::string>{});
    t.in_domain = j.value("in_domain", true);
  } catch (const nlohmann::json::exception& e) {
    throw TemplateError(std::string("malformed template: ") + e.what());
  }
  if (!t.in_domain) throw TemplateError("template '" + t.task_id + "': in_domain must be true");
  validate(t);
  return t;
}

nlohmann::json to_json(const TaskTemplate& t) {
  return {{"task_id", t.task_id},
          {"category", to_string(t.category)},
          {"query_variants", t.query_variants},
          {"gold_snippet", t.gold_snippet},
          {"slot_domains", t.slot_domains},
          {"slot_patterns", t.slot_patterns},
          {"in_domain", t.in_domain}};
}

std::vector<TaskTemplate> load_templates(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) throw TemplateError("not a directory: " + dir.string());
  std::vector<std::filesystem::path> files;
  for (const auto& e : std::filesystem::directory_iterator(dir))
    if (e.path().extension() == ".json") files.push_back(e.path());
  std::sort(files.begin(), files.end());

  std::vector<TaskTemplate> out;
  std::set<std::string> ids;
  for (const auto& f : files) {
    std::ifstream in(f);
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
      throw TemplateError(f.filename().string() + ": " + e.what());
    }
    TaskTemplate t = template_from_json(j);
    if (!ids.insert(t.task_id).second) throw TemplateError("duplicate task_id '" + t.task_id + "'");
    out.push_back(std::move(t));
  }
  if (out.empty()) throw TemplateError("no templates in " + dir.string());
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.task_id < b.task_id; });
  return out;
}

}  // namespace fulfil::taskgen
