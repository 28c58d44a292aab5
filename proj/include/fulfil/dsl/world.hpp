#pragma once

#include <filesystem>
#include <memory>
#include <optional>

#include "fulfil/dsl/dsl.hpp"

namespace fulfil::dsl {

/// Everything a snippet can touch. Copies share the immutable instance and
/// tables and get their own model and plan state.
struct World {
  std::shared_ptr<const query::TableStore> store;
  opt::Model model;
  opt::PlanStore plan;

  explicit World(std::shared_ptr<const core::Instance> instance);

  Hosts hosts() { return {store.get(), &model, &plan}; }
  ExecEnv env(long step_budget = 10000) { return ExecEnv{{}, hosts(), step_budget, {}}; }
};

World load_world(const std::filesystem::path& dir, std::optional<core::Date> now_override = std::nullopt);

}  // namespace fulfil::dsl
