#include <filesystem>

#include <gtest/gtest.h>

#include "fulfil/core/instance_io.hpp"
#include "fulfil/opt/model.hpp"
#include "fulfil/opt/plan_store.hpp"
#include "support/optimizer_oracle.hpp"

using namespace fulfil;
using core::Constraint;
using core::ConstraintKind;
using core::Enforce;
using core::Fixed;
using opt::Model;
using opt::Scope;

namespace {

std::shared_ptr<const core::Instance> single_demand_instance() {
  core::Instance inst;
  inst.name = "single";
  inst.horizon = {6, core::Date(2024, 1, 1)};
  inst.now = inst.horizon.week0_start;
  inst.cost = {Fixed::from_int(10), Fixed::from_int(10)};
  inst.demands = {{"D", 5, 3, "A"}};
  inst.suppliers = {{"s1", "R", "A"}};
  for (int w = 0; w < 6; ++w) inst.inventory.push_back({"s1", w, 10, inst.horizon.week_start(w)});
  inst.methods = {{"ground", 2, Fixed::from_int(1), Fixed::from_int(2)}};
  return std::make_shared<const core::Instance>(std::move(inst));
}

std::shared_ptr<const core::Instance> two_supplier_instance() {
  core::Instance inst = *single_demand_instance();
  inst.suppliers.push_back({"s2", "R2", "B"});
  for (int w = 0; w < 6; ++w) inst.inventory.push_back({"s2", w, 10, inst.horizon.week_start(w)});
  return std::make_shared<const core::Instance>(std::move(inst));
}

Constraint prohibit_supplier(std::string id) {
  return {ConstraintKind::SupplyPairing, "*", std::move(id), core::AnyWeek{}, "", Enforce::Prohibit};
}

void expect_plan_invariants(const core::Instance& inst, const opt::SolveOutcome& out) {
  ASSERT_TRUE(out.feasible);
  const auto& plan = *out.assignment;
  ASSERT_EQ(plan.lines.size(), inst.demands.size());
  Fixed sum;
  std::map<std::pair<std::string, int>, std::int64_t> used;
  for (std::size_t i = 0; i < plan.lines.size(); ++i) {
    const auto& line = plan.lines[i];
    EXPECT_EQ(line.demand_id, inst.demands[i].id);
    const auto* m = inst.find_method(line.method);
    ASSERT_NE(m, nullptr);
    EXPECT_EQ(line.dock_week - line.ship_week, m->lead_time_weeks);
    EXPECT_GE(line.ship_week, 0);
    EXPECT_LT(line.ship_week, inst.horizon.num_weeks);
    EXPECT_EQ(line.line_cost, core::line_cost(inst.demands[i], *inst.find_supplier(line.supplier_id), *m,
                                              line.ship_week, inst.cost));
    sum += line.line_cost;
    used[{line.supplier_id, line.ship_week}] += inst.demands[i].racks;
  }
  EXPECT_EQ(sum, plan.total_cost);
  EXPECT_EQ(plan.total_cost, *out.objective);
  for (const auto& [key, racks] : used) {
    std::int64_t cap = 0;
    for (const auto& r : inst.inventory)
      if (r.supplier_id == key.first && r.week == key.second) cap += r.quantity;
    EXPECT_LE(racks, cap);
  }
}

}  // namespace

TEST(Optimize, SingleDemandOnTime) {
  Model model(single_demand_instance());
  const auto& out = model.optimize();
  ASSERT_TRUE(out.feasible);
  EXPECT_EQ(*out.objective, Fixed::from_int(5));
  EXPECT_EQ(out.assignment->lines.at(0).ship_week, 1);
  EXPECT_EQ(out.assignment->lines.at(0).dock_week, 3);
  expect_plan_invariants(model.instance(), out);
}

TEST(Optimize, ProhibitingOnlySupplierIsInfeasible) {
  Model model(single_demand_instance());
  model.add_constraint(prohibit_supplier("s1"), Scope::Scenario);
  const auto& out = model.optimize();
  EXPECT_FALSE(out.feasible);
  EXPECT_FALSE(out.objective);
  EXPECT_FALSE(out.assignment);
}

TEST(Optimize, ExactMatchDockDateForcesWeek) {
  Model model(single_demand_instance());
  model.add_constraint({ConstraintKind::DockDate, "D", "*", core::Week{5}, "", Enforce::ExactMatch},
                       Scope::Scenario);
  const auto& out = model.optimize();
  ASSERT_TRUE(out.feasible);
  EXPECT_EQ(out.assignment->lines[0].dock_week, 5);
  EXPECT_EQ(*out.objective, Fixed::from_int(5 + 5 * 10 * 2));
}

TEST(Optimize, ExactMatchShippingMethod) {
  auto base = *single_demand_instance();
  base.methods.push_back({"priority", 1, Fixed::from_int(3), Fixed::from_int(1)});
  Model model(std::make_shared<const core::Instance>(base));
  EXPECT_EQ(model.optimize().assignment->lines[0].method, "ground");
  model.add_constraint({ConstraintKind::ShippingMethod, "D", "*", core::AnyWeek{}, "priority",
                        Enforce::ExactMatch},
                       Scope::Scenario);
  const auto& out = model.optimize();
  ASSERT_TRUE(out.feasible);
  EXPECT_EQ(out.assignment->lines[0].method, "priority");
  EXPECT_EQ(out.assignment->lines[0].ship_week, 2);
  EXPECT_EQ(*out.objective, Fixed::from_int(15));
}

TEST(Optimize, CapacityIsRespected) {
  core::Instance inst = *single_demand_instance();
  inst.demands.push_back({"E", 6, 3, "A"});
  Model model(std::make_shared<const core::Instance>(inst));
  const auto& out = model.optimize();
  expect_plan_invariants(model.instance(), out);
  // Both want ship week 1, but 5 + 6 > 10.
  EXPECT_NE(out.assignment->lines[0].ship_week, out.assignment->lines[1].ship_week);
}

TEST(Optimize, TieBreakIsLexicographic) {
  core::Instance inst = *single_demand_instance();
  inst.suppliers.insert(inst.suppliers.begin(), {"s0", "R", "A"});
  for (int w = 0; w < 6; ++w) inst.inventory.push_back({"s0", w, 10, inst.horizon.week_start(w)});
  Model model(std::make_shared<const core::Instance>(inst));
  EXPECT_EQ(model.optimize().assignment->lines[0].supplier_id, "s0");
}

TEST(Optimize, RejectsInvalidInstance) {
  core::Instance inst = *single_demand_instance();
  inst.demands[0].racks = 0;
  EXPECT_THROW(Model(std::make_shared<const core::Instance>(inst)), opt::ValidationError);
}

TEST(Optimize, MatchesExhaustiveEnumeration) {
  std::mt19937_64 rng(20240601);
  int feasible = 0;
  for (int trial = 0; trial < 60; ++trial) {
    auto inst = oracle::random_instance(rng);
    auto cs = oracle::random_constraints(rng, inst, 2);
    auto expected = oracle::brute_force_optimum(inst, cs);
    auto got = opt::solve(inst, cs);
    ASSERT_EQ(got.feasible, expected.feasible) << "trial " << trial;
    if (!expected.feasible) continue;
    ++feasible;
    EXPECT_EQ(*got.objective, expected.objective) << "trial " << trial;
    EXPECT_EQ(got.assignment->lines, expected.lines) << "trial " << trial;
    expect_plan_invariants(inst, got);
  }
  EXPECT_GT(feasible, 10);
}

TEST(Optimize, Deterministic) {
  auto inst = core::load_instance(std::filesystem::path(FULFIL_SOURCE_DIR) / "data" / "fixture");
  auto a = opt::solve(inst, {});
  auto b = opt::solve(inst, {});
  EXPECT_EQ(a, b);
  expect_plan_invariants(inst, a);
}

TEST(AddConstraint, GrowsChosenList) {
  Model model(single_demand_instance());
  model.add_constraint({ConstraintKind::DockDate, "D", "*", core::Week{3}, "", Enforce::ExactMatch},
                       Scope::Baseline);
  EXPECT_EQ(model.baseline_constraints().size(), 1u);
  EXPECT_TRUE(model.scenario_constraints().empty());
  model.add_constraint(prohibit_supplier("s1"), Scope::Scenario);
  EXPECT_EQ(model.scenario_constraints().size(), 1u);
  EXPECT_FALSE(model.last_outcome());  // no solve triggered
  model.reset();
  EXPECT_TRUE(model.scenario_constraints().empty());
  EXPECT_EQ(model.baseline_constraints().size(), 1u);
}

TEST(AddConstraint, RejectsUnknownReferences) {
  Model model(single_demand_instance());
  EXPECT_THROW(model.add_constraint(prohibit_supplier("nope"), Scope::Scenario), opt::ConstraintError);
  EXPECT_THROW(model.add_constraint({ConstraintKind::DockDate, "X", "*", core::AnyWeek{}, "",
                                     Enforce::Prohibit},
                                    Scope::Scenario),
               opt::ConstraintError);
  EXPECT_THROW(model.add_constraint({ConstraintKind::ShippingMethod, "D", "*", core::AnyWeek{}, "air",
                                     Enforce::Prohibit},
                                    Scope::Scenario),
               opt::ConstraintError);
}

TEST(Reset, RestoresBaselineObjective) {
  Model model(two_supplier_instance());
  Fixed base = *model.optimize().objective;
  model.add_constraint(prohibit_supplier("s1"), Scope::Scenario);
  EXPECT_GT(*model.optimize().objective, base);
  model.reset();
  model.reset();
  EXPECT_EQ(*model.optimize().objective, base);
  Model fresh(two_supplier_instance());
  fresh.reset();
  EXPECT_EQ(fresh, Model(fresh));
}

TEST(UpdatePlan, VersionsIncrease) {
  Model model(single_demand_instance());
  opt::PlanStore store;
  const auto& p1 = opt::update_plan(store, model.optimize());
  EXPECT_EQ(p1.version, 1);
  const auto& p2 = opt::update_plan(store, model.optimize());
  EXPECT_EQ(p2.version, 2);
  EXPECT_EQ(store.history().size(), 2u);

  model.add_constraint(prohibit_supplier("s1"), Scope::Scenario);
  EXPECT_THROW(opt::update_plan(store, model.optimize()), opt::CommitError);
  EXPECT_EQ(store.version(), 2);
}

TEST(WhatIf, EmptyScenarioHasZeroDelta) {
  Model model(two_supplier_instance());
  model.optimize();
  auto r = opt::what_if(model, {});
  ASSERT_TRUE(r.feasible);
  EXPECT_EQ(*r.delta_vs_baseline, Fixed{});
}

TEST(WhatIf, ProhibitCheapestSupplierMatchesOracleGap) {
  auto inst = two_supplier_instance();
  Model model(inst);
  model.optimize();
  Model before = model;
  std::vector<Constraint> cs = {prohibit_supplier("s1")};
  auto r = opt::what_if(model, cs);
  auto base = oracle::brute_force_optimum(*inst, {});
  auto scen = oracle::brute_force_optimum(*inst, cs);
  ASSERT_TRUE(r.feasible);
  EXPECT_EQ(*r.delta_vs_baseline, scen.objective - base.objective);
  EXPECT_EQ(*r.delta_vs_baseline, Fixed::from_int(5));  // cross-geo doubles 5 racks x 1.0
  EXPECT_EQ(model, before);
}

TEST(WhatIf, OnlySupplierProhibitedIsInfeasible) {
  Model model(single_demand_instance());
  model.optimize();
  Model before = model;
  std::vector<Constraint> cs = {prohibit_supplier("s1")};
  auto r = opt::what_if(model, cs);
  EXPECT_FALSE(r.feasible);
  EXPECT_FALSE(r.delta_vs_baseline);
  EXPECT_EQ(model, before);
}

TEST(WhatIf, RequiresSolvedBaseline) {
  Model model(single_demand_instance());
  EXPECT_THROW(opt::what_if(model, {}), opt::ModelError);
}

TEST(PlanJson, ExportShape) {
  Model model(single_demand_instance());
  opt::PlanStore store;
  auto j = opt::to_json(opt::update_plan(store, model.optimize()));
  EXPECT_EQ(j["version"], 1);
  EXPECT_DOUBLE_EQ(j["total_cost"].get<double>(), 5.0);
  ASSERT_EQ(j["lines"].size(), 1u);
  EXPECT_EQ(j["lines"][0]["supplier_id"], "s1");
}
