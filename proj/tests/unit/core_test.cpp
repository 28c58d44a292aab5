#include <filesystem>
#include <fstream>

#include <gtest/gtest.h>

#include "fulfil/core/instance_io.hpp"
#include "fulfil/core/model_ops.hpp"

using namespace fulfil::core;

namespace {

const std::filesystem::path kFixture = std::filesystem::path(FULFIL_SOURCE_DIR) / "data" / "fixture";

ShippingMethod method(std::string name, int lead, const char* cost, const char* mult = "1") {
  return ShippingMethod{std::move(name), lead, Fixed::parse(cost), Fixed::parse(mult)};
}

CostConfig penalty(int per_week) {
  return CostConfig{Fixed::from_int(per_week), Fixed::from_int(per_week)};
}

// Calendar oracle independent of <chrono>: walks days one at a time.
struct CivilDay {
  int y, m, d;
};

int days_in_month(int y, int m) {
  static const int table[] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
  bool leap = (y % 4 == 0 && y % 100 != 0) || y % 400 == 0;
  return m == 2 && leap ? 29 : table[m - 1];
}

CivilDay advance(CivilDay c, int n) {
  for (int i = 0; i < n; ++i) {
    if (++c.d > days_in_month(c.y, c.m)) {
      c.d = 1;
      if (++c.m > 12) {
        c.m = 1;
        ++c.y;
      }
    }
  }
  return c;
}

}  // namespace

TEST(Fixed, ParsesAndRendersMinimalDigits) {
  EXPECT_EQ(Fixed::parse("5").raw(), 50000);
  EXPECT_EQ(Fixed::parse("0.0002").raw(), 2);
  EXPECT_EQ(Fixed::parse("-1.5").to_string(), "-1.5");
  EXPECT_EQ(Fixed::from_int(5).to_string(), "5");
  EXPECT_EQ(Fixed::parse("2.2500").to_string(), "2.25");
  EXPECT_THROW(Fixed::parse("1.00001"), std::invalid_argument);
  EXPECT_THROW(Fixed::parse("abc"), std::invalid_argument);
  EXPECT_THROW(Fixed::parse(""), std::invalid_argument);
}

TEST(Fixed, MultiplyRoundsOnce) {
  EXPECT_EQ(multiply(Fixed::parse("1.5"), Fixed::parse("2")), Fixed::parse("3"));
  EXPECT_EQ(multiply(Fixed::parse("0.0001"), Fixed::parse("0.5")).raw(), 1);  // half away from zero
  EXPECT_EQ(multiply(Fixed::parse("-0.0001"), Fixed::parse("0.5")).raw(), -1);
}

TEST(DateTest, ParseAndFormat) {
  Date d = Date::parse("2024-02-29");
  EXPECT_EQ(d.to_string(), "2024-02-29");
  EXPECT_EQ(d.plus_days(1).to_string(), "2024-03-01");
  EXPECT_THROW(Date::parse("2023-02-29"), std::invalid_argument);
  EXPECT_THROW(Date::parse("2024-2-1"), std::invalid_argument);
}

TEST(DockWeek, AddsLeadTime) {
  EXPECT_EQ(dock_week(1, method("ground", 2, "1")), 3);
  EXPECT_EQ(dock_week(0, method("ground", 0, "1")), 0);
  EXPECT_EQ(dock_week(4, method("priority", 1, "4")), 5);
}

TEST(LineCost, ShippingAndDeviationTerms) {
  Supplier same{"s1", "R", "A"};
  Supplier cross{"s2", "R", "B"};
  Demand d{"D", 5, 3, "A"};
  auto m = method("ground", 2, "1.0", "2.0");

  EXPECT_EQ(line_cost(d, same, m, 1, penalty(0)), Fixed::from_int(5));
  EXPECT_EQ(line_cost(d, cross, m, 1, penalty(0)), Fixed::from_int(10));

  Demand two{"D2", 2, 3, "A"};
  EXPECT_EQ(line_cost(two, same, m, 2, penalty(10)), Fixed::from_int(22));
  // Earliness priced by its own rate.
  CostConfig asym{Fixed::from_int(10), Fixed::from_int(1)};
  EXPECT_EQ(line_cost(two, same, m, 0, asym), Fixed::from_int(2 + 2));
}

TEST(ConstraintMatches, WildcardsAndWeeks) {
  Horizon h{12, Date(2024, 1, 1)};
  PlanLine line{"D", "s1", "ground", 1, 3, Fixed{}};

  Constraint pairing{ConstraintKind::SupplyPairing, "*", "s1", AnyWeek{}, "", Enforce::Prohibit};
  EXPECT_TRUE(constraint_matches(pairing, line, h));
  pairing.supplier_id = "s2";
  EXPECT_FALSE(constraint_matches(pairing, line, h));

  Constraint dock{ConstraintKind::DockDate, "D", "*", Week{3}, "", Enforce::ExactMatch};
  EXPECT_TRUE(constraint_matches(dock, line, h));
  dock.week_or_pattern = Week{2};
  EXPECT_FALSE(constraint_matches(dock, line, h));

  Constraint ship{ConstraintKind::ShippingMethod, "D", "*", AnyWeek{}, "priority", Enforce::ExactMatch};
  EXPECT_FALSE(constraint_matches(ship, line, h));
  ship.method = "ground";
  EXPECT_TRUE(constraint_matches(ship, line, h));
}

TEST(ConstraintMatches, MonthPatternFebruary2024) {
  Horizon h{12, Date(2024, 1, 1)};
  Constraint c{ConstraintKind::SupplyPairing, "*", "*", parse_week_pattern("2024-02-*"), "",
               Enforce::Prohibit};
  std::vector<int> matched;
  for (int w = 0; w < 12; ++w) {
    if (constraint_matches(c, PlanLine{"D", "s", "m", w, w, Fixed{}}, h)) matched.push_back(w);
  }
  EXPECT_EQ(matched, (std::vector<int>{5, 6, 7, 8}));
}

TEST(ConstraintMatches, AllWildcardMatchesEveryLine) {
  Horizon h{20, Date(2024, 3, 4)};
  for (auto kind : {ConstraintKind::DockDate, ConstraintKind::SupplyPairing}) {
    Constraint c{kind, "*", "*", AnyWeek{}, "", Enforce::Prohibit};
    for (int w = 0; w < 20; ++w) {
      EXPECT_TRUE(constraint_matches(c, PlanLine{"X" + std::to_string(w), "any", "m", w, w + 1, Fixed{}}, h));
    }
  }
}

TEST(ConstraintMatches, MonthPatternAgreesWithCalendarWalkOver104Weeks) {
  for (Date start : {Date(2023, 12, 25), Date(2024, 1, 1), Date(2027, 2, 1)}) {
    Horizon h{104, start};
    CivilDay civil{start.year(), static_cast<int>(start.month()), static_cast<int>(start.day())};
    for (int w = 0; w < 104; ++w) {
      CivilDay week_start = advance(civil, 7 * w);
      for (int year = start.year(); year <= start.year() + 2; ++year) {
        for (unsigned month = 1; month <= 12; ++month) {
          bool expected = week_start.y == year && week_start.m == static_cast<int>(month);
          EXPECT_EQ(week_matches(MonthPattern{year, month}, w, h), expected)
              << "week " << w << " pattern " << year << "-" << month;
        }
      }
    }
  }
}

TEST(WeekPattern, ParsesGrammar) {
  EXPECT_TRUE(std::holds_alternative<AnyWeek>(parse_week_pattern("*")));
  EXPECT_EQ(std::get<Week>(parse_week_pattern("7")), 7);
  EXPECT_EQ(std::get<MonthPattern>(parse_week_pattern("2024-2-*")), (MonthPattern{2024, 2}));
  EXPECT_EQ(std::get<MonthPattern>(parse_week_pattern("2024-11-*")), (MonthPattern{2024, 11}));
  EXPECT_EQ(to_string(parse_week_pattern("2024-2-*")), "2024-02-*");
  for (const char* bad : {"", "2024-13-*", "2024-M-*", "-1", "2024-02", "abc", "2024-02-01"}) {
    EXPECT_THROW(parse_week_pattern(bad), PatternError) << bad;
  }
}

TEST(Enforce, OnlyTwoModes) {
  EXPECT_EQ(parse_enforce("Exact Match"), Enforce::ExactMatch);
  EXPECT_EQ(parse_enforce("Prohibit"), Enforce::Prohibit);
  EXPECT_THROW(parse_enforce("exact match"), std::invalid_argument);
}

TEST(ValidateInstance, FixtureIsClean) {
  Instance inst = load_instance(kFixture);
  EXPECT_TRUE(validate_instance(inst).empty());
  EXPECT_EQ(inst.demands.size(), 6u);
  EXPECT_EQ(inst.suppliers.size(), 4u);
  EXPECT_EQ(inst.now, Date(2024, 3, 25));
}

TEST(ValidateInstance, ReportsViolations) {
  Instance inst = load_instance(kFixture);
  inst.demands[0].racks = 0;
  auto v = validate_instance(inst);
  ASSERT_EQ(v.size(), 1u);
  EXPECT_EQ(v[0].message, "racks must be >= 1");

  inst = load_instance(kFixture);
  inst.suppliers.push_back(inst.suppliers[0]);
  v = validate_instance(inst);
  ASSERT_EQ(v.size(), 1u);
  EXPECT_EQ(v[0].message, "duplicate supplier id");

  inst = load_instance(kFixture);
  inst.methods[1].lead_time_weeks = 5;  // priority slower than ground
  v = validate_instance(inst);
  ASSERT_EQ(v.size(), 1u);
  EXPECT_EQ(v[0].where, "method priority");
}

class InstanceDir : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = std::filesystem::temp_directory_path() /
           ("fulfil_core_" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()) + "_" +
            ::testing::UnitTest::GetInstance()->current_test_info()->name());
    std::filesystem::remove_all(dir_);
    std::filesystem::copy(kFixture, dir_);
  }
  void TearDown() override { std::filesystem::remove_all(dir_); }

  std::filesystem::path dir_;
};

TEST_F(InstanceDir, MissingFileNamesTheFile) {
  std::filesystem::remove(dir_ / "shipment.csv");
  try {
    load_instance(dir_);
    FAIL() << "expected LoadError";
  } catch (const LoadError& e) {
    EXPECT_EQ(e.file(), "shipment.csv");
  }
}

TEST_F(InstanceDir, BadDateReportsRow) {
  std::ofstream(dir_ / "shipment.csv") << "date,quantity,src_geo,dest_geo,method\n"
                                       << "2024-01-02,3,A,B,ground\n"
                                       << "2024-13-02,3,A,B,ground\n";
  try {
    load_instance(dir_);
    FAIL() << "expected LoadError";
  } catch (const LoadError& e) {
    EXPECT_EQ(e.file(), "shipment.csv");
    EXPECT_EQ(e.row(), 2);
  }
}

TEST_F(InstanceDir, AcceptsIddColumnAliasAndNowOverride) {
  std::ofstream(dir_ / "demand.csv") << "id,racks,idd,dest_geo\nD,1,2,A\n";
  Instance inst = load_instance(dir_, Date(2025, 1, 1));
  EXPECT_EQ(inst.demands.at(0).ideal_dock_week, 2);
  EXPECT_EQ(inst.now, Date(2025, 1, 1));
}

TEST(Csv, QuotedFields) {
  auto t = parse_csv("a,b\n\"x,1\",\"say \"\"hi\"\"\"\n", "t.csv");
  ASSERT_EQ(t.rows.size(), 1u);
  EXPECT_EQ(t.rows[0][0], "x,1");
  EXPECT_EQ(t.rows[0][1], "say \"hi\"");
  EXPECT_THROW(parse_csv("a,b\n1\n", "t.csv"), LoadError);
}
