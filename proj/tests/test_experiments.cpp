/*
 * This file is part of ccwsim
 *
 * Copyright 2026 ccwsim contributors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include <catch2/catch_amalgamated.hpp>

#include "ccw/experiments.hpp"

using namespace ccw;

namespace {

Table2Row synthetic_row(std::string scenario, double limited, double all,
                        double start1, double feasible) {
    Table2Row row;
    row.scenario = std::move(scenario);
    row.limited_ccw = limited;
    row.all_initiator_ccw = all;
    row.iv_start0 = 0.0;
    row.iv_start1 = start1;
    row.iv_feasible = feasible;
    row.iv_impossible = all;
    return row;
}

const Table2Row& row_for(const std::vector<Table2Row>& rows,
                         const std::string& scenario) {
    for (const auto& row : rows) {
        if (row.scenario == scenario) return row;
    }
    FAIL("no row for scenario " << scenario);
    return rows.front();
}

} // namespace

TEST_CASE("mc_tolerance is four standard errors at worst-case variance") {
    CHECK(mc_tolerance(200000, 5) == Catch::Approx(0.002).margin(1e-12));
    CHECK(mc_tolerance(100000, 1) == Catch::Approx(0.006324555).margin(1e-8));
    // Only the total draw count matters.
    CHECK(mc_tolerance(50000, 2) == mc_tolerance(100000, 1));
    CHECK(mc_tolerance(5000000, 10) == Catch::Approx(0.0002828427).margin(1e-9));
}

TEST_CASE("run_table2 produces one row per catalog scenario in order") {
    const auto rows = run_table2(TreatmentModel::defaults(), 2000, 1, 5);
    REQUIRE(rows.size() == 6);
    CHECK(rows[0].scenario == "base");
    CHECK(rows[1].scenario == "A");
    CHECK(rows[2].scenario == "B");
    CHECK(rows[3].scenario == "C");
    CHECK(rows[4].scenario == "D");
    CHECK(rows[5].scenario == "E");
    for (const auto& row : rows) {
        for (double v : {row.limited_ccw, row.all_initiator_ccw, row.iv_start0,
                         row.iv_start1, row.iv_feasible, row.iv_impossible}) {
            CHECK(v >= 0.0);
            CHECK(v <= 1.0);
        }
    }
    CHECK_THROWS_AS(run_table2(TreatmentModel::defaults(), 2000, 0, 5), ConfigError);
}

TEST_CASE("run_table2 intervention columns equal mc_risk outputs") {
    const TreatmentModel tm = TreatmentModel::defaults();
    const std::int64_t n = 3000;
    const int reps = 2;
    const std::uint64_t seed = 99;
    const auto rows = run_table2(tm, n, reps, seed);
    for (const auto& spec : scenario_catalog()) {
        const auto& row = row_for(rows, spec.name);
        CHECK(row.iv_start0 ==
              mc_risk(spec, tm, Intervention::start_at_0(), n, reps, seed).risk);
        CHECK(row.iv_start1 ==
              mc_risk(spec, tm, Intervention::start_at_1(), n, reps, seed).risk);
        CHECK(row.iv_feasible ==
              mc_risk(spec, tm, Intervention::feasible(), n, reps, seed).risk);
        CHECK(row.iv_impossible ==
              mc_risk(spec, tm, Intervention::impossible(), n, reps, seed).risk);
    }
}

TEST_CASE("run_table2 is deterministic and thread-count invariant") {
    const TreatmentModel tm = TreatmentModel::defaults();
    const auto a = run_table2(tm, 2000, 2, 77, 1);
    const auto b = run_table2(tm, 2000, 2, 77, 1);
    const auto c = run_table2(tm, 2000, 2, 77, 3);
    REQUIRE(a.size() == b.size());
    REQUIRE(a.size() == c.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].limited_ccw == b[i].limited_ccw);
        CHECK(a[i].limited_ccw == c[i].limited_ccw);
        CHECK(a[i].all_initiator_ccw == c[i].all_initiator_ccw);
        CHECK(a[i].iv_start0 == c[i].iv_start0);
        CHECK(a[i].iv_start1 == c[i].iv_start1);
        CHECK(a[i].iv_feasible == c[i].iv_feasible);
        CHECK(a[i].iv_impossible == c[i].iv_impossible);
    }
}

TEST_CASE("coupled arms coincide exactly where the model removes the difference") {
    const auto rows = run_table2(TreatmentModel::defaults(), 20000, 1, 11);
    // Exposure has no effect in scenario A: every intervention arm sees the
    // identical event draws.
    const auto& a = row_for(rows, "A");
    CHECK(a.iv_start0 == a.iv_start1);
    CHECK(a.iv_start0 == a.iv_feasible);
    CHECK(a.iv_start0 == a.iv_impossible);
    // Scenario B has an instantaneous effect only, so once everyone is
    // exposed by period 1 the feasible and forced arms are identical.
    const auto& b = row_for(rows, "B");
    CHECK(b.iv_feasible == b.iv_impossible);
}

TEST_CASE("check_table3 classifies the expected agreement pattern") {
    std::vector<Table2Row> rows;
    rows.push_back(synthetic_row("base", 0.575, 0.595, 0.536, 0.575));
    rows.push_back(synthetic_row("A", 0.264, 0.2645, 0.2641, 0.2643));
    rows.push_back(synthetic_row("B", 0.436, 0.4365, 0.418, 0.436));
    rows.push_back(synthetic_row("C", 0.418, 0.4175, 0.4182, 0.4179));
    rows.push_back(synthetic_row("D", 0.366, 0.386, 0.346, 0.366));
    rows.push_back(synthetic_row("E", 0.411, 0.430, 0.382, 0.411));
    const auto report = check_table3(rows, 0.004);
    CHECK(report.all_pass);
    REQUIRE(report.entries.size() == 6);
    for (const auto& entry : report.entries) {
        CAPTURE(entry.scenario);
        CHECK(entry.pass());
    }
    CHECK_FALSE(report.entries[0].schemes_agree_observed);
    CHECK(report.entries[1].schemes_agree_observed);
    CHECK(report.entries[1].timing_ignorable_observed);
    CHECK(report.entries[2].schemes_agree_observed);
    CHECK_FALSE(report.entries[2].timing_ignorable_observed);

    SECTION("a scenario off its expected pattern fails") {
        rows[1] = synthetic_row("A", 0.264, 0.320, 0.264, 0.264);
        const auto bad = check_table3(rows, 0.004);
        CHECK_FALSE(bad.all_pass);
        CHECK_FALSE(bad.entries[1].pass());
        CHECK(bad.entries[0].pass());
    }
    SECTION("tolerance must be positive") {
        CHECK_THROWS_AS(check_table3(rows, 0.0), ConfigError);
        CHECK_THROWS_AS(check_table3(rows, -0.01), ConfigError);
    }
    SECTION("unknown scenarios have no expected pattern") {
        rows.push_back(synthetic_row("F", 0.1, 0.1, 0.1, 0.1));
        CHECK_THROWS_AS(check_table3(rows, 0.004), ConfigError);
    }
}

TEST_CASE("table CSV formatting is fixed-width and stable") {
    std::vector<Table2Row> rows;
    Table2Row row;
    row.scenario = "base";
    row.limited_ccw = 0.5;
    row.all_initiator_ccw = 0.25;
    row.iv_start0 = 0.1;
    row.iv_start1 = 0.2;
    row.iv_feasible = 0.3;
    row.iv_impossible = 0.4;
    rows.push_back(row);
    std::ostringstream out;
    write_table2_csv(rows, out);
    CHECK(out.str() ==
          "scenario,limited_ccw,all_initiator_ccw,iv_start0,iv_start1,"
          "iv_feasible,iv_impossible\n"
          "base,0.500000,0.250000,0.100000,0.200000,0.300000,0.400000\n");
}

TEST_CASE("the report text names each verdict") {
    std::vector<Table2Row> rows;
    rows.push_back(synthetic_row("A", 0.264, 0.264, 0.264, 0.264));
    rows.push_back(synthetic_row("base", 0.575, 0.595, 0.536, 0.575));
    const auto report = check_table3(rows, 0.004);
    const std::string text = format_table3_report(report);
    CHECK(text.find("PASS") != std::string::npos);
    CHECK(text.find("ALL PASS") != std::string::npos);
    CHECK(text.find("tolerance 0.004000") != std::string::npos);
    CHECK(text.find("A") != std::string::npos);

    rows[0] = synthetic_row("A", 0.264, 0.320, 0.264, 0.264);
    const std::string bad = format_table3_report(check_table3(rows, 0.004));
    CHECK(bad.find("FAIL") != std::string::npos);
    CHECK(bad.find("FAILURES PRESENT") != std::string::npos);
    CHECK(bad.find("ALL PASS") == std::string::npos);
}

TEST_CASE("a moderate-size run reproduces the decision matrix") {
    const std::int64_t n = 50000;
    const int reps = 2;
    const auto rows = run_table2(TreatmentModel::defaults(), n, reps, 2026);
    const auto report = check_table3(rows, mc_tolerance(n, reps));
    for (const auto& entry : report.entries) {
        CAPTURE(entry.scenario, entry.scheme_gap, entry.timing_gap);
        CHECK(entry.pass());
    }
    CHECK(report.all_pass);
}
