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
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <catch2/catch_amalgamated.hpp>

#include "ccw/person_period.hpp"
#include "ccw/simulate.hpp"

using namespace ccw;

namespace {

Cohort parse_text(const std::string& text) {
    std::istringstream in(text);
    return parse_cohort_csv(in);
}

void check_error(const std::string& text, const std::string& needle) {
    CHECK_THROWS_WITH(parse_text(text), Catch::Matchers::ContainsSubstring(needle));
}

} // namespace

TEST_CASE("export then parse is the identity on simulated cohorts") {
    const auto paths =
        simulate_natural(find_scenario("base"), TreatmentModel::defaults(), 500, 3);
    const Cohort cohort{{"c"}, paths};
    std::ostringstream out;
    export_cohort_csv(cohort, out);
    const Cohort back = parse_text(out.str());
    CHECK(back.covariate_names == cohort.covariate_names);
    CHECK(back.paths == cohort.paths);
}

TEST_CASE("export writes one row per observed period") {
    Cohort cohort;
    cohort.covariate_names = {"c"};
    PersonPath a;
    a.id = 0;
    a.covariates = {1};
    a.start_time = 1;
    PersonPath b;
    b.id = 1;
    b.covariates = {0};
    b.event_period = 1;
    cohort.paths = {a, b};
    std::ostringstream out;
    export_cohort_csv(cohort, out);
    CHECK(out.str() ==
          "person_id,period,c,exposed,event\n"
          "0,0,1,0,0\n"
          "0,1,1,1,0\n"
          "0,2,1,1,0\n"
          "1,0,0,0,0\n"
          "1,1,0,0,1\n");
}

TEST_CASE("parser accepts a covariate-free cohort") {
    const Cohort cohort = parse_text(
        "person_id,period,exposed,event\n"
        "0,0,0,0\n"
        "0,1,0,0\n"
        "0,2,0,0\n"
        "1,0,0,0\n"
        "1,1,1,0\n"
        "1,2,1,0\n"
        "2,0,1,0\n"
        "2,1,1,1\n");
    CHECK(cohort.covariate_names.empty());
    REQUIRE(cohort.paths.size() == 3);
    CHECK_FALSE(cohort.paths[0].start_time.has_value());
    CHECK_FALSE(cohort.paths[0].event_period.has_value());
    CHECK(cohort.paths[1].start_time == 1);
    CHECK(cohort.paths[2].start_time == 0);
    CHECK(cohort.paths[2].event_period == 1);
}

TEST_CASE("parser tolerates blank lines and surrounding spaces") {
    const Cohort cohort = parse_text(
        "person_id, period, c, exposed, event\n"
        "\n"
        "7, 0, 1, 0, 0\n"
        "7, 1, 1, 0, 0\n"
        "\n"
        "7, 2, 1, 1, 0\n");
    CHECK(cohort.covariate_names == std::vector<std::string>{"c"});
    REQUIRE(cohort.paths.size() == 1);
    CHECK(cohort.paths[0].id == 7);
    CHECK(cohort.paths[0].start_time == 2);
}

TEST_CASE("parser rejects malformed input with line numbers") {
    SECTION("empty input") {
        check_error("", "missing header");
    }
    SECTION("wrong header") {
        check_error("id,period,exposed,event\n", "line 1: header");
    }
    SECTION("wrong field count") {
        check_error(
            "person_id,period,c,exposed,event\n"
            "0,0,0,0\n",
            "line 2: expected 5 fields, got 4");
    }
    SECTION("non-integer field") {
        check_error(
            "person_id,period,c,exposed,event\n"
            "0,zero,1,0,0\n",
            "line 2: period is not an integer: 'zero'");
    }
    SECTION("non-binary exposure") {
        check_error(
            "person_id,period,c,exposed,event\n"
            "0,0,1,2,0\n",
            "line 2: exposed must be 0 or 1, got 2");
    }
    SECTION("period out of range") {
        check_error(
            "person_id,period,c,exposed,event\n"
            "0,3,1,0,0\n",
            "line 2: period 3 outside [0,2]");
    }
    SECTION("period gap") {
        check_error(
            "person_id,period,c,exposed,event\n"
            "0,0,1,0,0\n"
            "0,2,1,0,0\n",
            "line 3: person 0 has period 2 where 1 was expected");
    }
    SECTION("duplicate period") {
        check_error(
            "person_id,period,c,exposed,event\n"
            "0,0,1,0,0\n"
            "0,0,1,0,0\n",
            "line 3: person 0 has period 0 where 1 was expected");
    }
    SECTION("covariates change within a person") {
        check_error(
            "person_id,period,c,exposed,event\n"
            "0,0,0,0,0\n"
            "0,1,1,0,0\n",
            "covariates change within person 0");
    }
    SECTION("exposure switches off") {
        check_error(
            "person_id,period,c,exposed,event\n"
            "0,0,1,1,0\n"
            "0,1,1,0,0\n",
            "exposure switches 1 -> 0 for person 0");
    }
    SECTION("records after the event") {
        check_error(
            "person_id,period,c,exposed,event\n"
            "0,0,1,0,1\n"
            "0,1,1,0,0\n"
            "0,2,1,0,0\n",
            "person 0 has records after the event period");
    }
    SECTION("two events") {
        check_error(
            "person_id,period,c,exposed,event\n"
            "0,0,1,0,1\n"
            "0,1,1,0,1\n",
            "person 0 has more than one event record");
    }
    SECTION("event-free person stops early") {
        check_error(
            "person_id,period,c,exposed,event\n"
            "0,0,1,0,0\n"
            "0,1,1,0,0\n",
            "person 0 is event-free but stops at period 1 (expected 2)");
    }
    SECTION("missing file names the path") {
        CHECK_THROWS_WITH(
            parse_cohort_csv(std::string("does_not_exist_io_test.csv")),
            Catch::Matchers::ContainsSubstring("does_not_exist_io_test.csv"));
    }
}

TEST_CASE("file errors carry the file name as context") {
    namespace fs = std::filesystem;
    const fs::path dir = fs::temp_directory_path() / "ccw_io_test";
    fs::create_directories(dir);
    const fs::path bad = dir / "bad.csv";
    {
        std::ofstream out(bad);
        out << "person_id,period,exposed,event\n0,1,0,0\n";
    }
    CHECK_THROWS_WITH(parse_cohort_csv(bad.string()),
                      Catch::Matchers::ContainsSubstring("bad.csv") &&
                          Catch::Matchers::ContainsSubstring("line 2"));
    fs::remove_all(dir);
}

TEST_CASE("weight audit lists every clone-period with its weight") {
    const Cohort cohort = parse_text(
        "person_id,period,exposed,event\n"
        "0,0,0,0\n"
        "0,1,0,0\n"
        "0,2,0,0\n"
        "1,0,0,0\n"
        "1,1,1,0\n"
        "1,2,1,0\n"
        "2,0,1,0\n"
        "2,1,1,0\n"
        "2,2,1,0\n");
    const auto clones = estimate_weights(clone_and_censor(cohort.paths, 1),
                                         WeightScheme::limited, 1);
    std::ostringstream out;
    write_weight_audit(clones, out);
    CHECK(out.str() ==
          "person_id,period,at_risk,event,censored,weight\n"
          "0,0,1,0,0,1\n"
          "0,1,0,0,1,0\n"
          "0,2,0,0,0,0\n"
          "1,0,1,0,0,1\n"
          "1,1,1,0,0,2\n"
          "1,2,1,0,0,2\n"
          "2,0,1,0,0,1\n"
          "2,1,1,0,0,1\n"
          "2,2,1,0,0,1\n");
}
