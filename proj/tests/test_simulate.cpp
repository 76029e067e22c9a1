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
#include <cstdint>
#include <optional>
#include <vector>

#include <catch2/catch_amalgamated.hpp>

#include "ccw/simulate.hpp"

using namespace ccw;

namespace {

const TreatmentModel kDefaults = TreatmentModel::defaults();

struct FrozenPath {
    int c;
    std::optional<int> start;
    std::optional<int> event;
};

} // namespace

TEST_CASE("natural course reproduces an independently computed trace") {
    // Base scenario, default treatment model, cohort seed 7, five people;
    // expected values come from a from-scratch reimplementation of the
    // documented randomness scheme.
    const auto paths = simulate_natural(find_scenario("base"), kDefaults, 5, 7);
    const std::vector<FrozenPath> expected = {
        {1, std::nullopt, std::nullopt},
        {0, std::nullopt, std::nullopt},
        {1, 0, 1},
        {1, 0, 0},
        {1, 0, 2},
    };
    REQUIRE(paths.size() == expected.size());
    for (std::size_t i = 0; i < expected.size(); ++i) {
        CAPTURE(i);
        CHECK(paths[i].id == static_cast<std::int64_t>(i));
        CHECK(paths[i].covariates == std::vector<int>{expected[i].c});
        CHECK(paths[i].start_time == expected[i].start);
        CHECK(paths[i].event_period == expected[i].event);
    }
}

TEST_CASE("zero initiation probabilities mean nobody initiates") {
    TreatmentModel tm = kDefaults;
    tm.p_init = {{{0.0, 0.0}, {0.0, 0.0}, {0.0, 0.0}}};
    const auto paths = simulate_natural(find_scenario("A"), tm, 500, 11);
    for (const auto& path : paths) CHECK_FALSE(path.start_time.has_value());
}

TEST_CASE("closed-form risks match frozen independent values") {
    struct Row {
        const char* name;
        double start0, start1;
    };
    const Row rows[] = {
        {"base", 0.6740539999999999, 0.535895},
        {"A", 0.26425, 0.26425},
        {"B", 0.482, 0.41775},
        {"C", 0.41775, 0.41775},
        {"D", 0.41775, 0.3455},
        {"E", 0.484, 0.381625},
    };
    for (const auto& row : rows) {
        CAPTURE(row.name);
        const auto& spec = find_scenario(row.name);
        CHECK(closed_form_risk(spec, 0.5, 0) ==
              Catch::Approx(row.start0).margin(1e-12));
        CHECK(closed_form_risk(spec, 0.5, 1) ==
              Catch::Approx(row.start1).margin(1e-12));
        // Exposure terms all vanish on the never-exposed path, so every
        // catalog scenario shares the same never-exposed risk.
        CHECK(closed_form_risk(spec, 0.5, std::nullopt) ==
              Catch::Approx(0.26425).margin(1e-12));
    }
}

TEST_CASE("never-exposed risk decomposes over the confounder mixture") {
    const auto& a_spec = find_scenario("A");
    CHECK(closed_form_risk(a_spec, 0.0, std::nullopt) ==
          Catch::Approx(1.0 - 0.95 * 0.95 * 0.95).margin(1e-15));
    CHECK(closed_form_risk(a_spec, 1.0, std::nullopt) ==
          Catch::Approx(1.0 - 0.85 * 0.85 * 0.85).margin(1e-15));
    CHECK(closed_form_risk(a_spec, 0.5, std::nullopt) ==
          Catch::Approx(0.5 * (1.0 - 0.85 * 0.85 * 0.85) +
                        0.5 * (1.0 - 0.95 * 0.95 * 0.95))
              .margin(1e-15));
    // The mixture weight that makes the never-exposed risk hit 0.264 is
    // 0.499, which is why the confounder prevalence defaults to one half.
    const double lo = 1.0 - 0.95 * 0.95 * 0.95;
    const double hi = 1.0 - 0.85 * 0.85 * 0.85;
    const double q = (0.264 - lo) / (hi - lo);
    CHECK(q == Catch::Approx(0.499).margin(0.001));
    CHECK(std::abs(closed_form_risk(a_spec, 0.5, std::nullopt) - 0.264) < 0.0005);
}

TEST_CASE("closed_form_risk validates inputs") {
    const auto& base = find_scenario("base");
    CHECK_THROWS_AS(closed_form_risk(base, -0.1, 0), ConfigError);
    CHECK_THROWS_AS(closed_form_risk(base, 1.1, 0), ConfigError);
    CHECK_THROWS_AS(closed_form_risk(base, 0.5, 3), ConfigError);
    CHECK_THROWS_AS(closed_form_risk(base, 0.5, -1), ConfigError);
}

TEST_CASE("Monte Carlo agrees with closed form for deterministic starts") {
    const std::int64_t n = 20000;
    const double tol = 4.0 * std::sqrt(0.25 / static_cast<double>(n));
    for (const auto& spec : scenario_catalog()) {
        CAPTURE(spec.name);
        const double mc0 = mc_risk(spec, kDefaults, Intervention::start_at_0(), n, 1,
                                   2024)
                               .risk;
        const double mc1 = mc_risk(spec, kDefaults, Intervention::start_at_1(), n, 1,
                                   2024)
                               .risk;
        CHECK(std::abs(mc0 - closed_form_risk(spec, 0.5, 0)) < tol);
        CHECK(std::abs(mc1 - closed_form_risk(spec, 0.5, 1)) < tol);
    }
}

TEST_CASE("intervention arms are coupled through shared event draws") {
    const std::int64_t n = 2000;
    const std::uint64_t seed = 314;

    SECTION("scenario A: every arm produces identical event outcomes") {
        const auto& spec = find_scenario("A");
        const auto natural = simulate_natural(spec, kDefaults, n, seed);
        for (const Intervention& iv :
             {Intervention::start_at_0(), Intervention::start_at_1(),
              Intervention::feasible(), Intervention::impossible(),
              Intervention::delayed_window(0, 2)}) {
            CAPTURE(iv.label());
            const auto arm = simulate_intervention(spec, kDefaults, iv, n, seed);
            for (std::int64_t i = 0; i < n; ++i) {
                CHECK(arm[static_cast<std::size_t>(i)].event_period ==
                      natural[static_cast<std::size_t>(i)].event_period);
            }
        }
    }

    SECTION("scenario B: feasible and impossible events are identical pointwise") {
        // B's hazard reads only current exposure; both arms expose everyone
        // who is event-free from period 1 on, so shared event slots give
        // identical outcomes even though assigned histories differ.
        const auto& spec = find_scenario("B");
        const auto feas = simulate_intervention(spec, kDefaults,
                                                Intervention::feasible(), n, seed);
        const auto imp = simulate_intervention(spec, kDefaults,
                                               Intervention::impossible(), n, seed);
        for (std::int64_t i = 0; i < n; ++i) {
            CHECK(feas[static_cast<std::size_t>(i)].event_period ==
                  imp[static_cast<std::size_t>(i)].event_period);
        }
    }

    SECTION("base: impossible events dominate feasible events person by person") {
        // The pseudo-start can only move exposure earlier, and history
        // coefficients are nonnegative, so with shared draws an event under
        // feasible implies one at least as early under impossible.
        const auto& spec = find_scenario("base");
        const auto feas = simulate_intervention(spec, kDefaults,
                                                Intervention::feasible(), 20000, seed);
        const auto imp = simulate_intervention(spec, kDefaults,
                                               Intervention::impossible(), 20000, seed);
        for (std::size_t i = 0; i < feas.size(); ++i) {
            if (feas[i].event_period) {
                REQUIRE(imp[i].event_period.has_value());
                CHECK(*imp[i].event_period <= *feas[i].event_period);
            }
        }
        CHECK(empirical_risk(imp) > empirical_risk(feas));
    }
}

TEST_CASE("forced-start arms are delayed windows") {
    const auto& spec = find_scenario("base");
    const std::int64_t n = 5000;
    const std::uint64_t seed = 99;
    auto arm = [&](const Intervention& iv) {
        return simulate_intervention(spec, kDefaults, iv, n, seed);
    };
    CHECK(arm(Intervention::delayed_window(0, 0)) == arm(Intervention::start_at_0()));
    CHECK(arm(Intervention::delayed_window(1, 1)) == arm(Intervention::start_at_1()));
    CHECK(arm(Intervention::delayed_window(0, 1)) == arm(Intervention::feasible()));
    CHECK(arm(Intervention::delayed_window(0, kPeriods)) ==
          arm(Intervention::natural()));
}

TEST_CASE("worker count never changes simulated paths") {
    const auto& spec = find_scenario("base");
    const std::int64_t n = 5000;
    for (const Intervention& iv : {Intervention::natural(), Intervention::feasible(),
                                   Intervention::impossible()}) {
        CAPTURE(iv.label());
        const auto one = simulate_intervention(spec, kDefaults, iv, n, 512, 1);
        const auto three = simulate_intervention(spec, kDefaults, iv, n, 512, 3);
        CHECK(one == three);
    }
}

TEST_CASE("feasible and impossible risks match frozen analytic values") {
    // 4-sigma tolerance at n = 100,000.
    const std::int64_t n = 100000;
    const double tol = 4.0 * std::sqrt(0.25 / static_cast<double>(n));
    struct Row {
        const char* name;
        double feasible, impossible, impossible_pooled;
    };
    const Row rows[] = {
        {"base", 0.5754122, 0.5951042488787186, 0.5965983864570737},
        {"D", 0.36632500000000007, 0.3858350313479625, 0.38726756311745336},
        {"E", 0.4111, 0.4301320824524312, 0.4315299091940976},
    };
    for (const auto& row : rows) {
        CAPTURE(row.name);
        const auto& spec = find_scenario(row.name);
        const auto feas = simulate_intervention(spec, kDefaults,
                                                Intervention::feasible(), n, 7777);
        const auto imp = simulate_intervention(spec, kDefaults,
                                               Intervention::impossible(), n, 7777);
        const auto imp_pooled = simulate_intervention(
            spec, kDefaults, Intervention::impossible(true), n, 7777);
        CHECK(std::abs(empirical_risk(feas) - row.feasible) < tol);
        CHECK(std::abs(empirical_risk(imp) - row.impossible) < tol);
        CHECK(std::abs(empirical_risk(imp_pooled) - row.impossible_pooled) < tol);
        // Pooling the history donors across strata changes drawn histories.
        CHECK(imp != imp_pooled);
    }
}

TEST_CASE("impossible intervention requires history donors") {
    const auto& spec = find_scenario("base");

    SECTION("no initiators at all") {
        TreatmentModel tm = kDefaults;
        tm.p_init = {{{0.0, 0.0}, {0.0, 0.0}, {0.0, 0.0}}};
        CHECK_THROWS_AS(simulate_intervention(spec, tm, Intervention::impossible(),
                                              2000, 5),
                        DegenerateStratumError);
    }

    SECTION("one stratum lacks donors; pooling rescues it") {
        TreatmentModel tm = kDefaults;
        tm.p_init = {{{0.2, 0.0}, {0.3, 0.0}, {0.0, 0.0}}};
        CHECK_THROWS_WITH(simulate_intervention(spec, tm, Intervention::impossible(),
                                                2000, 5),
                          Catch::Matchers::ContainsSubstring("C=1"));
        CHECK_NOTHROW(simulate_intervention(spec, tm, Intervention::impossible(true),
                                            2000, 5));
    }
}

TEST_CASE("config validation on simulator entry points") {
    const auto& spec = find_scenario("base");
    CHECK_THROWS_AS(simulate_natural(spec, kDefaults, 0, 1), ConfigError);
    TreatmentModel bad = kDefaults;
    bad.p_c1 = 1.5;
    CHECK_THROWS_AS(simulate_natural(spec, bad, 10, 1), ConfigError);
    CHECK_THROWS_AS(Intervention::delayed_window(2, 1), ConfigError);
    CHECK_THROWS_AS(Intervention::delayed_window(-1, 1), ConfigError);
    CHECK_THROWS_AS(Intervention::delayed_window(0, kPeriods + 1), ConfigError);
    CHECK_THROWS_AS(mc_risk(spec, kDefaults, Intervention::natural(), 10, 0, 1),
                    ConfigError);
}

TEST_CASE("empirical_risk counts events inside the horizon") {
    std::vector<PersonPath> paths(4);
    paths[0].event_period = 0;
    paths[1].event_period = 2;
    paths[2].start_time = 1;
    CHECK(empirical_risk(paths) == 0.5);
    CHECK(empirical_risk(paths, 2) == 0.25);
    CHECK(empirical_risk(paths, 1) == 0.25);
    CHECK(empirical_risk({}) == 0.0);
}

TEST_CASE("mc_risk labels and degenerate sizes") {
    const auto& spec = find_scenario("A");
    const RiskEstimate one = mc_risk(spec, kDefaults, Intervention::natural(), 1, 1, 3);
    CHECK((one.risk == 0.0 || one.risk == 1.0));
    CHECK(one.method == "mc:natural");
    CHECK(one.n == 1);
    CHECK(one.reps == 1);
    const RiskEstimate imp =
        mc_risk(spec, kDefaults, Intervention::impossible(true), 50, 2, 3);
    CHECK(imp.method == "mc:impossible_marginal");
    CHECK(imp.risk >= 0.0);
    CHECK(imp.risk <= 1.0);
}

TEST_CASE("natural course hits the treatment model's margins") {
    const auto paths = simulate_natural(find_scenario("A"), kDefaults, 50000, 1234);
    std::int64_t c1 = 0, c0_start0 = 0, c0_total = 0, c1_start0 = 0;
    for (const auto& path : paths) {
        if (path.c() == 1) {
            ++c1;
            if (path.start_time == 0) ++c1_start0;
        } else {
            ++c0_total;
            if (path.start_time == 0) ++c0_start0;
        }
    }
    const auto frac = [](std::int64_t a, std::int64_t b) {
        return static_cast<double>(a) / static_cast<double>(b);
    };
    CHECK(std::abs(frac(c1, 50000) - 0.5) < 0.01);
    CHECK(std::abs(frac(c0_start0, c0_total) - 0.2) < 0.015);
    CHECK(std::abs(frac(c1_start0, c1) - 0.4) < 0.015);
}
