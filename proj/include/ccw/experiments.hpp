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
#ifndef CCW_EXPERIMENTS_HPP
#define CCW_EXPERIMENTS_HPP

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <string>
#include <vector>

#include "ccw/engine.hpp"
#include "ccw/errors.hpp"
#include "ccw/rng.hpp"
#include "ccw/simulate.hpp"

namespace ccw {

/// Initiation window used by the clone-censor-weight analyses and their
/// paired interventions: initiate by the start of period 1.
inline constexpr int kStudyWindowEnd = 1;

/// One scenario's result surface: both weighting schemes applied to the
/// natural cohort, plus the four intervention oracles.
struct Table2Row {
    std::string scenario;
    double limited_ccw = 0.0;
    double all_initiator_ccw = 0.0;
    double iv_start0 = 0.0;
    double iv_start1 = 0.0;
    double iv_feasible = 0.0;
    double iv_impossible = 0.0;
};

/// Monte Carlo half-width used for cross-method agreement checks:
/// 4 standard errors of a proportion at worst-case variance.
inline double mc_tolerance(std::int64_t n, int reps) {
    return 4.0 * std::sqrt(0.25 / (static_cast<double>(n) * reps));
}

/// Runs every catalog scenario: per replicate, one natural cohort feeds
/// both weighting schemes, and the four intervention arms are simulated
/// under the same replicate seed so all columns share person-level
/// randomness. Per-replicate risks are averaged.
inline std::vector<Table2Row> run_table2(const TreatmentModel& tm, std::int64_t n,
                                         int reps, std::uint64_t seed,
                                         int threads = 1) {
    if (reps < 1) throw ConfigError("run_table2: reps must be >= 1");
    std::vector<Table2Row> rows;
    rows.reserve(scenario_catalog().size());
    for (const auto& spec : scenario_catalog()) {
        Table2Row row;
        row.scenario = spec.name;
        for (int r = 0; r < reps; ++r) {
            const std::uint64_t rseed = child_seed(seed, static_cast<std::uint64_t>(r));
            const auto natural = simulate_natural(spec, tm, n, rseed, threads);
            const auto clones = clone_and_censor(natural, kStudyWindowEnd);
            row.limited_ccw +=
                weighted_risk(estimate_weights(clones, WeightScheme::limited,
                                               kStudyWindowEnd),
                              kPeriods)
                    .risk;
            row.all_initiator_ccw +=
                weighted_risk(estimate_weights(clones, WeightScheme::all_initiator,
                                               kStudyWindowEnd),
                              kPeriods)
                    .risk;
            row.iv_start0 += empirical_risk(
                simulate_intervention(spec, tm, Intervention::start_at_0(), n, rseed,
                                      threads));
            row.iv_start1 += empirical_risk(
                simulate_intervention(spec, tm, Intervention::start_at_1(), n, rseed,
                                      threads));
            row.iv_feasible += empirical_risk(
                simulate_intervention(spec, tm, Intervention::feasible(), n, rseed,
                                      threads));
            row.iv_impossible += empirical_risk(
                simulate_intervention(spec, tm, Intervention::impossible(), n, rseed,
                                      threads));
        }
        row.limited_ccw /= reps;
        row.all_initiator_ccw /= reps;
        row.iv_start0 /= reps;
        row.iv_start1 /= reps;
        row.iv_feasible /= reps;
        row.iv_impossible /= reps;
        rows.push_back(std::move(row));
    }
    return rows;
}

/// Decision-matrix entry for one scenario: (a) do the two weighting
/// schemes agree, and (b) is the timing of initiation inside the window
/// ignorable (forced start at the window end matches the feasible
/// intervention's risk)?
struct Table3Entry {
    std::string scenario;
    double scheme_gap = 0.0; ///< |limited - all_initiator|
    double timing_gap = 0.0; ///< |feasible - start_at_1|
    bool schemes_agree_observed = false;
    bool schemes_agree_expected = false;
    bool timing_ignorable_observed = false;
    bool timing_ignorable_expected = false;

    bool pass() const {
        return schemes_agree_observed == schemes_agree_expected &&
               timing_ignorable_observed == timing_ignorable_expected;
    }
};

struct Table3Report {
    double tolerance = 0.0;
    std::vector<Table3Entry> entries;
    bool all_pass = false;
};

namespace detail {

/// Expected agreement pattern per catalog scenario. Schemes agree when
/// the outcome model gives exposure no effect (A), an effect only after
/// the window (C), or an instantaneous-only effect (B); timing inside the
/// window is ignorable only when timing cannot reach the hazard before
/// the window closes (A, C).
inline void expected_table3(const std::string& scenario, bool& schemes_agree,
                            bool& timing_ignorable) {
    if (scenario == "A" || scenario == "C") {
        schemes_agree = true;
        timing_ignorable = true;
    } else if (scenario == "B") {
        schemes_agree = true;
        timing_ignorable = false;
    } else if (scenario == "base" || scenario == "D" || scenario == "E") {
        schemes_agree = false;
        timing_ignorable = false;
    } else {
        throw ConfigError("no expected decision-matrix entry for scenario '" +
                          scenario + "'");
    }
}

inline std::string fixed6(double v) {
    char buffer[32];
    std::snprintf(buffer, sizeof(buffer), "%.6f", v);
    return buffer;
}

} // namespace detail

/// Evaluates both agreement questions per scenario against the expected
/// pattern for the built-in catalog.
inline Table3Report check_table3(const std::vector<Table2Row>& rows, double tolerance) {
    if (!(tolerance > 0.0)) throw ConfigError("check_table3: tolerance must be > 0");
    Table3Report report;
    report.tolerance = tolerance;
    report.all_pass = true;
    for (const auto& row : rows) {
        Table3Entry entry;
        entry.scenario = row.scenario;
        entry.scheme_gap = std::fabs(row.limited_ccw - row.all_initiator_ccw);
        entry.timing_gap = std::fabs(row.iv_feasible - row.iv_start1);
        entry.schemes_agree_observed = entry.scheme_gap <= tolerance;
        entry.timing_ignorable_observed = entry.timing_gap <= tolerance;
        detail::expected_table3(row.scenario, entry.schemes_agree_expected,
                                entry.timing_ignorable_expected);
        report.all_pass = report.all_pass && entry.pass();
        report.entries.push_back(std::move(entry));
    }
    return report;
}

inline void write_table2_csv(const std::vector<Table2Row>& rows, std::ostream& out) {
    out << "scenario,limited_ccw,all_initiator_ccw,iv_start0,iv_start1,"
           "iv_feasible,iv_impossible\n";
    for (const auto& row : rows) {
        out << row.scenario << "," << detail::fixed6(row.limited_ccw) << ","
            << detail::fixed6(row.all_initiator_ccw) << ","
            << detail::fixed6(row.iv_start0) << "," << detail::fixed6(row.iv_start1)
            << "," << detail::fixed6(row.iv_feasible) << ","
            << detail::fixed6(row.iv_impossible) << "\n";
    }
}

inline void write_table2_csv(const std::vector<Table2Row>& rows,
                             const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    write_table2_csv(rows, out);
    if (!out) throw IoError("write failed for '" + path + "'");
}

inline std::string format_table3_report(const Table3Report& report) {
    std::string out;
    out += "Scheme-agreement and timing-ignorability checks (tolerance " +
           detail::fixed6(report.tolerance) + ")\n";
    out += "scenario  schemes_agree obs/exp  timing_ignorable obs/exp  "
           "scheme_gap  timing_gap  verdict\n";
    auto yn = [](bool b) { return b ? "yes" : "no "; };
    for (const auto& entry : report.entries) {
        char line[160];
        std::snprintf(line, sizeof(line),
                      "%-8s  %s/%s                %s/%s                   %s    %s  %s\n",
                      entry.scenario.c_str(), yn(entry.schemes_agree_observed),
                      yn(entry.schemes_agree_expected),
                      yn(entry.timing_ignorable_observed),
                      yn(entry.timing_ignorable_expected),
                      detail::fixed6(entry.scheme_gap).c_str(),
                      detail::fixed6(entry.timing_gap).c_str(),
                      entry.pass() ? "PASS" : "FAIL");
        out += line;
    }
    out += report.all_pass ? "ALL PASS\n" : "FAILURES PRESENT\n";
    return out;
}

inline void write_table3_report(const Table3Report& report, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    out << format_table3_report(report);
    if (!out) throw IoError("write failed for '" + path + "'");
}

} // namespace ccw

#endif // CCW_EXPERIMENTS_HPP
