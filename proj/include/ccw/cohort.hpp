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
#ifndef CCW_COHORT_HPP
#define CCW_COHORT_HPP

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ccw/errors.hpp"
#include "ccw/scenario.hpp"

namespace ccw {

/// One individual's trajectory: baseline covariates, period of first
/// exposure (persistent thereafter), and period of the absorbing event.
/// Simulated cohorts carry a single covariate, the binary confounder C;
/// externally loaded cohorts may carry several.
struct PersonPath {
    std::int64_t id = 0;
    std::vector<int> covariates;
    std::optional<int> start_time;
    std::optional<int> event_period;

    /// Convenience accessor for the lead covariate (C in simulated data).
    int c() const { return covariates.empty() ? 0 : covariates.front(); }

    friend bool operator==(const PersonPath& a, const PersonPath& b) {
        return a.id == b.id && a.covariates == b.covariates &&
               a.start_time == b.start_time && a.event_period == b.event_period;
    }
};

/// Baseline confounder prevalence and per-period, confounder-conditional
/// initiation probabilities for the natural course.
struct TreatmentModel {
    double p_c1 = 0.5;
    /// p_init[t][c]: probability of initiating at period t given not yet
    /// initiated and C = c.
    std::array<std::array<double, 2>, kPeriods> p_init{};

    /// Defaults chosen so that time-0 initiation is more likely when C=1,
    /// time-1 initiation is common, and nobody initiates in the final period.
    static TreatmentModel defaults() {
        TreatmentModel tm;
        tm.p_c1 = 0.5;
        tm.p_init = {{{0.2, 0.4}, {0.3, 0.3}, {0.0, 0.0}}};
        return tm;
    }

    void validate() const {
        auto check = [](double p, const std::string& what) {
            if (!(p >= 0.0 && p <= 1.0)) {
                throw ConfigError("treatment model: " + what + " = " +
                                  std::to_string(p) + " outside [0,1]");
            }
        };
        check(p_c1, "p_c1");
        for (int t = 0; t < kPeriods; ++t) {
            for (int c = 0; c <= 1; ++c) {
                check(p_init[static_cast<std::size_t>(t)][static_cast<std::size_t>(c)],
                      "p_init[" + std::to_string(t) + "][" + std::to_string(c) + "]");
            }
        }
    }
};

/// A hypothetical intervention on treatment initiation.
///
/// - natural:      no intervention; the observed initiation process.
/// - start_at_0:   everyone exposed from period 0.
/// - start_at_1:   everyone unexposed in period 0, exposed from period 1.
/// - feasible:     natural course through period 0; event-free people still
///                 unexposed at period 1 initiate then, with their true
///                 (unexposed) history.
/// - impossible:   natural initiation at periods 0 and 1; people who still
///                 have not initiated after the natural period-1 decision
///                 are forced to start and are assigned a pseudo-start time
///                 drawn from the start-time distribution of natural
///                 by-period-1 initiators, and their later hazards use that
///                 assigned history. Not implementable in any real trial;
///                 provided as the oracle the all-initiator weighting
///                 scheme targets.
/// - delayed_window(w_start, w_end): initiation forbidden before w_start,
///                 natural within [w_start, w_end), forced at w_end.
struct Intervention {
    enum class Kind {
        natural,
        start_at_0,
        start_at_1,
        feasible,
        impossible,
        delayed_window,
    };

    Kind kind = Kind::natural;
    int window_start = 0; ///< delayed_window only
    int window_end = 0;   ///< delayed_window only
    /// impossible only: draw pseudo-start times from the pooled initiator
    /// population instead of conditioning on C.
    bool marginal_history = false;

    static Intervention natural() { return {}; }
    static Intervention start_at_0() { return {Kind::start_at_0, 0, 0, false}; }
    static Intervention start_at_1() { return {Kind::start_at_1, 0, 0, false}; }
    static Intervention feasible() { return {Kind::feasible, 0, 0, false}; }
    static Intervention impossible(bool marginal = false) {
        return {Kind::impossible, 0, 0, marginal};
    }
    static Intervention delayed_window(int w_start, int w_end) {
        Intervention iv{Kind::delayed_window, w_start, w_end, false};
        iv.validate();
        return iv;
    }

    void validate() const {
        if (kind == Kind::delayed_window) {
            if (window_start < 0 || window_start > window_end || window_end > kPeriods) {
                throw ConfigError("delayed_window: need 0 <= w_start <= w_end <= " +
                                  std::to_string(kPeriods) + ", got [" +
                                  std::to_string(window_start) + ", " +
                                  std::to_string(window_end) + "]");
            }
        }
    }

    std::string label() const {
        switch (kind) {
            case Kind::natural: return "natural";
            case Kind::start_at_0: return "start_at_0";
            case Kind::start_at_1: return "start_at_1";
            case Kind::feasible: return "feasible";
            case Kind::impossible:
                return marginal_history ? "impossible_marginal" : "impossible";
            case Kind::delayed_window:
                return "delayed_window(" + std::to_string(window_start) + "," +
                       std::to_string(window_end) + ")";
        }
        return "unknown";
    }
};

/// A cumulative risk at a period horizon, tagged with how it was obtained.
struct RiskEstimate {
    double risk = 0.0;
    int horizon = kPeriods;
    std::string method;
    std::int64_t n = 0; ///< individuals (or clones) per replicate
    int reps = 1;
};

} // namespace ccw

#endif // CCW_COHORT_HPP
