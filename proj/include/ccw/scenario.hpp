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
#ifndef CCW_SCENARIO_HPP
#define CCW_SCENARIO_HPP

#include <array>
#include <cmath>
#include <map>
#include <sstream>
#include <string>

#include "ccw/errors.hpp"
#include "ccw/keyval.hpp"

namespace ccw {

/// Number of discrete periods in the study horizon. Period t covers
/// time t to t+1; the outcome risk horizon is the end of period 2.
inline constexpr int kPeriods = 3;

/// Exposure state of one person in one period. Exposure is persistent:
/// once x=1 it stays 1 for the rest of follow-up.
struct ExposureState {
    int x = 0;      ///< current-period exposure, 0 or 1
    int cum_x = 0;  ///< exposed periods so far, counting the current one
    int prev_x = 0; ///< exposure in the immediately preceding period
    int t = 0;      ///< period index in [0, kPeriods)
};

/// Consistency checks: a state is reachable iff a persistent exposure
/// trajectory can produce it.
inline bool exposure_state_valid(const ExposureState& s) {
    if (s.x < 0 || s.x > 1 || s.prev_x < 0 || s.prev_x > 1) return false;
    if (s.t < 0 || s.t >= kPeriods) return false;
    if (s.cum_x < s.x || s.cum_x > s.t + 1) return false;
    if (s.prev_x > std::min(1, s.cum_x)) return false;
    // Persistence: prev_x=1 requires current exposure and at least two
    // exposed periods; x=0 forbids any exposure history.
    if (s.prev_x == 1 && (s.x == 0 || s.cum_x < 2)) return false;
    if (s.x == 0 && s.cum_x != 0) return false;
    // cum_x > 1 means the previous period was exposed.
    if (s.cum_x >= 2 && s.prev_x == 0) return false;
    return true;
}

/// Builds the exposure state at period t for a persistent trajectory
/// that starts exposure at start_time (negative start_time = never).
inline ExposureState exposure_state_at(int t, int start_time) {
    ExposureState s;
    s.t = t;
    if (start_time >= 0 && t >= start_time) {
        s.x = 1;
        s.cum_x = t - start_time + 1;
        s.prev_x = (t - 1 >= start_time) ? 1 : 0;
    }
    return s;
}

/// Linear-additive discrete-time outcome model:
///   P(event in period t) = intercept + beta_c*C
///                        + [t >= onset_period] * beta_x * X
///                        + beta_cumx * cumX + beta_prevx * prevX
struct ScenarioSpec {
    std::string name;
    double intercept = 0.0;
    double beta_c = 0.0;
    double beta_x = 0.0;
    double beta_cumx = 0.0;
    double beta_prevx = 0.0;
    int onset_period = 0; ///< first period at which beta_x applies
};

/// Evaluates the per-period event hazard. Values outside [0,1] are a
/// configuration error, never clamped: clamping would silently change
/// the quantity being estimated.
inline double hazard(const ScenarioSpec& spec, int c, const ExposureState& state) {
    if (c < 0 || c > 1) {
        throw ConfigError("hazard: confounder must be 0 or 1, got " + std::to_string(c));
    }
    if (!exposure_state_valid(state)) {
        std::ostringstream msg;
        msg << "hazard: inconsistent exposure state (x=" << state.x
            << ", cum_x=" << state.cum_x << ", prev_x=" << state.prev_x
            << ", t=" << state.t << ")";
        throw ConfigError(msg.str());
    }
    const double x_term = (state.t >= spec.onset_period) ? spec.beta_x * state.x : 0.0;
    const double h = spec.intercept + spec.beta_c * c + x_term +
                     spec.beta_cumx * state.cum_x + spec.beta_prevx * state.prev_x;
    if (!std::isfinite(h) || h < 0.0 || h > 1.0) {
        std::ostringstream msg;
        msg << "hazard: value " << h << " outside [0,1] for scenario '" << spec.name
            << "' (intercept=" << spec.intercept << ", beta_c=" << spec.beta_c
            << ", beta_x=" << spec.beta_x << ", beta_cumx=" << spec.beta_cumx
            << ", beta_prevx=" << spec.beta_prevx << ", onset=" << spec.onset_period
            << ") at c=" << c << ", x=" << state.x << ", cum_x=" << state.cum_x
            << ", prev_x=" << state.prev_x << ", t=" << state.t;
        throw ConfigError(msg.str());
    }
    return h;
}

/// The six built-in outcome models. "base" carries every exposure
/// effect; A has none; B has current-exposure only; C delays the
/// current-exposure effect to period 1; D acts through the lagged
/// indicator; E acts through cumulative exposure.
inline const std::array<ScenarioSpec, 6>& scenario_catalog() {
    static const std::array<ScenarioSpec, 6> catalog = {{
        {"base", 0.05, 0.1, 0.1, 0.04, 0.05, 0},
        {"A", 0.05, 0.1, 0.0, 0.0, 0.0, 0},
        {"B", 0.05, 0.1, 0.1, 0.0, 0.0, 0},
        {"C", 0.05, 0.1, 0.1, 0.0, 0.0, 1},
        {"D", 0.05, 0.1, 0.0, 0.0, 0.1, 0},
        {"E", 0.05, 0.1, 0.0, 0.05, 0.0, 0},
    }};
    return catalog;
}

/// Looks up a built-in scenario by name.
inline const ScenarioSpec& find_scenario(const std::string& name) {
    for (const auto& spec : scenario_catalog()) {
        if (spec.name == name) return spec;
    }
    throw ConfigError("unknown scenario '" + name +
                      "' (built-in: base, A, B, C, D, E)");
}

/// Validates that every reachable state yields a hazard inside [0,1].
/// Reachable states are persistent-trajectory states only.
inline void validate_scenario(const ScenarioSpec& spec) {
    for (int c = 0; c <= 1; ++c) {
        for (int t = 0; t < kPeriods; ++t) {
            for (int start = -1; start <= t; ++start) {
                (void)hazard(spec, c, exposure_state_at(t, start));
            }
        }
    }
}

/// Builds a custom scenario from key=value text. Recognized keys:
/// name, intercept, beta_c, beta_x, beta_cumx, beta_prevx, onset_period.
/// Coefficients default to 0, onset_period to 0, name to "custom".
inline ScenarioSpec scenario_from_keyvalues(const std::map<std::string, std::string>& kv) {
    ScenarioSpec spec;
    spec.name = "custom";
    for (const auto& [key, value] : kv) {
        if (key == "name") {
            spec.name = value;
        } else if (key == "intercept") {
            spec.intercept = parse_double(key, value);
        } else if (key == "beta_c") {
            spec.beta_c = parse_double(key, value);
        } else if (key == "beta_x") {
            spec.beta_x = parse_double(key, value);
        } else if (key == "beta_cumx") {
            spec.beta_cumx = parse_double(key, value);
        } else if (key == "beta_prevx") {
            spec.beta_prevx = parse_double(key, value);
        } else if (key == "onset_period") {
            const long long onset = parse_int(key, value);
            if (onset < 0 || onset >= kPeriods) {
                throw ConfigError("onset_period must be in [0," +
                                  std::to_string(kPeriods - 1) + "], got " + value);
            }
            spec.onset_period = static_cast<int>(onset);
        } else {
            throw ConfigError("unknown scenario key '" + key + "'");
        }
    }
    if (!std::isfinite(spec.intercept) || !std::isfinite(spec.beta_c) ||
        !std::isfinite(spec.beta_x) || !std::isfinite(spec.beta_cumx) ||
        !std::isfinite(spec.beta_prevx)) {
        throw ConfigError("scenario coefficients must be finite");
    }
    validate_scenario(spec);
    return spec;
}

} // namespace ccw

#endif // CCW_SCENARIO_HPP
