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
#ifndef CCW_ENGINE_HPP
#define CCW_ENGINE_HPP

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "ccw/cohort.hpp"
#include "ccw/errors.hpp"
#include "ccw/fraction.hpp"
#include "ccw/scenario.hpp"

namespace ccw {

/// One cloned observation assigned to the "initiate by the window end"
/// regimen. Weights are exact rationals: nonparametric censoring weights
/// are ratios of counts, and exact carry lets weighted_risk and
/// brute_force_risk agree bit for bit.
struct CloneRecord {
    std::int64_t person_id = 0;
    std::vector<int> strata;
    std::optional<int> start_time;
    std::optional<int> censor_period;
    std::optional<int> event_period;
    std::array<Fraction, kPeriods> weight{Fraction(1), Fraction(1), Fraction(1)};
};

/// Which clones contribute to the censoring-probability estimate at the
/// window end.
enum class WeightScheme {
    limited,       ///< only those not already initiated before the window end
    all_initiator, ///< everyone uncensored, early initiators included
};

inline std::string to_string(WeightScheme scheme) {
    return scheme == WeightScheme::limited ? "limited" : "all_initiator";
}

inline WeightScheme weight_scheme_from_string(const std::string& name) {
    if (name == "limited") return WeightScheme::limited;
    if (name == "all_initiator") return WeightScheme::all_initiator;
    throw ConfigError("unknown weight scheme '" + name +
                      "' (expected limited or all_initiator)");
}

/// True when the clone contributes person-time at period t: not yet
/// censored and not past its event.
inline bool clone_at_risk(const CloneRecord& clone, int t) {
    if (clone.censor_period && t >= *clone.censor_period) return false;
    if (clone.event_period && t > *clone.event_period) return false;
    return true;
}

namespace detail {

inline std::string stratum_label(const std::vector<int>& strata) {
    std::ostringstream out;
    out << "(";
    for (std::size_t i = 0; i < strata.size(); ++i) {
        if (i > 0) out << ",";
        out << strata[i];
    }
    out << ")";
    return out.str();
}

inline void check_window(int window_end, const char* who) {
    if (window_end < 1 || window_end >= kPeriods) {
        throw ConfigError(std::string(who) + ": window_end must be in [1," +
                          std::to_string(kPeriods - 1) + "], got " +
                          std::to_string(window_end));
    }
}

/// Event-free at the start of the window-end decision point.
inline bool in_window_risk_set(const CloneRecord& clone, int window_end) {
    return !clone.event_period || *clone.event_period >= window_end;
}

} // namespace detail

/// Assigns every person one clone under the "initiate by window_end"
/// regimen. Clones still event-free and unexposed when the window closes
/// are censored there; an event before the window end terminates
/// follow-up first and is never overwritten by censoring.
inline std::vector<CloneRecord> clone_and_censor(const std::vector<PersonPath>& paths,
                                                 int window_end) {
    detail::check_window(window_end, "clone_and_censor");
    std::vector<CloneRecord> clones;
    clones.reserve(paths.size());
    for (const auto& path : paths) {
        CloneRecord clone;
        clone.person_id = path.id;
        clone.strata = path.covariates;
        clone.start_time = path.start_time;
        clone.event_period = path.event_period;
        const bool event_free = detail::in_window_risk_set(clone, window_end);
        const bool unexposed_by_window =
            !path.start_time || *path.start_time > window_end;
        if (event_free && unexposed_by_window) {
            clone.censor_period = window_end;
            for (int t = window_end; t < kPeriods; ++t) {
                clone.weight[static_cast<std::size_t>(t)] = Fraction(0);
            }
        }
        clones.push_back(std::move(clone));
    }
    return clones;
}

/// Estimates inverse-probability-of-censoring weights within each
/// covariate stratum and applies them to post-window person-time.
///
/// limited: among risk-set members who had not initiated before the
/// window end, p = share initiating exactly at the window end (widened to
/// [window_end - at_window_tolerance, window_end] when a tolerance is
/// given); window-end initiators get 1/p, earlier initiators keep 1.
///
/// all_initiator: q = share of the stratum's risk set left uncensored;
/// every uncensored risk-set member gets 1/q, early initiators included.
inline std::vector<CloneRecord> estimate_weights(std::vector<CloneRecord> clones,
                                                 WeightScheme scheme, int window_end,
                                                 int at_window_tolerance = 0) {
    detail::check_window(window_end, "estimate_weights");
    if (at_window_tolerance < 0 || at_window_tolerance > window_end) {
        throw ConfigError("estimate_weights: at_window_tolerance must be in [0," +
                          std::to_string(window_end) + "]");
    }
    const int window_open = window_end - at_window_tolerance;

    auto initiated_early = [&](const CloneRecord& clone) {
        return clone.start_time && *clone.start_time < window_open;
    };
    auto initiated_at_window = [&](const CloneRecord& clone) {
        return clone.start_time && *clone.start_time >= window_open &&
               *clone.start_time <= window_end;
    };

    struct StratumTally {
        std::int64_t eligible = 0; ///< weight-model population in the stratum
        std::int64_t kept = 0;     ///< members of it that stay uncensored
    };
    std::map<std::vector<int>, StratumTally> tallies;

    for (const auto& clone : clones) {
        if (!detail::in_window_risk_set(clone, window_end)) continue;
        auto& tally = tallies[clone.strata];
        if (scheme == WeightScheme::limited) {
            if (initiated_early(clone)) continue;
            ++tally.eligible;
            if (initiated_at_window(clone)) ++tally.kept;
        } else {
            ++tally.eligible;
            if (!clone.censor_period) ++tally.kept;
        }
    }

    for (const auto& [strata, tally] : tallies) {
        if (tally.eligible > 0 && tally.kept == 0) {
            throw PositivityError(
                "stratum " + detail::stratum_label(strata) +
                ": probability of remaining uncensored is zero under the " +
                to_string(scheme) + " scheme (" + std::to_string(tally.eligible) +
                " eligible, 0 uncensored)");
        }
    }

    for (auto& clone : clones) {
        if (!detail::in_window_risk_set(clone, window_end)) continue;
        if (clone.censor_period) continue;
        const auto& tally = tallies.at(clone.strata);
        const bool reweight = scheme == WeightScheme::limited
                                  ? initiated_at_window(clone)
                                  : true;
        if (!reweight) continue;
        const Fraction w(tally.eligible, tally.kept);
        for (int t = window_end; t < kPeriods; ++t) {
            clone.weight[static_cast<std::size_t>(t)] = w;
        }
    }
    return clones;
}

namespace detail {

/// Any weighted event mass left at or after period t within the horizon?
inline bool weighted_events_remaining(const std::vector<CloneRecord>& clones, int t,
                                      int horizon) {
    for (const auto& clone : clones) {
        if (!clone.event_period) continue;
        const int e = *clone.event_period;
        if (e >= t && e < horizon && clone_at_risk(clone, e) &&
            !clone.weight[static_cast<std::size_t>(e)].is_zero()) {
            return true;
        }
    }
    return false;
}

inline void check_horizon(int horizon, const char* who) {
    if (horizon < 1 || horizon > kPeriods) {
        throw ConfigError(std::string(who) + ": horizon must be in [1," +
                          std::to_string(kPeriods) + "], got " +
                          std::to_string(horizon));
    }
}

} // namespace detail

/// Weighted discrete-time cumulative incidence (Kaplan-Meier complement):
/// risk = 1 - prod_t (1 - E_t / S_t) with E_t the weighted events at t and
/// S_t the weighted risk set at t. Computed in exact rational arithmetic;
/// if a result outgrows 64-bit rationals the final combination falls back
/// to double, keeping the period sums exact either way.
inline RiskEstimate weighted_risk(const std::vector<CloneRecord>& clones, int horizon) {
    detail::check_horizon(horizon, "weighted_risk");

    std::array<Fraction, kPeriods> at_risk_mass{};
    std::array<Fraction, kPeriods> event_mass{};
    for (int t = 0; t < horizon; ++t) {
        Fraction s(0);
        Fraction e(0);
        for (const auto& clone : clones) {
            if (!clone_at_risk(clone, t)) continue;
            const Fraction& w = clone.weight[static_cast<std::size_t>(t)];
            s += w;
            if (clone.event_period && *clone.event_period == t) e += w;
        }
        at_risk_mass[static_cast<std::size_t>(t)] = s;
        event_mass[static_cast<std::size_t>(t)] = e;
    }

    double risk = 0.0;
    try {
        Fraction survival(1);
        for (int t = 0; t < horizon; ++t) {
            const Fraction& s = at_risk_mass[static_cast<std::size_t>(t)];
            const Fraction& e = event_mass[static_cast<std::size_t>(t)];
            if (s.is_zero()) {
                if (detail::weighted_events_remaining(clones, t, horizon)) {
                    throw EstimationError(
                        "weighted_risk: risk set has zero weight at period " +
                        std::to_string(t) + " with weighted events remaining");
                }
                continue;
            }
            survival = survival * ((s - e) / s);
        }
        risk = (Fraction(1) - survival).value();
    } catch (const FractionOverflow&) {
        double survival = 1.0;
        for (int t = 0; t < horizon; ++t) {
            const double s = at_risk_mass[static_cast<std::size_t>(t)].value();
            const double e = event_mass[static_cast<std::size_t>(t)].value();
            if (s == 0.0) {
                if (detail::weighted_events_remaining(clones, t, horizon)) {
                    throw EstimationError(
                        "weighted_risk: risk set has zero weight at period " +
                        std::to_string(t) + " with weighted events remaining");
                }
                continue;
            }
            survival *= (s - e) / s;
        }
        risk = 1.0 - survival;
    }

    RiskEstimate est;
    est.risk = risk;
    est.horizon = horizon;
    est.method = "weighted_km";
    est.n = static_cast<std::int64_t>(clones.size());
    est.reps = 1;
    return est;
}

/// Direct weighted-proportion oracle, valid when regimen censoring at a
/// single window end is the only censoring: risk = weighted events by the
/// horizon over total clone mass, where pre-window events carry weight 1,
/// censored clones carry no post-window mass, and uncensored clones carry
/// their post-window weight. Equals weighted_risk exactly in that setting
/// whenever the weights preserve stratum mass (as estimate_weights does).
inline RiskEstimate brute_force_risk(const std::vector<CloneRecord>& clones,
                                     int horizon) {
    detail::check_horizon(horizon, "brute_force_risk");

    std::optional<int> window;
    for (const auto& clone : clones) {
        if (!clone.censor_period) continue;
        if (*clone.censor_period < 1 || *clone.censor_period >= kPeriods) {
            throw ConfigError("brute_force_risk: censor period " +
                              std::to_string(*clone.censor_period) + " out of range");
        }
        if (window && *window != *clone.censor_period) {
            throw ConfigError(
                "brute_force_risk: requires a single censoring time, found " +
                std::to_string(*window) + " and " +
                std::to_string(*clone.censor_period));
        }
        window = clone.censor_period;
    }
    if (window && *window >= horizon) {
        throw ConfigError("brute_force_risk: censoring at or after the horizon "
                          "is not supported");
    }
    const int w = window.value_or(0);

    auto clone_mass = [&](const CloneRecord& clone) -> Fraction {
        if (clone.event_period && *clone.event_period < w) {
            return clone.weight[static_cast<std::size_t>(*clone.event_period)];
        }
        if (clone.censor_period) return Fraction(0);
        return clone.weight[static_cast<std::size_t>(w)];
    };

    double risk = 0.0;
    try {
        Fraction events(0);
        Fraction total(0);
        for (const auto& clone : clones) {
            total += clone_mass(clone);
            if (clone.event_period && *clone.event_period < horizon &&
                clone_at_risk(clone, *clone.event_period)) {
                events += clone.weight[static_cast<std::size_t>(*clone.event_period)];
            }
        }
        risk = total.is_zero() ? 0.0 : (events / total).value();
    } catch (const FractionOverflow&) {
        double events = 0.0;
        double total = 0.0;
        for (const auto& clone : clones) {
            total += clone_mass(clone).value();
            if (clone.event_period && *clone.event_period < horizon &&
                clone_at_risk(clone, *clone.event_period)) {
                events +=
                    clone.weight[static_cast<std::size_t>(*clone.event_period)].value();
            }
        }
        risk = total == 0.0 ? 0.0 : events / total;
    }

    RiskEstimate est;
    est.risk = risk;
    est.horizon = horizon;
    est.method = "direct_proportion";
    est.n = static_cast<std::int64_t>(clones.size());
    est.reps = 1;
    return est;
}

/// Weighted at-risk mass per stratum at period t. With weights from
/// estimate_weights, the mass at the window end equals the stratum's
/// event-free at-risk count exactly.
inline std::map<std::vector<int>, Fraction> weighted_at_risk_mass(
    const std::vector<CloneRecord>& clones, int t) {
    if (t < 0 || t >= kPeriods) {
        throw ConfigError("weighted_at_risk_mass: period out of range");
    }
    std::map<std::vector<int>, Fraction> mass;
    for (const auto& clone : clones) {
        if (!clone_at_risk(clone, t)) continue;
        auto [it, inserted] = mass.try_emplace(clone.strata, Fraction(0));
        it->second += clone.weight[static_cast<std::size_t>(t)];
    }
    return mass;
}

} // namespace ccw

#endif // CCW_ENGINE_HPP
