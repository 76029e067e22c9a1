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
#ifndef CCW_SIMULATE_HPP
#define CCW_SIMULATE_HPP

#include <array>
#include <atomic>
#include <cstdint>
#include <optional>
#include <vector>

#include "ccw/cohort.hpp"
#include "ccw/errors.hpp"
#include "ccw/parallel.hpp"
#include "ccw/rng.hpp"
#include "ccw/scenario.hpp"

namespace ccw {

namespace detail {

/// Draws the confounder for person i. Slot 0 is reserved for this draw in
/// every arm, so a person's C is identical across interventions run with
/// the same cohort seed (common random numbers).
inline int draw_confounder(const PersonStream& ps, const TreatmentModel& tm) {
    return ps.bernoulli(kSlotConfounder, tm.p_c1) ? 1 : 0;
}

inline double init_prob(const TreatmentModel& tm, int t, int c) {
    return tm.p_init[static_cast<std::size_t>(t)][static_cast<std::size_t>(c)];
}

/// Walks one person's periods given an initiation rule; the rule returns
/// true when the person initiates at t (called only while unexposed and
/// event-free). Event draws always use slot_event(t), so arms that share
/// a cohort seed share event randomness period by period.
template <typename InitRule>
PersonPath walk_person(const ScenarioSpec& spec, const TreatmentModel& tm,
                       std::uint64_t cohort_seed, std::int64_t i, InitRule&& initiates) {
    const PersonStream ps(cohort_seed, static_cast<std::uint64_t>(i));
    PersonPath path;
    path.id = i;
    path.covariates = {draw_confounder(ps, tm)};
    const int c = path.covariates.front();
    int start = -1;
    for (int t = 0; t < kPeriods; ++t) {
        if (start < 0 && initiates(ps, t, c)) start = t;
        const ExposureState state = exposure_state_at(t, start);
        if (ps.bernoulli(slot_event(t), hazard(spec, c, state))) {
            path.event_period = t;
            break;
        }
    }
    if (start >= 0) path.start_time = start;
    return path;
}

/// Natural by-period-1 initiators who are event-free at the start of
/// period 1, split by start time and confounder. This is the donor pool
/// for the impossible intervention's pseudo-history draw.
struct DonorCounts {
    // counts[c][s]: donors with C=c and natural start time s (s in {0,1})
    std::array<std::array<std::int64_t, 2>, 2> counts{};

    std::int64_t total(int c) const { return counts[c][0] + counts[c][1]; }
    std::int64_t pooled_start0() const { return counts[0][0] + counts[1][0]; }
    std::int64_t pooled_total() const { return total(0) + total(1); }
};

} // namespace detail

/// Simulates the natural course: per period, event-free people who have
/// not yet initiated do so with probability p_init[t][c]; initiation takes
/// effect in the same period's hazard. Bit-deterministic for fixed
/// (seed, n) regardless of worker count.
inline std::vector<PersonPath> simulate_natural(const ScenarioSpec& spec,
                                                const TreatmentModel& tm,
                                                std::int64_t n, std::uint64_t seed,
                                                int threads = 1) {
    if (n < 1) throw ConfigError("simulate_natural: n must be >= 1");
    tm.validate();
    validate_scenario(spec);
    std::vector<PersonPath> paths(static_cast<std::size_t>(n));
    parallel_for(n, threads, [&](std::int64_t begin, std::int64_t end) {
        for (std::int64_t i = begin; i < end; ++i) {
            paths[static_cast<std::size_t>(i)] =
                detail::walk_person(spec, tm, seed, i,
                                    [&](const PersonStream& ps, int t, int c) {
                                        return ps.bernoulli(slot_initiation(t),
                                                            detail::init_prob(tm, t, c));
                                    });
        }
    });
    return paths;
}

namespace detail {

/// First pass of the impossible intervention: tally the natural-course
/// donor pool. Uses the same per-person slots as simulate_natural, so the
/// pool is exactly the one implied by the natural arm under this seed.
inline DonorCounts tally_donors(const ScenarioSpec& spec, const TreatmentModel& tm,
                                std::int64_t n, std::uint64_t seed, int threads) {
    std::array<std::array<std::atomic<std::int64_t>, 2>, 2> counts{};
    parallel_for(n, threads, [&](std::int64_t begin, std::int64_t end) {
        for (std::int64_t i = begin; i < end; ++i) {
            const PersonPath path =
                walk_person(spec, tm, seed, i, [&](const PersonStream& ps, int t, int c) {
                    return ps.bernoulli(slot_initiation(t), init_prob(tm, t, c));
                });
            if (!path.start_time || *path.start_time > 1) continue;
            if (path.event_period && *path.event_period == 0) continue;
            counts[static_cast<std::size_t>(path.c())]
                  [static_cast<std::size_t>(*path.start_time)]
                      .fetch_add(1, std::memory_order_relaxed);
        }
    });
    DonorCounts donors;
    for (int c = 0; c <= 1; ++c) {
        for (int s = 0; s <= 1; ++s) {
            donors.counts[static_cast<std::size_t>(c)][static_cast<std::size_t>(s)] =
                counts[static_cast<std::size_t>(c)][static_cast<std::size_t>(s)].load();
        }
    }
    return donors;
}

/// Second pass of the impossible intervention. Initiation is natural at
/// periods 0 and 1; event-free people who still have not initiated after
/// the natural period-1 decision are forced to start and draw a
/// pseudo-start time (0 or 1) from the donor pool, with hazards from
/// period 1 on computed as if exposed since the pseudo-start. Their
/// period-0 hazard already used the true unexposed state. The recorded
/// start_time is the pseudo-start, because it is the history the person's
/// hazards were computed under.
inline std::vector<PersonPath> simulate_impossible(const ScenarioSpec& spec,
                                                   const TreatmentModel& tm,
                                                   std::int64_t n, std::uint64_t seed,
                                                   bool marginal_history, int threads) {
    const DonorCounts donors = tally_donors(spec, tm, n, seed, threads);
    std::vector<PersonPath> paths(static_cast<std::size_t>(n));
    parallel_for(n, threads, [&](std::int64_t begin, std::int64_t end) {
        for (std::int64_t i = begin; i < end; ++i) {
            const PersonStream ps(seed, static_cast<std::uint64_t>(i));
            PersonPath path;
            path.id = i;
            path.covariates = {draw_confounder(ps, tm)};
            const int c = path.covariates.front();
            int start =
                ps.bernoulli(slot_initiation(0), init_prob(tm, 0, c)) ? 0 : -1;
            for (int t = 0; t < kPeriods; ++t) {
                if (t == 1 && start < 0 &&
                    ps.bernoulli(slot_initiation(1), init_prob(tm, 1, c))) {
                    start = 1;
                }
                if (t == 1 && start < 0) {
                    const std::int64_t n_start0 = marginal_history
                                                      ? donors.pooled_start0()
                                                      : donors.counts[static_cast<std::size_t>(c)][0];
                    const std::int64_t n_total = marginal_history
                                                     ? donors.pooled_total()
                                                     : donors.total(c);
                    if (n_total == 0) {
                        throw DegenerateStratumError(
                            "impossible intervention: no natural by-period-1 "
                            "initiators to donate history " +
                            std::string(marginal_history
                                            ? "(pooled over C)"
                                            : "in stratum C=" + std::to_string(c)));
                    }
                    const double u = ps.uniform(slot_pseudo_history(kPeriods));
                    start = (u < static_cast<double>(n_start0) /
                                     static_cast<double>(n_total))
                                ? 0
                                : 1;
                }
                // Period 0 always evaluates with the true state: start is
                // either 0 (natural initiation) or -1 (unexposed) there.
                const ExposureState state =
                    (t == 0) ? exposure_state_at(0, start == 0 ? 0 : -1)
                             : exposure_state_at(t, start);
                if (ps.bernoulli(slot_event(t), hazard(spec, c, state))) {
                    path.event_period = t;
                    break;
                }
            }
            if (start >= 0) path.start_time = start;
            paths[static_cast<std::size_t>(i)] = path;
        }
    });
    return paths;
}

} // namespace detail

/// Simulates a cohort under a hypothetical intervention. All arms share
/// the natural arm's per-person randomness slot for slot, so comparisons
/// across arms at the same seed are coupled (common random numbers).
inline std::vector<PersonPath> simulate_intervention(const ScenarioSpec& spec,
                                                     const TreatmentModel& tm,
                                                     const Intervention& iv,
                                                     std::int64_t n, std::uint64_t seed,
                                                     int threads = 1) {
    if (n < 1) throw ConfigError("simulate_intervention: n must be >= 1");
    iv.validate();
    tm.validate();
    validate_scenario(spec);

    // Forced-start arms reduce to a delayed window: initiation forbidden
    // before w_start, natural inside [w_start, w_end), forced at w_end.
    auto window_arm = [&](int w_start, int w_end) {
        std::vector<PersonPath> paths(static_cast<std::size_t>(n));
        parallel_for(n, threads, [&](std::int64_t begin, std::int64_t end) {
            for (std::int64_t i = begin; i < end; ++i) {
                paths[static_cast<std::size_t>(i)] = detail::walk_person(
                    spec, tm, seed, i, [&](const PersonStream& ps, int t, int c) {
                        if (t == w_end) return true;
                        if (t >= w_start && t < w_end) {
                            return ps.bernoulli(slot_initiation(t),
                                                detail::init_prob(tm, t, c));
                        }
                        return false;
                    });
            }
        });
        return paths;
    };

    switch (iv.kind) {
        case Intervention::Kind::natural:
            return simulate_natural(spec, tm, n, seed, threads);
        case Intervention::Kind::start_at_0:
            return window_arm(0, 0);
        case Intervention::Kind::start_at_1:
            return window_arm(1, 1);
        case Intervention::Kind::feasible:
            return window_arm(0, 1);
        case Intervention::Kind::impossible:
            return detail::simulate_impossible(spec, tm, n, seed, iv.marginal_history,
                                               threads);
        case Intervention::Kind::delayed_window:
            return window_arm(iv.window_start, iv.window_end);
    }
    throw ConfigError("simulate_intervention: unknown intervention kind");
}

/// Proportion of paths with an event inside the horizon.
inline double empirical_risk(const std::vector<PersonPath>& paths,
                             int horizon = kPeriods) {
    if (paths.empty()) return 0.0;
    std::int64_t events = 0;
    for (const auto& path : paths) {
        if (path.event_period && *path.event_period < horizon) ++events;
    }
    return static_cast<double>(events) / static_cast<double>(paths.size());
}

/// Monte Carlo risk: mean over replicates of the per-replicate event
/// proportion. Replicate r simulates with child_seed(seed, r).
inline RiskEstimate mc_risk(const ScenarioSpec& spec, const TreatmentModel& tm,
                            const Intervention& iv, std::int64_t n, int reps,
                            std::uint64_t seed, int threads = 1) {
    if (reps < 1) throw ConfigError("mc_risk: reps must be >= 1");
    double total = 0.0;
    for (int r = 0; r < reps; ++r) {
        const auto paths = simulate_intervention(
            spec, tm, iv, n, child_seed(seed, static_cast<std::uint64_t>(r)), threads);
        total += empirical_risk(paths);
    }
    RiskEstimate est;
    est.risk = total / reps;
    est.horizon = kPeriods;
    est.method = "mc:" + iv.label();
    est.n = n;
    est.reps = reps;
    return est;
}

/// Analytic risk for a deterministic exposure path (start at a fixed
/// period, or never): sum over C of P(C=c) * (1 - prod_t (1 - hazard_t)).
inline double closed_form_risk(const ScenarioSpec& spec, double p_c1,
                               std::optional<int> start_period) {
    if (!(p_c1 >= 0.0 && p_c1 <= 1.0)) {
        throw ConfigError("closed_form_risk: p_c1 outside [0,1]");
    }
    if (start_period && (*start_period < 0 || *start_period >= kPeriods)) {
        throw ConfigError("closed_form_risk: start period must be in [0," +
                          std::to_string(kPeriods - 1) + "] or absent");
    }
    validate_scenario(spec);
    const int start = start_period ? *start_period : -1;
    double risk = 0.0;
    for (int c = 0; c <= 1; ++c) {
        double survival = 1.0;
        for (int t = 0; t < kPeriods; ++t) {
            survival *= 1.0 - hazard(spec, c, exposure_state_at(t, start));
        }
        risk += (c == 1 ? p_c1 : 1.0 - p_c1) * (1.0 - survival);
    }
    return risk;
}

} // namespace ccw

#endif // CCW_SIMULATE_HPP
