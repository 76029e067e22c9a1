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
#ifndef CCW_CURVES_HPP
#define CCW_CURVES_HPP

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <string>
#include <vector>

#include "ccw/errors.hpp"

namespace ccw {

/// Start-day distribution on [0, window_end) for people who initiate
/// naturally, plus the mass that never initiates without intervention.
struct StartDistribution {
    enum class Kind { uniform, normal, early, late, empirical };

    Kind kind = Kind::uniform;
    double never = 0.0;        ///< share never initiating naturally
    double mu = 0.0;           ///< normal only
    double sigma = 1.0;        ///< normal only
    double rate = 0.1;         ///< early/late only
    std::vector<double> days;  ///< empirical only

    static StartDistribution uniform(double never) {
        StartDistribution d;
        d.kind = Kind::uniform;
        d.never = never;
        return d;
    }
    static StartDistribution normal(double mu, double sigma, double never) {
        StartDistribution d;
        d.kind = Kind::normal;
        d.mu = mu;
        d.sigma = sigma;
        d.never = never;
        return d;
    }
    static StartDistribution early(double rate, double never) {
        StartDistribution d;
        d.kind = Kind::early;
        d.rate = rate;
        d.never = never;
        return d;
    }
    static StartDistribution late(double rate, double never) {
        StartDistribution d;
        d.kind = Kind::late;
        d.rate = rate;
        d.never = never;
        return d;
    }
    static StartDistribution empirical(std::vector<double> days, double never) {
        StartDistribution d;
        d.kind = Kind::empirical;
        d.days = std::move(days);
        d.never = never;
        return d;
    }

    std::string label() const {
        char buffer[64];
        switch (kind) {
            case Kind::uniform:
                return "uniform";
            case Kind::normal:
                std::snprintf(buffer, sizeof(buffer), "normal(%g,%g)", mu, sigma);
                return buffer;
            case Kind::early:
                std::snprintf(buffer, sizeof(buffer), "early(%g)", rate);
                return buffer;
            case Kind::late:
                std::snprintf(buffer, sizeof(buffer), "late(%g)", rate);
                return buffer;
            case Kind::empirical:
                std::snprintf(buffer, sizeof(buffer), "empirical(n=%zu)", days.size());
                return buffer;
        }
        return "unknown";
    }
};

/// Cumulative initiation proportion per day under the implied
/// "initiate by the window end" intervention: the natural cumulative
/// initiation function up to the window end, then a jump to exactly 1
/// when everyone remaining is made to start.
struct InitiationCurve {
    std::string label;
    struct Point {
        int day;
        double proportion;
    };
    std::vector<Point> points;
};

namespace detail {

inline double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

/// CDF of the start-day distribution restricted to [0, window_end).
inline double start_cdf(const StartDistribution& dist, double day, double window_end) {
    switch (dist.kind) {
        case StartDistribution::Kind::uniform:
            return day / window_end;
        case StartDistribution::Kind::normal: {
            const double lo = normal_cdf((0.0 - dist.mu) / dist.sigma);
            const double hi = normal_cdf((window_end - dist.mu) / dist.sigma);
            if (!(hi > lo)) {
                throw ConfigError("normal start distribution has no mass in [0," +
                                  std::to_string(window_end) + ")");
            }
            return (normal_cdf((day - dist.mu) / dist.sigma) - lo) / (hi - lo);
        }
        case StartDistribution::Kind::early:
            return (1.0 - std::exp(-dist.rate * day)) /
                   (1.0 - std::exp(-dist.rate * window_end));
        case StartDistribution::Kind::late:
            return (std::exp(dist.rate * day) - 1.0) /
                   (std::exp(dist.rate * window_end) - 1.0);
        case StartDistribution::Kind::empirical: {
            std::size_t count = 0;
            for (const double d : dist.days) {
                if (d <= day) ++count;
            }
            return static_cast<double>(count) / static_cast<double>(dist.days.size());
        }
    }
    throw ConfigError("unknown start distribution kind");
}

inline void validate_distribution(const StartDistribution& dist, int window_end) {
    if (!(dist.never >= 0.0 && dist.never <= 1.0)) {
        throw ConfigError("never-initiate share must be in [0,1], got " +
                          std::to_string(dist.never));
    }
    switch (dist.kind) {
        case StartDistribution::Kind::uniform:
            break;
        case StartDistribution::Kind::normal:
            if (!(dist.sigma > 0.0)) {
                throw ConfigError("normal start distribution needs sigma > 0");
            }
            break;
        case StartDistribution::Kind::early:
        case StartDistribution::Kind::late:
            if (!(dist.rate > 0.0)) {
                throw ConfigError("early/late start distribution needs rate > 0");
            }
            break;
        case StartDistribution::Kind::empirical:
            if (dist.days.empty()) {
                throw ConfigError("empirical start distribution needs at least one day");
            }
            for (const double d : dist.days) {
                if (!(d >= 0.0 && d < window_end)) {
                    throw ConfigError("empirical start day " + std::to_string(d) +
                                      " outside [0," + std::to_string(window_end) + ")");
                }
            }
            break;
    }
}

} // namespace detail

/// Samples the cumulative initiation proportion at `resolution`-day steps
/// from day 0 through the window end. The final point is pinned at
/// exactly 1: whoever has not initiated by then is made to start.
inline InitiationCurve initiation_curve(const StartDistribution& dist, int window_end,
                                        int resolution = 1) {
    if (window_end < 1) throw ConfigError("initiation_curve: window_end must be >= 1");
    if (resolution < 1) throw ConfigError("initiation_curve: resolution must be >= 1");
    detail::validate_distribution(dist, window_end);

    InitiationCurve curve;
    curve.label = dist.label();
    for (int day = 0; day < window_end; day += resolution) {
        const double natural =
            (1.0 - dist.never) * detail::start_cdf(dist, day, window_end);
        curve.points.push_back({day, natural});
    }
    curve.points.push_back({window_end, 1.0});
    return curve;
}

inline void write_curve_csv(const InitiationCurve& curve, std::ostream& out) {
    out << "day,proportion\n";
    char buffer[32];
    for (const auto& point : curve.points) {
        std::snprintf(buffer, sizeof(buffer), "%.10g", point.proportion);
        out << point.day << "," << buffer << "\n";
    }
}

inline void write_curve_csv(const InitiationCurve& curve, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    write_curve_csv(curve, out);
    if (!out) throw IoError("write failed for '" + path + "'");
}

} // namespace ccw

#endif // CCW_CURVES_HPP
