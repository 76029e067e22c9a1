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
#ifndef CCW_PERSON_PERIOD_HPP
#define CCW_PERSON_PERIOD_HPP

#include <charconv>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "ccw/cohort.hpp"
#include "ccw/engine.hpp"
#include "ccw/errors.hpp"
#include "ccw/keyval.hpp"

namespace ccw {

/// Person paths plus the covariate names that label their covariate slots.
struct Cohort {
    std::vector<std::string> covariate_names;
    std::vector<PersonPath> paths;
};

/// One row of the person-period CSV. Kept as parsed, with its source line
/// for diagnostics.
struct PersonPeriodRecord {
    std::int64_t person_id = 0;
    int period = 0;
    std::vector<int> covariates;
    int exposed = 0;
    int event = 0;
    int line = 0;
};

namespace detail {

inline std::vector<std::string_view> split_csv_line(std::string_view line) {
    std::vector<std::string_view> fields;
    std::size_t begin = 0;
    while (true) {
        const std::size_t comma = line.find(',', begin);
        if (comma == std::string_view::npos) {
            fields.push_back(line.substr(begin));
            break;
        }
        fields.push_back(line.substr(begin, comma - begin));
        begin = comma + 1;
    }
    return fields;
}

inline std::int64_t parse_csv_int(std::string_view field, int line, const char* what) {
    field = trim(field);
    std::int64_t value = 0;
    const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
    if (ec != std::errc{} || ptr != field.data() + field.size() || field.empty()) {
        throw DataError("line " + std::to_string(line) + ": " + what +
                        " is not an integer: '" + std::string(field) + "'");
    }
    return value;
}

inline int parse_csv_binary(std::string_view field, int line, const char* what) {
    const std::int64_t value = parse_csv_int(field, line, what);
    if (value != 0 && value != 1) {
        throw DataError("line " + std::to_string(line) + ": " + what +
                        " must be 0 or 1, got " + std::to_string(value));
    }
    return static_cast<int>(value);
}

/// Folds one person's validated period records into a PersonPath.
inline PersonPath fold_person(std::int64_t person_id,
                              const std::vector<PersonPeriodRecord>& records) {
    PersonPath path;
    path.id = person_id;
    path.covariates = records.front().covariates;
    for (const auto& rec : records) {
        if (rec.covariates != path.covariates) {
            throw DataError("line " + std::to_string(rec.line) +
                            ": covariates change within person " +
                            std::to_string(person_id) + " (baseline covariates "
                            "must be constant)");
        }
        if (rec.exposed == 1 && !path.start_time) path.start_time = rec.period;
        if (rec.exposed == 0 && path.start_time) {
            throw DataError("line " + std::to_string(rec.line) +
                            ": exposure switches 1 -> 0 for person " +
                            std::to_string(person_id) + " (exposure is persistent)");
        }
        if (rec.event == 1) {
            if (path.event_period) {
                throw DataError("line " + std::to_string(rec.line) + ": person " +
                                std::to_string(person_id) +
                                " has more than one event record");
            }
            path.event_period = rec.period;
        }
    }
    const auto& last = records.back();
    if (path.event_period) {
        if (*path.event_period != last.period) {
            throw DataError("line " + std::to_string(last.line) + ": person " +
                            std::to_string(person_id) +
                            " has records after the event period");
        }
    } else if (last.period != kPeriods - 1) {
        throw DataError("line " + std::to_string(last.line) + ": person " +
                        std::to_string(person_id) + " is event-free but stops at period " +
                        std::to_string(last.period) + " (expected " +
                        std::to_string(kPeriods - 1) + ")");
    }
    return path;
}

} // namespace detail

inline const char* const kCsvIdColumn = "person_id";
inline const char* const kCsvPeriodColumn = "period";
inline const char* const kCsvExposedColumn = "exposed";
inline const char* const kCsvEventColumn = "event";

/// Reads a person-period CSV. Header: person_id,period,<covariates>,exposed,event.
/// Each person's rows must appear in period order, contiguous from 0 until
/// the event or the horizon. Violations raise DataError with line numbers.
inline Cohort parse_cohort_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw DataError("empty file: missing header row");
    int lineno = 1;

    const auto header = detail::split_csv_line(line);
    if (header.size() < 4 || trim(header.front()) != kCsvIdColumn ||
        trim(header[1]) != kCsvPeriodColumn ||
        trim(header[header.size() - 2]) != kCsvExposedColumn ||
        trim(header.back()) != kCsvEventColumn) {
        throw DataError("line 1: header must be '" + std::string(kCsvIdColumn) + "," +
                        kCsvPeriodColumn + ",<covariates...>," + kCsvExposedColumn +
                        "," + kCsvEventColumn + "', got '" + line + "'");
    }
    Cohort cohort;
    for (std::size_t i = 2; i + 2 < header.size(); ++i) {
        cohort.covariate_names.emplace_back(trim(header[i]));
    }
    const std::size_t n_cov = cohort.covariate_names.size();

    std::map<std::int64_t, std::vector<PersonPeriodRecord>> by_person;
    std::vector<std::int64_t> person_order;

    while (std::getline(in, line)) {
        ++lineno;
        if (trim(line).empty()) continue;
        const auto fields = detail::split_csv_line(line);
        if (fields.size() != n_cov + 4) {
            throw DataError("line " + std::to_string(lineno) + ": expected " +
                            std::to_string(n_cov + 4) + " fields, got " +
                            std::to_string(fields.size()));
        }
        PersonPeriodRecord rec;
        rec.line = lineno;
        rec.person_id = detail::parse_csv_int(fields[0], lineno, kCsvIdColumn);
        rec.period =
            static_cast<int>(detail::parse_csv_int(fields[1], lineno, kCsvPeriodColumn));
        if (rec.period < 0 || rec.period >= kPeriods) {
            throw DataError("line " + std::to_string(lineno) + ": period " +
                            std::to_string(rec.period) + " outside [0," +
                            std::to_string(kPeriods - 1) + "]");
        }
        for (std::size_t i = 0; i < n_cov; ++i) {
            rec.covariates.push_back(static_cast<int>(detail::parse_csv_int(
                fields[2 + i], lineno, cohort.covariate_names[i].c_str())));
        }
        rec.exposed =
            detail::parse_csv_binary(fields[n_cov + 2], lineno, kCsvExposedColumn);
        rec.event = detail::parse_csv_binary(fields[n_cov + 3], lineno, kCsvEventColumn);

        auto [it, inserted] = by_person.try_emplace(rec.person_id);
        if (inserted) person_order.push_back(rec.person_id);
        const int expected = static_cast<int>(it->second.size());
        if (rec.period != expected) {
            throw DataError("line " + std::to_string(lineno) + ": person " +
                            std::to_string(rec.person_id) + " has period " +
                            std::to_string(rec.period) + " where " +
                            std::to_string(expected) +
                            " was expected (periods must be contiguous from 0, "
                            "one record per period)");
        }
        it->second.push_back(std::move(rec));
    }

    cohort.paths.reserve(person_order.size());
    for (const std::int64_t id : person_order) {
        cohort.paths.push_back(detail::fold_person(id, by_person.at(id)));
    }
    return cohort;
}

inline Cohort parse_cohort_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open '" + path + "' for reading");
    try {
        return parse_cohort_csv(in);
    } catch (const DataError& err) {
        throw DataError(path + ": " + err.what());
    }
}

/// Writes person paths in the person-period CSV format. An event-free
/// person spans every period; an event truncates the rows at its period.
inline void export_cohort_csv(const Cohort& cohort, std::ostream& out) {
    out << kCsvIdColumn << "," << kCsvPeriodColumn;
    for (const auto& name : cohort.covariate_names) out << "," << name;
    out << "," << kCsvExposedColumn << "," << kCsvEventColumn << "\n";
    for (const auto& path : cohort.paths) {
        const int last = path.event_period ? *path.event_period : kPeriods - 1;
        for (int t = 0; t <= last; ++t) {
            out << path.id << "," << t;
            for (const int value : path.covariates) out << "," << value;
            const int exposed = path.start_time && t >= *path.start_time ? 1 : 0;
            const int event = path.event_period && t == *path.event_period ? 1 : 0;
            out << "," << exposed << "," << event << "\n";
        }
    }
}

inline void export_cohort_csv(const Cohort& cohort, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    export_cohort_csv(cohort, out);
    if (!out) throw IoError("write failed for '" + path + "'");
}

namespace detail {

inline std::string format_weight(const Fraction& w) {
    char buffer[32];
    std::snprintf(buffer, sizeof(buffer), "%.10g", w.value());
    return buffer;
}

} // namespace detail

/// Per-clone weight trajectory for audit: one row per clone and period.
inline void write_weight_audit(const std::vector<CloneRecord>& clones,
                               std::ostream& out) {
    out << "person_id,period,at_risk,event,censored,weight\n";
    for (const auto& clone : clones) {
        for (int t = 0; t < kPeriods; ++t) {
            const int at_risk = clone_at_risk(clone, t) ? 1 : 0;
            const int event = clone.event_period && *clone.event_period == t ? 1 : 0;
            const int censored = clone.censor_period && *clone.censor_period == t ? 1 : 0;
            out << clone.person_id << "," << t << "," << at_risk << "," << event << ","
                << censored << ","
                << detail::format_weight(clone.weight[static_cast<std::size_t>(t)])
                << "\n";
        }
    }
}

inline void write_weight_audit(const std::vector<CloneRecord>& clones,
                               const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    write_weight_audit(clones, out);
    if (!out) throw IoError("write failed for '" + path + "'");
}

} // namespace ccw

#endif // CCW_PERSON_PERIOD_HPP
