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
#ifndef CCW_ERRORS_HPP
#define CCW_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace ccw {

/// Invalid model/run configuration: coefficients out of range, bad
/// distribution parameters, hazards falling outside [0,1], and the like.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// Malformed or inconsistent input data (CSV schema violations,
/// non-persistent exposure, duplicate records, ...).
class DataError : public std::runtime_error {
public:
    explicit DataError(const std::string& what) : std::runtime_error(what) {}
};

/// A covariate stratum required for weight estimation has zero probability
/// of remaining uncensored, so no one can stand in for the censored.
class PositivityError : public std::runtime_error {
public:
    explicit PositivityError(const std::string& what) : std::runtime_error(what) {}
};

/// The impossible-intervention history draw has no donors in a stratum.
class DegenerateStratumError : public std::runtime_error {
public:
    explicit DegenerateStratumError(const std::string& what) : std::runtime_error(what) {}
};

/// The weighted risk set emptied out while events remained in follow-up.
class EstimationError : public std::runtime_error {
public:
    explicit EstimationError(const std::string& what) : std::runtime_error(what) {}
};

/// A file or stream could not be opened or written.
class IoError : public std::runtime_error {
public:
    explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace ccw

#endif // CCW_ERRORS_HPP
