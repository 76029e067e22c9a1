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
#ifndef CCW_KEYVAL_HPP
#define CCW_KEYVAL_HPP

#include <charconv>
#include <istream>
#include <map>
#include <string>
#include <string_view>

#include "ccw/errors.hpp"

namespace ccw {

inline std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

/// Reads `key = value` lines; blank lines and '#' comments are skipped.
/// Later occurrences of a key override earlier ones.
inline std::map<std::string, std::string> read_key_values(std::istream& in) {
    std::map<std::string, std::string> out;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::string_view view = trim(line);
        if (view.empty() || view.front() == '#') continue;
        const auto eq = view.find('=');
        if (eq == std::string_view::npos) {
            throw ConfigError("line " + std::to_string(lineno) +
                              ": expected key=value, got '" + std::string(view) + "'");
        }
        const std::string key(trim(view.substr(0, eq)));
        const std::string value(trim(view.substr(eq + 1)));
        if (key.empty()) {
            throw ConfigError("line " + std::to_string(lineno) + ": empty key");
        }
        out[key] = value;
    }
    return out;
}

inline double parse_double(const std::string& key, const std::string& value) {
    const std::string_view v = value;
    double parsed = 0.0;
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), parsed);
    if (ec != std::errc{} || ptr != v.data() + v.size()) {
        throw ConfigError("key '" + key + "': not a number: '" + value + "'");
    }
    return parsed;
}

inline long long parse_int(const std::string& key, const std::string& value) {
    const std::string_view v = value;
    long long parsed = 0;
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), parsed);
    if (ec != std::errc{} || ptr != v.data() + v.size()) {
        throw ConfigError("key '" + key + "': not an integer: '" + value + "'");
    }
    return parsed;
}

} // namespace ccw

#endif // CCW_KEYVAL_HPP
