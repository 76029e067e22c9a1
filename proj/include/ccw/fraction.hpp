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
#ifndef CCW_FRACTION_HPP
#define CCW_FRACTION_HPP

#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>

namespace ccw {

/// Thrown when an exact rational result no longer fits 64-bit storage.
/// Estimators catch this internally and fall back to double arithmetic;
/// it never escapes the public API.
class FractionOverflow : public std::overflow_error {
public:
    using std::overflow_error::overflow_error;
};

namespace detail {

using int128 = __int128;

inline int128 abs128(int128 v) { return v < 0 ? -v : v; }

inline int128 gcd128(int128 a, int128 b) {
    a = abs128(a);
    b = abs128(b);
    while (b != 0) {
        const int128 r = a % b;
        a = b;
        b = r;
    }
    return a;
}

inline std::int64_t narrow64(int128 v) {
    if (v > std::numeric_limits<std::int64_t>::max() ||
        v < std::numeric_limits<std::int64_t>::min()) {
        throw FractionOverflow("exact rational arithmetic exceeded 64-bit range");
    }
    return static_cast<std::int64_t>(v);
}

} // namespace detail

/// Exact rational number, normalized so den >= 1 and gcd(|num|, den) = 1.
/// Nonparametric censoring weights are ratios of small counts; carrying
/// them exactly lets the two risk estimators agree bit for bit.
struct Fraction {
    std::int64_t num = 0;
    std::int64_t den = 1;

    Fraction() = default;

    Fraction(std::int64_t n, std::int64_t d) { *this = make(n, d); }

    // NOLINTNEXTLINE(google-explicit-constructor): integers embed exactly.
    Fraction(std::int64_t n) : num(n), den(1) {}

    static Fraction make(detail::int128 n, detail::int128 d) {
        if (d == 0) throw std::invalid_argument("Fraction: zero denominator");
        if (d < 0) {
            n = -n;
            d = -d;
        }
        const detail::int128 g = detail::gcd128(n, d);
        Fraction f;
        if (g == 0) {
            f.num = 0;
            f.den = 1;
            return f;
        }
        f.num = detail::narrow64(n / g);
        f.den = detail::narrow64(d / g);
        return f;
    }

    double value() const {
        return static_cast<double>(num) / static_cast<double>(den);
    }

    bool is_zero() const { return num == 0; }

    friend Fraction operator+(const Fraction& a, const Fraction& b) {
        using detail::int128;
        return make(int128(a.num) * b.den + int128(b.num) * a.den,
                    int128(a.den) * b.den);
    }

    friend Fraction operator-(const Fraction& a, const Fraction& b) {
        using detail::int128;
        return make(int128(a.num) * b.den - int128(b.num) * a.den,
                    int128(a.den) * b.den);
    }

    friend Fraction operator*(const Fraction& a, const Fraction& b) {
        using detail::int128;
        return make(int128(a.num) * b.num, int128(a.den) * b.den);
    }

    friend Fraction operator/(const Fraction& a, const Fraction& b) {
        if (b.num == 0) throw std::invalid_argument("Fraction: division by zero");
        using detail::int128;
        return make(int128(a.num) * b.den, int128(a.den) * b.num);
    }

    Fraction& operator+=(const Fraction& other) { return *this = *this + other; }
    Fraction& operator-=(const Fraction& other) { return *this = *this - other; }

    friend bool operator==(const Fraction& a, const Fraction& b) {
        return a.num == b.num && a.den == b.den;
    }
    friend bool operator!=(const Fraction& a, const Fraction& b) { return !(a == b); }

    friend bool operator<(const Fraction& a, const Fraction& b) {
        using detail::int128;
        return int128(a.num) * b.den < int128(b.num) * a.den;
    }
    friend bool operator>(const Fraction& a, const Fraction& b) { return b < a; }
    friend bool operator<=(const Fraction& a, const Fraction& b) { return !(b < a); }
    friend bool operator>=(const Fraction& a, const Fraction& b) { return !(a < b); }
};

inline std::string to_string(const Fraction& f) {
    if (f.den == 1) return std::to_string(f.num);
    return std::to_string(f.num) + "/" + std::to_string(f.den);
}

} // namespace ccw

#endif // CCW_FRACTION_HPP
