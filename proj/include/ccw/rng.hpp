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
#ifndef CCW_RNG_HPP
#define CCW_RNG_HPP

#include <cstdint>

namespace ccw {

// Splittable counter-based randomness (SplitMix64 family).
//
// All Monte Carlo draws in the simulator are addressed, not consumed from a
// sequential stream:
//
//   master seed --child_seed(r)--> cohort seed for replicate r
//   cohort seed + person index   --> per-person stream root
//   stream root + purpose slot   --> one uniform in [0,1)
//
// Purpose slots (for a follow-up of H periods):
//   slot 0        confounder draw (C = 1 iff u < p_c1)
//   slot 1 + 2t   treatment-initiation decision at period t
//   slot 2 + 2t   outcome-event decision at period t
//   slot 1 + 2H   pseudo-history draw (impossible intervention only)
//
// Because a draw is a pure function of (seed, replicate, person, slot), the
// simulation is bit-reproducible under any execution order or worker count,
// and the same person sees the same uniform for the same decision under
// every intervention kind (common random numbers across arms).

/// SplitMix64 finalizer; bijective 64-bit mix.
constexpr std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

inline constexpr std::uint64_t kGoldenGamma = 0x9E3779B97F4A7C15ULL;

/// Seed for replicate `index` of a run keyed by `master`.
constexpr std::uint64_t child_seed(std::uint64_t master, std::uint64_t index) {
    return mix64(master + kGoldenGamma * (index + 1));
}

/// Random-access uniform stream for one person within one cohort.
class PersonStream {
public:
    PersonStream(std::uint64_t cohort_seed, std::uint64_t person)
        : root_(mix64(mix64(cohort_seed + kGoldenGamma) ^
                      (person + 0xD1B54A32D192ED03ULL))) {}

    /// Uniform in [0,1) for a purpose slot; pure in (stream, slot).
    double uniform(int slot) const {
        const std::uint64_t bits =
            mix64(root_ + (static_cast<std::uint64_t>(slot) + 1) * kGoldenGamma);
        return static_cast<double>(bits >> 11) * 0x1.0p-53;
    }

    bool bernoulli(int slot, double p) const { return uniform(slot) < p; }

private:
    std::uint64_t root_;
};

inline constexpr int kSlotConfounder = 0;
constexpr int slot_initiation(int t) { return 1 + 2 * t; }
constexpr int slot_event(int t) { return 2 + 2 * t; }
constexpr int slot_pseudo_history(int horizon) { return 1 + 2 * horizon; }

} // namespace ccw

#endif // CCW_RNG_HPP
