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
#ifndef CCW_PARALLEL_HPP
#define CCW_PARALLEL_HPP

#include <cstdint>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace ccw {

/// Effective worker count: `requested` if positive, else hardware concurrency.
inline int resolve_threads(int requested) {
    if (requested > 0) return requested;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

/// Runs body(begin, end) over a partition of [0, n) on `threads` workers.
/// Workers own disjoint index ranges; results written by index stay
/// identical for any worker count. The first worker exception is rethrown
/// on the calling thread after all workers join.
template <typename Body>
void parallel_for(std::int64_t n, int threads, Body&& body) {
    threads = resolve_threads(threads);
    if (n <= 0) return;
    if (threads <= 1 || n < 2048) {
        body(static_cast<std::int64_t>(0), n);
        return;
    }
    const std::int64_t chunk = (n + threads - 1) / threads;
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(threads));
    std::exception_ptr failure;
    std::mutex failure_mutex;
    for (std::int64_t begin = 0; begin < n; begin += chunk) {
        const std::int64_t end = begin + chunk < n ? begin + chunk : n;
        pool.emplace_back([&body, &failure, &failure_mutex, begin, end] {
            try {
                body(begin, end);
            } catch (...) {
                const std::lock_guard<std::mutex> lock(failure_mutex);
                if (!failure) failure = std::current_exception();
            }
        });
    }
    for (auto& worker : pool) worker.join();
    if (failure) std::rethrow_exception(failure);
}

} // namespace ccw

#endif // CCW_PARALLEL_HPP
