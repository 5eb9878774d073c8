/*
 * gazekit - eye region model fitting and gaze redirection in modern C++.
 *
 * File: include/gazekit/core/parallel.hpp
 *
 * Copyright 2026 The gazekit authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
#pragma once

#ifndef GAZEKIT_CORE_PARALLEL_HPP
#define GAZEKIT_CORE_PARALLEL_HPP

#include <algorithm>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace gazekit {
namespace core {

/// Worker count: GAZEKIT_THREADS env var if set, else hardware concurrency.
inline int thread_count()
{
    if (const char* env = std::getenv("GAZEKIT_THREADS"))
    {
        const int n = std::atoi(env);
        if (n >= 1)
            return n;
    }
    const unsigned hc = std::thread::hardware_concurrency();
    return hc == 0 ? 1 : static_cast<int>(hc);
}

/**
 * @brief Runs f(i) for i in [begin, end) across up to `threads` workers.
 *
 * Work is split into contiguous static chunks, so each index is processed
 * exactly once and results written per-index are deterministic. Exceptions
 * from workers are captured and the first one rethrown on the caller.
 */
template <typename Func>
inline void parallel_for(int begin, int end, Func&& f, int threads = thread_count())
{
    const int n = end - begin;
    if (n <= 0)
        return;
    threads = std::clamp(threads, 1, n);
    if (threads == 1)
    {
        for (int i = begin; i < end; ++i)
            f(i);
        return;
    }

    std::exception_ptr first_error;
    std::mutex error_mutex;
    std::vector<std::thread> workers;
    workers.reserve(threads);
    const int chunk = (n + threads - 1) / threads;
    for (int t = 0; t < threads; ++t)
    {
        const int lo = begin + t * chunk;
        const int hi = std::min(lo + chunk, end);
        if (lo >= hi)
            break;
        workers.emplace_back([&, lo, hi]() {
            try
            {
                for (int i = lo; i < hi; ++i)
                    f(i);
            } catch (...)
            {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!first_error)
                    first_error = std::current_exception();
            }
        });
    }
    for (auto& w : workers)
        w.join();
    if (first_error)
        std::rethrow_exception(first_error);
}

} // namespace core
} // namespace gazekit

#endif /* GAZEKIT_CORE_PARALLEL_HPP */
