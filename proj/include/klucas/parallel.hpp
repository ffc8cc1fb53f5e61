#pragma once

// Minimal work pool for embarrassingly parallel sweeps. Jobs own their state;
// the pool only hands out indices, so results are collected positionally and
// runs are deterministic regardless of scheduling.

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace klucas {

inline int default_worker_count() {
    if (const char* env = std::getenv("KLUCAS_WORKERS")) {
        int v = std::atoi(env);
        if (v > 0) return v;
    }
    unsigned hc = std::thread::hardware_concurrency();
    return hc > 0 ? static_cast<int>(hc) : 1;
}

// Runs body(i) for every i in [begin, end) on up to `workers` threads. The
// first exception wins; remaining indices are drained and it is rethrown on
// the calling thread.
template <typename Body>
void parallel_for(long begin, long end, int workers, Body&& body) {
    if (end <= begin) return;
    const long count = end - begin;
    const int n = static_cast<int>(std::min<long>(std::max(workers, 1), count));
    if (n == 1) {
        for (long i = begin; i < end; ++i) body(i);
        return;
    }
    std::atomic<long> next{begin};
    std::exception_ptr first_error;
    std::mutex error_mutex;
    auto run = [&] {
        while (true) {
            long i = next.fetch_add(1, std::memory_order_relaxed);
            if (i >= end) return;
            try {
                body(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!first_error) first_error = std::current_exception();
                next.store(end, std::memory_order_relaxed);  // drain
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(n));
    for (int t = 0; t < n; ++t) pool.emplace_back(run);
    for (std::thread& t : pool) t.join();
    if (first_error) std::rethrow_exception(first_error);
}

}  // namespace klucas
