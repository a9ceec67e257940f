#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace cumcop {

namespace detail {
inline std::atomic<unsigned>& thread_setting() {
    static std::atomic<unsigned> n{0};
    return n;
}

// Set on pool threads and on the caller while a loop runs; nested loops then
// run inline instead of spawning more threads.
inline bool& in_parallel_region() {
    thread_local bool flag = false;
    return flag;
}
}  // namespace detail

/// Caps the number of worker threads used by every parallel loop in the
/// library. 0 means "hardware concurrency". Results never depend on it.
inline void set_thread_count(unsigned n) { detail::thread_setting().store(n); }

inline unsigned thread_count() {
    unsigned n = detail::thread_setting().load();
    if (n == 0) n = std::max(1u, std::thread::hardware_concurrency());
    return n;
}

/// Runs body(i) for i in [0, n). Tasks are claimed dynamically, so `body` must
/// write only to slot i of any shared output; reductions are done afterwards by
/// the caller in index order. If tasks throw, the exception from the lowest
/// index is rethrown on the calling thread, matching the serial behaviour.
template <class Body>
void parallel_for(std::size_t n, Body&& body) {
    const unsigned workers = static_cast<unsigned>(std::min<std::size_t>(thread_count(), n));
    if (workers <= 1 || detail::in_parallel_region()) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    // Tasks above a failed index are skipped; lower ones still run so the
    // reported error is independent of scheduling.
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::size_t error_index = n;
    std::mutex error_mutex;
    auto run = [&] {
        const bool outer = detail::in_parallel_region();
        detail::in_parallel_region() = true;
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= n) break;
            {
                std::lock_guard lock(error_mutex);
                if (i > error_index) continue;
            }
            try {
                body(i);
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (i < error_index) {
                    error_index = i;
                    error = std::current_exception();
                }
            }
        }
        detail::in_parallel_region() = outer;
    };
    std::vector<std::thread> pool;
    pool.reserve(workers - 1);
    for (unsigned w = 1; w < workers; ++w) pool.emplace_back(run);
    run();
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
}

}  // namespace cumcop
