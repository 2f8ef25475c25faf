#pragma once

#include <atomic>
#include <cstddef>
#include <cstdlib>
#include <exception>
#include <functional>
#include <thread>
#include <vector>

namespace homogbl {

// Maximum worker count: HOMOGBL_THREADS if set (clamped to >= 1), otherwise
// the hardware concurrency.  Parallelism never changes numerical results:
// tasks write disjoint outputs and every reduction happens in fixed order.
inline int max_threads() {
    if (const char* env = std::getenv("HOMOGBL_THREADS")) {
        int v = std::atoi(env);
        if (v >= 1) return v;
        return 1;
    }
    unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? static_cast<int>(hw) : 1;
}

// Run fn(0..count-1), possibly on worker threads.  Each index is claimed by
// exactly one worker; exceptions are captured and the first one rethrown on
// the calling thread.
inline void run_tasks(std::size_t count, const std::function<void(std::size_t)>& fn) {
    if (count == 0) return;
    std::size_t workers = static_cast<std::size_t>(max_threads());
    if (workers > count) workers = count;
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr first_error;
    std::atomic<bool> failed{false};
    auto body = [&]() {
        for (;;) {
            std::size_t i = next.fetch_add(1);
            if (i >= count) return;
            try {
                fn(i);
            } catch (...) {
                bool expected = false;
                if (failed.compare_exchange_strong(expected, true))
                    first_error = std::current_exception();
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(body);
    for (auto& t : pool) t.join();
    if (failed.load() && first_error) std::rethrow_exception(first_error);
}

} // namespace homogbl
