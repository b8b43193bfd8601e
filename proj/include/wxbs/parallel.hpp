#pragma once

#include <cstdlib>
#include <functional>
#include <thread>
#include <vector>

namespace wxbs {

inline int defaultThreadCount() {
    if (const char* env = std::getenv("WXBS_THREADS")) {
        const int n = std::atoi(env);
        if (n > 0) return n;
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? static_cast<int>(hw) : 1;
}

// Index-partitioned parallel loop. Each index is processed exactly once and
// writes only to its own slot, so results do not depend on the thread count.
inline void parallelFor(int n, int threads, const std::function<void(int)>& fn) {
    if (threads <= 0) threads = defaultThreadCount();
    threads = std::min(threads, n);
    if (threads <= 1) {
        for (int i = 0; i < n; ++i) fn(i);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (int t = 0; t < threads; ++t) {
        pool.emplace_back([&, t]() {
            for (int i = t; i < n; i += threads) fn(i);
        });
    }
    for (std::thread& th : pool) th.join();
}

}  // namespace wxbs
