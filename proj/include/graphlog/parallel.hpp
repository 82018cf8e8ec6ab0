#pragma once

// Optional data parallelism. Work items write to disjoint output slots and
// all reductions happen sequentially afterwards, so results are identical
// for any thread count. GRAPHLOG_THREADS caps the pool (default: hardware).

#include <algorithm>
#include <cstdlib>
#include <string>
#include <thread>
#include <vector>

namespace graphlog {

inline unsigned max_threads() {
    static const unsigned cached = [] {
        unsigned hw = std::thread::hardware_concurrency();
        if (hw == 0) hw = 1;
        if (const char* env = std::getenv("GRAPHLOG_THREADS")) {
            const long v = std::strtol(env, nullptr, 10);
            if (v >= 1) hw = std::min<long>(v, 256);
        }
        return hw;
    }();
    return cached;
}

// Calls fn(i) for i in [0, n). Splits into contiguous chunks when the total
// work is large enough to amortize thread startup.
template <class Fn>
void parallel_for(std::size_t n, Fn&& fn, std::size_t min_per_thread = 16384) {
    const unsigned threads =
        std::min<std::size_t>(max_threads(), n / std::max<std::size_t>(min_per_thread, 1));
    if (threads <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(threads);
    const std::size_t chunk = (n + threads - 1) / threads;
    for (unsigned t = 0; t < threads; ++t) {
        const std::size_t lo = t * chunk;
        const std::size_t hi = std::min(n, lo + chunk);
        if (lo >= hi) break;
        pool.emplace_back([lo, hi, &fn] {
            for (std::size_t i = lo; i < hi; ++i) fn(i);
        });
    }
    for (auto& th : pool) th.join();
}

}  // namespace graphlog
