#pragma once

#include <algorithm>
#include <functional>
#include <thread>
#include <vector>

namespace paradiag {

/// Runs fn(i) for i in [0, n) on up to n_threads workers in contiguous
/// chunks. Each index must write only to its own output slot so results
/// are identical for any thread count or execution order.
inline void parallel_for(int n, int n_threads,
                         const std::function<void(int)>& fn) {
    if (n <= 0) return;
    n_threads = std::max(1, std::min(n_threads, n));
    if (n_threads == 1) {
        for (int i = 0; i < n; ++i) fn(i);
        return;
    }
    std::vector<std::thread> workers;
    workers.reserve(static_cast<std::size_t>(n_threads));
    const int chunk = (n + n_threads - 1) / n_threads;
    for (int t = 0; t < n_threads; ++t) {
        const int lo = t * chunk;
        const int hi = std::min(n, lo + chunk);
        if (lo >= hi) break;
        workers.emplace_back([lo, hi, &fn] {
            for (int i = lo; i < hi; ++i) fn(i);
        });
    }
    for (auto& w : workers) w.join();
}

}  // namespace paradiag
