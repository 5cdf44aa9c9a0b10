#pragma once

// Deterministic parallel-for over an index range: contiguous static chunks,
// one thread per chunk.  Results must be written to disjoint indexed slots;
// the first thrown exception (lowest starting index) is rethrown.

#include <exception>
#include <functional>
#include <thread>
#include <vector>

namespace heatcq {

[[nodiscard]] inline int resolve_workers(int requested) {
    if (requested > 0) return requested;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

inline void parallel_for(int n, int workers, const std::function<void(int)>& body) {
    if (n <= 0) return;
    const int nthreads = std::min(resolve_workers(workers), n);
    if (nthreads <= 1) {
        for (int i = 0; i < n; ++i) body(i);
        return;
    }
    std::vector<std::exception_ptr> errors(nthreads);
    std::vector<std::thread> pool;
    pool.reserve(nthreads);
    const int chunk = (n + nthreads - 1) / nthreads;
    for (int t = 0; t < nthreads; ++t) {
        const int lo = t * chunk;
        const int hi = std::min(n, lo + chunk);
        pool.emplace_back([&, t, lo, hi] {
            try {
                for (int i = lo; i < hi; ++i) body(i);
            } catch (...) {
                errors[t] = std::current_exception();
            }
        });
    }
    for (auto& th : pool) th.join();
    for (const auto& e : errors)
        if (e) std::rethrow_exception(e);
}

}  // namespace heatcq
