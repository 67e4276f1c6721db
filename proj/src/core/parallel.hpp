#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace eventalpha {

inline int effective_workers(int configured) {
    if (configured > 0) return std::min(configured, 64);
    unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(std::min(hw, 16u));
}

// Runs fn(i) for i in [0, n), split into contiguous per-worker chunks.
// Callers must write results into index-addressed slots; assembled output
// is then independent of the worker count.
template <class Fn>
void parallel_for(std::size_t n, int workers, Fn&& fn) {
    if (n == 0) return;
    int w = std::max(1, workers);
    if (w == 1 || n == 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::size_t nw = std::min<std::size_t>(static_cast<std::size_t>(w), n);
    std::vector<std::exception_ptr> errs(nw);
    std::vector<std::thread> threads;
    threads.reserve(nw);
    for (std::size_t t = 0; t < nw; ++t) {
        threads.emplace_back([&, t] {
            std::size_t lo = n * t / nw;
            std::size_t hi = n * (t + 1) / nw;
            try {
                for (std::size_t i = lo; i < hi; ++i) fn(i);
            } catch (...) {
                errs[t] = std::current_exception();
            }
        });
    }
    for (auto& th : threads) th.join();
    for (auto& e : errs)
        if (e) std::rethrow_exception(e);
}

} // namespace eventalpha
