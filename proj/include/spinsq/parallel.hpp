// parallel.hpp - index-parallel loop whose results never depend on the
// thread count (each index writes its own slot)
#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace spinsq {

inline unsigned resolve_threads(unsigned requested) noexcept {
    if (requested > 0) return requested;
    return std::max(1u, std::thread::hardware_concurrency());
}

/// Calls f(i) for i in [0, n). After a throw, remaining indices are skipped
/// and the exception of the lowest failing index seen is rethrown.
template <class F>
void parallel_for(std::size_t n, unsigned threads, F&& f) {
    const unsigned t = std::min<std::size_t>(resolve_threads(threads), std::max<std::size_t>(n, 1));
    if (t <= 1) {
        for (std::size_t i = 0; i < n; ++i) f(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::atomic<bool> failed{false};
    std::mutex mu;
    std::size_t bad_index = n;
    std::exception_ptr bad;

    auto worker = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= n || failed.load(std::memory_order_relaxed)) return;
            try {
                f(i);
            } catch (...) {
                std::lock_guard lk(mu);
                if (i < bad_index) {
                    bad_index = i;
                    bad = std::current_exception();
                }
                failed = true;
            }
        }
    };
    std::vector<std::jthread> pool;
    pool.reserve(t);
    for (unsigned k = 0; k < t; ++k) pool.emplace_back(worker);
    pool.clear();
    if (bad) std::rethrow_exception(bad);
}

}  // namespace spinsq
