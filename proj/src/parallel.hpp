#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace simclust::detail {

/// Runs fn(i) for i in [0, n), interleaving indices over up to `threads`
/// workers. Each index is handled by exactly one worker, so results written
/// to per-index slots do not depend on the thread count. The first exception
/// thrown by any worker is rethrown on the calling thread.
template <typename Fn>
void parallel_for(std::size_t n, unsigned threads, Fn&& fn) {
    const std::size_t workers = std::min<std::size_t>(std::max(threads, 1u), n);
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) {
            fn(i);
        }
        return;
    }

    std::exception_ptr failure;
    std::mutex failure_mutex;
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            try {
                for (std::size_t i = w; i < n; i += workers) {
                    fn(i);
                }
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) {
                    failure = std::current_exception();
                }
            }
        });
    }
    pool.clear();
    if (failure) {
        std::rethrow_exception(failure);
    }
}

}  // namespace simclust::detail
