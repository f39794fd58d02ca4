#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace fusedrf {

/// Worker count to use for a request: values <= 0 mean "all hardware threads".
inline int resolve_workers(int requested) {
    if (requested > 0) {
        return requested;
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

/**
 * Runs body(i) for i in [0, count) on up to `workers` threads. Items are handed out
 * dynamically, so body must only write state owned by item i. The first exception
 * thrown by any item is rethrown on the calling thread.
 */
template <typename Body>
void parallel_for(std::size_t count, int workers, Body&& body) {
    const auto width = static_cast<std::size_t>(resolve_workers(workers));
    if (width <= 1 || count <= 1) {
        for (std::size_t i = 0; i < count; ++i) {
            body(i);
        }
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto run = [&] {
        for (std::size_t i = next.fetch_add(1); i < count; i = next.fetch_add(1)) {
            try {
                body(i);
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!error) {
                    error = std::current_exception();
                }
                next.store(count);
            }
        }
    };
    {
        std::vector<std::jthread> pool;
        const std::size_t spawned = std::min(width, count) - 1;
        pool.reserve(spawned);
        for (std::size_t t = 0; t < spawned; ++t) {
            pool.emplace_back(run);
        }
        run();
    }
    if (error) {
        std::rethrow_exception(error);
    }
}

}  // namespace fusedrf
