#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace zerotemp::detail {

/// results[i] = f(i) for i < n, evaluated on up to `threads` workers; order is by index.
template <class R, class F>
std::vector<R> parallel_map(std::size_t n, F f, std::size_t threads) {
    std::vector<R> results(n);
    if (threads <= 1 || n <= 1) {
        for (std::size_t i = 0; i < n; ++i) results[i] = f(i);
        return results;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_lock;
    auto worker = [&] {
        for (std::size_t i = next++; i < n; i = next++) {
            try {
                results[i] = f(i);
            } catch (...) {
                std::lock_guard<std::mutex> g(failure_lock);
                if (!failure) failure = std::current_exception();
            }
        }
    };
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < std::min(threads, n); ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
    return results;
}

}  // namespace zerotemp::detail
