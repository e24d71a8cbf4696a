#pragma once

#include <atomic>
#include <cstddef>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace rqj {

// Fixed-tree pairwise reduction: halving passes combine (a0+a1), (a2+a3), ...
// so the association is independent of how the leaves were produced.
template <typename T>
T pairwise_reduce(std::vector<T> items) {
    if (items.empty()) return T{};
    while (items.size() > 1) {
        const size_t half = (items.size() + 1) / 2;
        for (size_t i = 0; i + 1 < items.size(); i += 2) items[i / 2] = items[i] + items[i + 1];
        if (items.size() % 2) items[half - 1] = items.back();
        items.resize(half);
    }
    return items[0];
}

// Runs job(i) for i in [0, n) on `workers` threads. Jobs are handed out by
// index; each job must be independent and write only to its own slots.
inline void parallel_for(size_t n, int workers, const std::function<void(size_t)>& job) {
    if (workers < 1) workers = 1;
    if (workers == 1 || n <= 1) {
        for (size_t i = 0; i < n; ++i) job(i);
        return;
    }
    std::atomic<size_t> next{0};
    std::vector<std::thread> pool;
    std::exception_ptr first_error;
    std::mutex err_mutex;
    const int n_threads = int(std::min<size_t>(size_t(workers), n));
    pool.reserve(n_threads);
    for (int w = 0; w < n_threads; ++w) {
        pool.emplace_back([&] {
            for (;;) {
                const size_t i = next.fetch_add(1);
                if (i >= n) return;
                try {
                    job(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(err_mutex);
                    if (!first_error) first_error = std::current_exception();
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    if (first_error) std::rethrow_exception(first_error);
}

}  // namespace rqj
