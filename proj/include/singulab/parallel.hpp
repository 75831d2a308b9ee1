#pragma once

#include <atomic>
#include <cstdlib>
#include <functional>
#include <thread>
#include <vector>

namespace singulab {

// Worker cap: SINGULAB_THREADS, else hardware concurrency.
inline unsigned thread_cap() {
    if (const char* env = std::getenv("SINGULAB_THREADS")) {
        long v = std::atol(env);
        if (v >= 1) return static_cast<unsigned>(v);
    }
    unsigned hw = std::thread::hardware_concurrency();
    return hw ? hw : 1;
}

// Order-independent parallel loop; results must be written to preallocated
// slots so the reduction stays deterministic.
inline void parallel_for(size_t count, const std::function<void(size_t)>& fn) {
    unsigned workers = std::min<size_t>(thread_cap(), count);
    if (workers <= 1) {
        for (size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w)
        pool.emplace_back([&]() {
            while (true) {
                size_t i = next.fetch_add(1);
                if (i >= count) return;
                fn(i);
            }
        });
    for (auto& t : pool) t.join();
}

}  // namespace singulab
