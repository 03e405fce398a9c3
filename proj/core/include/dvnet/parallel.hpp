#pragma once

#include <cstdlib>
#include <functional>
#include <thread>
#include <vector>

namespace dvnet {

/// Worker cap: DVNET_THREADS when set (minimum 1), else the machine cores.
inline unsigned thread_cap() {
    if (const char* env = std::getenv("DVNET_THREADS")) {
        const long n = std::strtol(env, nullptr, 10);
        if (n >= 1) return static_cast<unsigned>(n);
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw ? hw : 1;
}

/// Static-chunked parallel loop. fn(i) must write only to slot i of any
/// shared output so results are identical for every thread count.
inline void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn) {
    const unsigned workers = std::min<std::size_t>(thread_cap(), n);
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            for (std::size_t i = w; i < n; i += workers) fn(i);
        });
    }
    for (auto& t : pool) t.join();
}

}  // namespace dvnet
