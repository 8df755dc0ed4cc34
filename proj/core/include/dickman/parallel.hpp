// SPDX-License-Identifier: MIT
#pragma once

#include <algorithm>
#include <cstddef>
#include <thread>
#include <vector>

namespace dickman {

// Splits [begin, end) into contiguous chunks, one per worker. Work items
// must be independent; with counter-based streams the chunking never
// changes any drawn value, only who draws it.
template <typename Fn>
void parallel_for(std::size_t begin, std::size_t end, int threads, Fn fn) {
    const std::size_t count = end > begin ? end - begin : 0;
    if (count == 0) return;
    int workers = std::max(1, threads);
    workers = static_cast<int>(
        std::min<std::size_t>(static_cast<std::size_t>(workers), count));
    if (workers == 1) {
        fn(begin, end);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    const std::size_t chunk = (count + workers - 1) / workers;
    for (int w = 0; w < workers; ++w) {
        const std::size_t lo = begin + chunk * static_cast<std::size_t>(w);
        if (lo >= end) break;
        const std::size_t hi = std::min(end, lo + chunk);
        pool.emplace_back([fn, lo, hi] { fn(lo, hi); });
    }
    for (auto& t : pool) t.join();
}

inline int default_threads() {
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

}  // namespace dickman
