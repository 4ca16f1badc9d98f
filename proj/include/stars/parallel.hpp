#pragma once

// Small deterministic work-splitting helpers. Work items are pure functions
// of their index; merges happen serially in index order, so any thread count
// produces identical results.

#include <cstdlib>
#include <string>
#include <thread>
#include <vector>

namespace stars {

// Precedence: explicit request, then STARS_THREADS, then the hardware.
inline unsigned resolve_threads(int requested = 0) {
    if (requested > 0) return static_cast<unsigned>(requested);
    if (const char* env = std::getenv("STARS_THREADS")) {
        const long v = std::atol(env);
        if (v > 0) return static_cast<unsigned>(v);
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? hw : 1;
}

// Runs work(i) -> T for i in [0, count), `threads` at a time, then hands
// results to merge(i, T&&) in ascending i. Memory stays bounded by one
// round of results.
template <typename T, typename Work, typename Merge>
void rounds(std::size_t count, unsigned threads, Work&& work, Merge&& merge) {
    if (threads <= 1) {
        for (std::size_t i = 0; i < count; ++i) merge(i, work(i));
        return;
    }
    for (std::size_t base = 0; base < count; base += threads) {
        const std::size_t batch = std::min<std::size_t>(threads, count - base);
        std::vector<T> results(batch);
        std::vector<std::thread> pool;
        pool.reserve(batch);
        for (std::size_t k = 0; k < batch; ++k)
            pool.emplace_back([&, k] { results[k] = work(base + k); });
        for (auto& t : pool) t.join();
        for (std::size_t k = 0; k < batch; ++k) merge(base + k, std::move(results[k]));
    }
}

// Block-partitioned loop for independent per-index writes.
template <typename Fn>
void parallel_blocks(std::size_t count, unsigned threads, Fn&& fn) {
    if (threads <= 1 || count < 2 * threads) {
        fn(std::size_t{0}, count);
        return;
    }
    std::vector<std::thread> pool;
    const std::size_t per = (count + threads - 1) / threads;
    for (unsigned t = 0; t < threads; ++t) {
        const std::size_t lo = t * per;
        if (lo >= count) break;
        const std::size_t hi = std::min(count, lo + per);
        pool.emplace_back([&fn, lo, hi] { fn(lo, hi); });
    }
    for (auto& t : pool) t.join();
}

}  // namespace stars
