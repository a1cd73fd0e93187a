#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <thread>
#include <vector>

namespace nqs {

namespace detail {
inline std::atomic<unsigned>& thread_setting() {
    static std::atomic<unsigned> n{1};
    return n;
}
}  // namespace detail

/// Worker count used by the map-reduce helpers. 0 selects hardware concurrency.
inline void set_thread_count(unsigned n) {
    if (n == 0) n = std::max(1u, std::thread::hardware_concurrency());
    detail::thread_setting() = n;
}

inline unsigned thread_count() { return detail::thread_setting(); }

/// Deterministic chunked map-reduce over [0, n).
///
/// The index range is split into a fixed number of chunks that depends only on
/// `n` and `chunk`, never on the worker count. Each chunk is reduced
/// sequentially, then the per-chunk partials are combined left to right, so
/// the result is bit-identical for any thread count.
template <class T, class MapChunk, class Combine>
T parallel_reduce(std::size_t n, std::size_t chunk, T init, MapChunk&& map_chunk,
                  Combine&& combine) {
    if (n == 0) return init;
    chunk = std::max<std::size_t>(chunk, 1);
    const std::size_t n_chunks = (n + chunk - 1) / chunk;
    std::vector<T> partial(n_chunks, init);
    auto run = [&](std::size_t c) {
        const std::size_t lo = c * chunk;
        const std::size_t hi = std::min(n, lo + chunk);
        partial[c] = map_chunk(lo, hi);
    };
    const unsigned workers = std::min<std::size_t>(thread_count(), n_chunks);
    if (workers <= 1) {
        for (std::size_t c = 0; c < n_chunks; ++c) run(c);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (unsigned w = 0; w < workers; ++w) {
            pool.emplace_back([&] {
                for (std::size_t c = next++; c < n_chunks; c = next++) run(c);
            });
        }
        for (auto& t : pool) t.join();
    }
    T acc = init;
    for (auto& p : partial) acc = combine(acc, p);
    return acc;
}

/// Parallel loop over [0, n) in fixed chunks; `body(lo, hi)` must only write
/// to disjoint outputs.
template <class Body>
void parallel_for(std::size_t n, std::size_t chunk, Body&& body) {
    parallel_reduce<int>(
        n, chunk, 0,
        [&](std::size_t lo, std::size_t hi) {
            body(lo, hi);
            return 0;
        },
        [](int, int) { return 0; });
}

}  // namespace nqs
