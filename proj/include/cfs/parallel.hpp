#pragma once

#include <cstddef>
#include <functional>
#include <thread>
#include <vector>

namespace cfs {

/// Number of workers used by parallel sweeps. 0 = hardware concurrency.
inline int& worker_count() {
    static int n = 0;
    return n;
}

inline int effective_workers() {
    int n = worker_count();
    if (n <= 0) n = static_cast<int>(std::thread::hardware_concurrency());
    if (n <= 0) n = 1;
    return n;
}

/// Chunked parallel reduction with a fixed chunk layout and an ordered
/// combine, so the result is bit-stable for a given worker count.
/// body(i) is evaluated for i in [0, n); partial sums are accumulated per
/// chunk in index order and combined in chunk order.
template <typename T, typename Body>
T parallel_sum(std::size_t n, const Body& body, T zero = T{}) {
    int workers = effective_workers();
    if (n == 0) return zero;
    const std::size_t chunk = 256;
    const std::size_t nchunks = (n + chunk - 1) / chunk;
    std::vector<T> partial(nchunks, zero);
    auto run_chunk = [&](std::size_t c) {
        T acc = zero;
        std::size_t lo = c * chunk, hi = std::min(n, lo + chunk);
        for (std::size_t i = lo; i < hi; ++i) acc += body(i);
        partial[c] = acc;
    };
    if (workers == 1 || nchunks == 1) {
        for (std::size_t c = 0; c < nchunks; ++c) run_chunk(c);
    } else {
        std::vector<std::thread> pool;
        std::size_t next = 0;
        std::vector<std::size_t> owner(nchunks);
        for (std::size_t c = 0; c < nchunks; ++c) owner[c] = c % workers;
        for (int w = 0; w < workers; ++w) {
            pool.emplace_back([&, w]() {
                for (std::size_t c = 0; c < nchunks; ++c)
                    if (owner[c] == static_cast<std::size_t>(w)) run_chunk(c);
            });
        }
        for (auto& t : pool) t.join();
        (void)next;
    }
    T total = zero;
    for (std::size_t c = 0; c < nchunks; ++c) total += partial[c];
    return total;
}

/// Plain parallel loop over [0, n) with static chunk assignment.
template <typename Body>
void parallel_for(std::size_t n, const Body& body) {
    int workers = effective_workers();
    if (n == 0) return;
    if (workers == 1) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&, w]() {
            for (std::size_t i = static_cast<std::size_t>(w); i < n;
                 i += static_cast<std::size_t>(workers))
                body(i);
        });
    }
    for (auto& t : pool) t.join();
}

} // namespace cfs
