#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdlib>
#include <functional>
#include <thread>
#include <vector>

namespace fdal {

/// Worker count: FDAL_THREADS if set, else hardware concurrency.
inline unsigned worker_count()
{
    if (const char* env = std::getenv("FDAL_THREADS")) {
        const int n = std::atoi(env);
        if (n > 0) return static_cast<unsigned>(n);
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

/// Fixed chunk size used by the reductions below. Chunk boundaries never
/// depend on the worker count, and partial results are combined in chunk
/// order, so sums are bitwise reproducible.
inline constexpr std::size_t reduction_chunk = 4096;

/// Calls body(begin, end, chunk_index) for every chunk of [0, n).
inline void parallel_chunks(std::size_t n,
                            const std::function<void(std::size_t, std::size_t, std::size_t)>& body,
                            unsigned workers = worker_count())
{
    const std::size_t chunks = (n + reduction_chunk - 1) / reduction_chunk;
    if (chunks == 0) return;
    workers = static_cast<unsigned>(std::min<std::size_t>(workers, chunks));
    auto run = [&](unsigned w) {
        for (std::size_t c = w; c < chunks; c += workers)
            body(c * reduction_chunk, std::min(n, (c + 1) * reduction_chunk), c);
    };
    if (workers <= 1) {
        run(0);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(run, w);
    for (auto& th : pool) th.join();
}

/// Deterministic reduction of `acc(partial, i)` over [0, n).
template <class T, class Acc, class Combine>
T parallel_reduce(std::size_t n, const T& zero, Acc acc, Combine combine,
                  unsigned workers = worker_count())
{
    const std::size_t chunks = (n + reduction_chunk - 1) / reduction_chunk;
    std::vector<T> partial(chunks, zero);
    parallel_chunks(
        n,
        [&](std::size_t b, std::size_t e, std::size_t c) {
            T local = zero;
            for (std::size_t i = b; i < e; ++i) acc(local, i);
            partial[c] = std::move(local);
        },
        workers);
    T total = zero;
    for (auto& p : partial) combine(total, p);
    return total;
}

} // namespace fdal
