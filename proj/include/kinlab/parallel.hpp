#pragma once

#include <exception>
#include <functional>
#include <thread>
#include <vector>

namespace kinlab {

/// Run body(i0, i1) over a static contiguous partition of [0, n) into at most
/// `workers` chunks. Callers write to disjoint per-index slots and reduce
/// serially afterwards, so results do not depend on the worker count. An
/// exception from any chunk is rethrown (lowest chunk first).
inline void parallel_chunks(long n, int workers, const std::function<void(long, long)>& body) {
    if (n <= 0) return;
    if (workers < 1) workers = 1;
    const long chunks = std::min<long>(workers, n);
    if (chunks == 1) {
        body(0, n);
        return;
    }
    std::vector<std::exception_ptr> errs(chunks);
    std::vector<std::thread> pool;
    pool.reserve(chunks);
    for (long c = 0; c < chunks; ++c) {
        const long i0 = n * c / chunks;
        const long i1 = n * (c + 1) / chunks;
        pool.emplace_back([&body, &errs, c, i0, i1] {
            try {
                body(i0, i1);
            } catch (...) {
                errs[c] = std::current_exception();
            }
        });
    }
    for (auto& t : pool) t.join();
    for (const auto& e : errs)
        if (e) std::rethrow_exception(e);
}

}  // namespace kinlab
