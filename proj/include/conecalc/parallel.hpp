#pragma once

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <thread>
#include <vector>

namespace conecalc {

// Internal parallelism is bounded by the CONECALC_THREADS environment
// variable (default: hardware concurrency). Reductions stay deterministic
// for any thread count: work splits into fixed-index chunks whose partial
// results are combined in chunk order.
inline int thread_budget() {
    static const int budget = [] {
        int hw = static_cast<int>(std::thread::hardware_concurrency());
        if (hw < 1) hw = 1;
        if (const char* env = std::getenv("CONECALC_THREADS")) {
            int req = std::atoi(env);
            if (req >= 1) return std::min(req, hw);
        }
        return hw;
    }();
    return budget;
}

// Apply fn(chunk_index) for chunk_index in [0, chunks); chunk work must be
// independent. Results the caller stores per chunk can then be folded in
// index order for a deterministic reduction.
template <class Fn>
void parallel_chunks(int chunks, Fn&& fn) {
    const int threads = std::min(thread_budget(), chunks);
    if (threads <= 1) {
        for (int c = 0; c < chunks; ++c) fn(c);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(threads);
    std::atomic<int> next{0};
    for (int t = 0; t < threads; ++t) {
        pool.emplace_back([&] {
            for (int c = next.fetch_add(1); c < chunks; c = next.fetch_add(1)) fn(c);
        });
    }
    for (auto& th : pool) th.join();
}

}  // namespace conecalc
