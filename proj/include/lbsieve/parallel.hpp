#pragma once

#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace lbsieve {

// Global worker-thread cap. 0 = hardware concurrency. The CLI sets this from
// --threads / LBSIEVE_THREADS; results never depend on it (work is split into
// fixed blocks whose partial results are reduced in block order).
inline int& thread_cap() {
    static int cap = 0;
    return cap;
}

inline int effective_threads() {
    int cap = thread_cap();
    unsigned hw = std::thread::hardware_concurrency();
    if (hw == 0) hw = 1;
    if (cap <= 0) return static_cast<int>(hw);
    return cap;
}

// Runs fn(block) for block = 0..n_blocks-1 on up to effective_threads()
// workers. fn must write only into its own block's slot. The first exception
// thrown by any block is rethrown on the calling thread.
template <typename Fn>
void parallel_blocks(std::size_t n_blocks, Fn&& fn) {
    int nthreads = effective_threads();
    if (nthreads <= 1 || n_blocks <= 1) {
        for (std::size_t b = 0; b < n_blocks; ++b) fn(b);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::atomic<bool> failed{false};
    std::exception_ptr error;
    std::mutex error_mu;
    auto worker = [&] {
        for (;;) {
            std::size_t b = next.fetch_add(1);
            if (b >= n_blocks || failed.load(std::memory_order_relaxed)) return;
            try {
                fn(b);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mu);
                if (!error) error = std::current_exception();
                failed.store(true, std::memory_order_relaxed);
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    std::size_t spawn = std::min<std::size_t>(static_cast<std::size_t>(nthreads), n_blocks);
    pool.reserve(spawn);
    for (std::size_t i = 0; i + 1 < spawn; ++i) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
}

} // namespace lbsieve
