#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace causalfm {

/// Runs body(i) for i in [0, n) on up to `jobs` threads (0 = hardware
/// concurrency). Callers write results into pre-sized slots indexed by i, so
/// output order never depends on scheduling. If any call throws, the
/// exception from the lowest failing index is rethrown after all workers join.
template <typename Body>
void parallel_for(std::size_t n, unsigned jobs, Body &&body) {
    if (jobs == 0) {
        jobs = std::max(1u, std::thread::hardware_concurrency());
    }
    jobs = static_cast<unsigned>(std::min<std::size_t>(jobs, n));
    if (jobs <= 1) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }

    std::atomic<std::size_t> next{0};
    std::vector<std::exception_ptr> errors(n);
    auto worker = [&] {
        for (std::size_t i = next.fetch_add(1); i < n; i = next.fetch_add(1)) {
            try {
                body(i);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    {
        std::vector<std::jthread> pool;
        pool.reserve(jobs);
        for (unsigned k = 0; k < jobs; ++k) pool.emplace_back(worker);
    }
    for (auto &e : errors) {
        if (e) std::rethrow_exception(e);
    }
}

}  // namespace causalfm
