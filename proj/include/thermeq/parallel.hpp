#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <type_traits>
#include <vector>

namespace thermeq {

/// Number of workers to use for `jobs` (<= 0 means hardware concurrency).
inline int resolve_jobs(int jobs) {
    if (jobs > 0) return jobs;
    const unsigned hc = std::thread::hardware_concurrency();
    return hc == 0 ? 1 : static_cast<int>(hc);
}

/// out[i] = f(i) for i in [0, n), computed by up to `jobs` threads over
/// contiguous index ranges. Results land in index order, so reductions over
/// the output are identical for every worker count. The first exception
/// thrown by any f(i) is rethrown after all workers join.
template <class F>
auto parallel_map(std::size_t n, int jobs, F&& f) -> std::vector<std::invoke_result_t<F&, std::size_t>> {
    using R = std::invoke_result_t<F&, std::size_t>;
    static_assert(!std::is_same_v<R, bool>, "vector<bool> elements are not independently writable; return char");
    std::vector<R> out(n);
    const auto workers = static_cast<std::size_t>(std::min<std::size_t>(static_cast<std::size_t>(resolve_jobs(jobs)), n));
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) out[i] = f(i);
        return out;
    }
    std::exception_ptr err;
    std::mutex mu;
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        const std::size_t lo = n * w / workers, hi = n * (w + 1) / workers;
        pool.emplace_back([&, lo, hi] {
            try {
                for (std::size_t i = lo; i < hi; ++i) out[i] = f(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(mu);
                if (!err) err = std::current_exception();
            }
        });
    }
    for (auto& t : pool) t.join();
    if (err) std::rethrow_exception(err);
    return out;
}

}  // namespace thermeq
