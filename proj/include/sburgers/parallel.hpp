#pragma once

#include <cmath>
#include <cstddef>
#include <exception>
#include <mutex>
#include <span>
#include <thread>
#include <type_traits>
#include <vector>

#include <omp.h>

namespace sburgers {

/// Worker count used when the caller passes 0.
inline int default_workers()
{
    const unsigned hc = std::thread::hardware_concurrency();
    return hc == 0 ? 1 : int(hc);
}

/// Serial reference: results[i] = fn(i) in index order.
template <class Fn>
auto ensemble_map_serial(std::size_t count, Fn&& fn) -> std::vector<std::invoke_result_t<Fn&, std::size_t>>
{
    std::vector<std::invoke_result_t<Fn&, std::size_t>> out;
    out.reserve(count);
    for (std::size_t i = 0; i < count; ++i) out.push_back(fn(i));
    return out;
}

/// results[i] = fn(i), members distributed over `workers` OpenMP threads.
/// Each member must depend only on its index, so the result is bitwise
/// identical to ensemble_map_serial for any worker count. The first exception
/// thrown by a member is rethrown after the loop.
template <class Fn>
auto ensemble_map(std::size_t count, Fn&& fn, int workers = 0)
    -> std::vector<std::invoke_result_t<Fn&, std::size_t>>
{
    using R = std::invoke_result_t<Fn&, std::size_t>;
    if (workers <= 0) workers = default_workers();
    if (workers == 1 || count <= 1) return ensemble_map_serial(count, fn);

    std::vector<R> out(count);
    std::exception_ptr error;
    std::mutex error_mutex;
    const auto n = static_cast<long long>(count);
#pragma omp parallel for schedule(dynamic, 1) num_threads(workers)
    for (long long i = 0; i < n; ++i) {
        try {
            out[std::size_t(i)] = fn(std::size_t(i));
        } catch (...) {
            std::lock_guard lock(error_mutex);
            if (!error) error = std::current_exception();
        }
    }
    if (error) std::rethrow_exception(error);
    return out;
}

/// Neumaier-compensated sum in index order.
inline double compensated_sum(std::span<const double> xs)
{
    double sum = 0.0, c = 0.0;
    for (double x : xs) {
        const double t = sum + x;
        if (std::abs(sum) >= std::abs(x)) c += (sum - t) + x;
        else c += (x - t) + sum;
        sum = t;
    }
    return sum + c;
}

struct SampleStats {
    std::size_t count = 0;
    double mean = 0.0;
    double variance = 0.0;        ///< unbiased sample variance
    double standard_error = 0.0;  ///< sqrt(variance / count)
};

/// Mean and standard error with compensated sums (order-independent up to the
/// fixed index order of xs).
inline SampleStats sample_stats(std::span<const double> xs)
{
    SampleStats s;
    s.count = xs.size();
    if (xs.empty()) return s;
    s.mean = compensated_sum(xs) / double(xs.size());
    if (xs.size() > 1) {
        std::vector<double> dev(xs.size());
        for (std::size_t i = 0; i < xs.size(); ++i) dev[i] = (xs[i] - s.mean) * (xs[i] - s.mean);
        s.variance = compensated_sum(dev) / double(xs.size() - 1);
        s.standard_error = std::sqrt(s.variance / double(xs.size()));
    }
    return s;
}

} // namespace sburgers
