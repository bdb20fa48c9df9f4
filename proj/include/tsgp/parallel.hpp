#pragma once

#include <cstddef>
#include <exception>

#include <omp.h>

namespace tsgp {

/// Execution policy for the data-parallel kernels. Every kernel that takes
/// one produces bit-identical results under both policies.
enum class Exec { Serial, Parallel };

/// Runs body(i) for i in [0, n). Iterations must be independent.
template <typename Body>
void parallel_for(Exec exec, std::size_t n, Body&& body)
{
    if (exec == Exec::Serial || n < 2) {
        for (std::size_t i = 0; i < n; ++i) {
            body(i);
        }
        return;
    }
    const auto count = static_cast<long long>(n);
    std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic, 1)
    for (long long i = 0; i < count; ++i) {
        try {
            body(static_cast<std::size_t>(i));
        } catch (...) {
#pragma omp critical(tsgp_parallel_for_failure)
            {
                if (!failure) {
                    failure = std::current_exception();
                }
            }
        }
    }
    if (failure) {
        std::rethrow_exception(failure);
    }
}

inline void set_thread_count(int threads)
{
    if (threads > 0) {
        omp_set_num_threads(threads);
    }
}

inline int max_threads() { return omp_get_max_threads(); }

} // namespace tsgp
