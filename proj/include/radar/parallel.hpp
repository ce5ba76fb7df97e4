#pragma once

#include <cstddef>
#include <exception>
#include <mutex>

#if defined(_OPENMP)
#include <omp.h>
#endif

namespace radar {

/// Selects between the OpenMP kernel and its serial reference. Both paths
/// produce identical results; the serial path is kept for testing.
enum class Exec { serial, parallel };

inline bool openmp_enabled() noexcept {
#if defined(_OPENMP)
    return true;
#else
    return false;
#endif
}

inline int max_threads() noexcept {
#if defined(_OPENMP)
    return omp_get_max_threads();
#else
    return 1;
#endif
}

/// Runs body(i) for i in [0, n). Iterations must be independent. The first
/// exception thrown by any iteration is rethrown after the loop completes.
template <typename Body>
void parallel_for(Exec exec, std::size_t n, Body&& body) {
    if (exec == Exec::parallel && openmp_enabled() && n > 1) {
        const auto count = static_cast<std::ptrdiff_t>(n);
        std::exception_ptr failure;
        std::mutex failure_mutex;
#pragma omp parallel for schedule(dynamic, 1)
        for (std::ptrdiff_t i = 0; i < count; ++i) {
            try {
                body(static_cast<std::size_t>(i));
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
            }
        }
        if (failure) std::rethrow_exception(failure);
        return;
    }
    for (std::size_t i = 0; i < n; ++i) {
        body(i);
    }
}

} // namespace radar
