#pragma once

#include <atomic>
#include <cstddef>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace ple::par {

enum class Mode { serial, openmp };

namespace detail {
inline std::atomic<Mode>& mode_flag() {
    static std::atomic<Mode> m{Mode::openmp};
    return m;
}
}  // namespace detail

inline void set_mode(Mode m) { detail::mode_flag().store(m); }
inline Mode mode() { return detail::mode_flag().load(); }

inline void set_threads(int n) {
#ifdef _OPENMP
    if (n > 0) omp_set_num_threads(n);
#else
    (void)n;
#endif
}

inline int max_threads() {
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

/// Serial reference loop. Kept as its own entry point so tests and the
/// benchmark can compare it against the OpenMP path.
template <class F>
void for_index_serial(std::size_t count, F&& f) {
    for (std::size_t i = 0; i < count; ++i) f(i);
}

/// Data-parallel loop over [0, count). Bodies must write only to slot i of
/// preallocated output; callers reduce afterwards in index order so results
/// are identical across thread counts and across the serial path.
template <class F>
void for_index(std::size_t count, F&& f) {
#ifdef _OPENMP
    if (mode() == Mode::openmp) {
        const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(count);
#pragma omp parallel for schedule(static)
        for (std::ptrdiff_t i = 0; i < n; ++i) f(static_cast<std::size_t>(i));
        return;
    }
#endif
    for_index_serial(count, f);
}

}  // namespace ple::par
