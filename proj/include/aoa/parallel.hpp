#pragma once

#include <cstdint>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace aoa::par {

enum class Mode { serial, openmp };

Mode mode();
void set_mode(Mode m);
int thread_count();

// Runs fn(i) for i in [0, n). Work is split across whole indices only, and
// every index executes the same instruction sequence as the serial loop, so
// results are bitwise identical in both modes.
template <typename Fn>
void parallel_for(std::int64_t n, Fn&& fn) {
#ifdef _OPENMP
    if (mode() == Mode::openmp && n > 1) {
#pragma omp parallel for schedule(static)
        for (std::int64_t i = 0; i < n; ++i) fn(i);
        return;
    }
#endif
    for (std::int64_t i = 0; i < n; ++i) fn(i);
}

} // namespace aoa::par
