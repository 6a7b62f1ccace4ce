#include "aoa/parallel.hpp"

#include <atomic>

namespace aoa::par {

namespace {

std::atomic<Mode> g_mode{
#ifdef _OPENMP
    Mode::openmp
#else
    Mode::serial
#endif
};

} // namespace

Mode mode() { return g_mode.load(std::memory_order_relaxed); }

void set_mode(Mode m) { g_mode.store(m, std::memory_order_relaxed); }

int thread_count() {
#ifdef _OPENMP
    return mode() == Mode::openmp ? omp_get_max_threads() : 1;
#else
    return 1;
#endif
}

} // namespace aoa::par
