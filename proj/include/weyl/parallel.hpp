#pragma once

#include <functional>

namespace weyl {

// Node-wise kernels run either through a plain loop (the reference) or an
// OpenMP worksharing loop.  Both visit every index exactly once and write only
// to per-index slots, so results are bitwise identical.
enum class Exec { serial, parallel };

int max_threads();
void set_threads(int n);
// Reads WEYL_THREADS; returns the value applied, or 0 when unset.
int apply_thread_env();

template <class Fn>
void for_range(Exec exec, int count, Fn&& fn)
{
    if (exec == Exec::serial) {
        for (int k = 0; k < count; ++k) fn(k);
        return;
    }
#pragma omp parallel for schedule(static)
    for (int k = 0; k < count; ++k) fn(k);
}

} // namespace weyl
