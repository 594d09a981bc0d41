#include "weyl/parallel.hpp"

#include "weyl/errors.hpp"

#include <cstdlib>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace weyl {

int max_threads()
{
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

void set_threads(int n)
{
    if (n < 1) throw ConfigError("thread count must be >= 1");
#ifdef _OPENMP
    omp_set_num_threads(n);
#endif
}

int apply_thread_env()
{
    const char* env = std::getenv("WEYL_THREADS");
    if (!env || !*env) return 0;
    char* end = nullptr;
    const long n = std::strtol(env, &end, 10);
    if (*end != '\0' || n < 1 || n > 4096)
        throw ConfigError(std::string("WEYL_THREADS must be a positive integer, got '") + env + "'");
    set_threads(static_cast<int>(n));
    return static_cast<int>(n);
}

} // namespace weyl
