#include "metastat/parallel.hpp"

#include <cstdlib>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace metastat {

int worker_count() {
#ifdef _OPENMP
    int n = omp_get_max_threads();
    if (const char* env = std::getenv("METASTAT_THREADS")) {
        try {
            const int cap = std::stoi(env);
            if (cap >= 1 && cap < n) n = cap;
        } catch (...) {
            // unparseable cap: ignore, keep the OpenMP default
        }
    }
    return n;
#else
    return 1;
#endif
}

} // namespace metastat
