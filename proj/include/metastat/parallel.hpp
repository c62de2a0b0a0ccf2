#pragma once

namespace metastat {

/// Execution policy for the data-parallel kernels. Serial is the reference
/// implementation; the OpenMP path must produce bit-identical results
/// (work is partitioned per index, reductions stay in fixed serial order).
enum class Exec { Serial, OpenMP };

/// Worker cap honoring the METASTAT_THREADS environment variable
/// (applies to Exec::OpenMP; Serial always uses one thread).
int worker_count();

/// Parallel loop over [0, n) with the given policy.
template <class Body>
void for_each_index(Exec exec, int n, const Body& body);

} // namespace metastat

#ifdef _OPENMP
#include <omp.h>
#endif

namespace metastat {

template <class Body>
void for_each_index(Exec exec, int n, const Body& body) {
#ifdef _OPENMP
    if (exec == Exec::OpenMP) {
#pragma omp parallel for schedule(static) num_threads(worker_count())
        for (int i = 0; i < n; ++i) body(i);
        return;
    }
#else
    (void)exec;
#endif
    for (int i = 0; i < n; ++i) body(i);
}

} // namespace metastat
