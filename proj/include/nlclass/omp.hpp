#pragma once

// Include this instead of <omp.h> so the kernels still build (serially)
// without OpenMP.

#if defined(_OPENMP)
#include <omp.h>
namespace nlclass {
constexpr bool use_omp = true;
}  // namespace nlclass
#else
#pragma GCC diagnostic ignored "-Wunknown-pragmas"
namespace nlclass {
constexpr bool use_omp = false;
}  // namespace nlclass
inline int omp_get_thread_num() { return 0; }
inline int omp_get_max_threads() { return 1; }
#endif

namespace nlclass {

// Number of worker threads for a kernel; 0 means "runtime default".
inline int resolve_threads(int requested) {
  return requested > 0 ? requested : omp_get_max_threads();
}

}  // namespace nlclass
