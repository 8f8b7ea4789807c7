#pragma once

#include <cstddef>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace sidm {

/// Execution policy for the data-parallel kernels (grid evaluations, GA
/// fitness, independent simulation runs). Results are required to be
/// bit-identical between the two policies; tests compare them and
/// tools/bench times them.
enum class Exec { serial, parallel };

inline int max_threads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

template <class F>
void parallel_for(std::size_t n, Exec exec, F&& body) {
#ifdef _OPENMP
  if (exec == Exec::parallel && n > 1) {
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(n); ++i) {
      body(static_cast<std::size_t>(i));
    }
    return;
  }
#endif
  for (std::size_t i = 0; i < n; ++i) {
    body(i);
  }
}

}  // namespace sidm
