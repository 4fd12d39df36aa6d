#pragma once

#include <algorithm>
#include <cstddef>
#include <utility>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace hdual {

// Execution policy for the data-parallel scan kernels. Parallel uses OpenMP
// when compiled in and must produce results identical to Serial; the serial
// path is the reference implementation and stays in use for testing.
enum class ExecMode { Serial, Parallel };

inline ExecMode default_exec_mode() {
#ifdef _OPENMP
  return ExecMode::Parallel;
#else
  return ExecMode::Serial;
#endif
}

struct ScanBest {
  double value = 0.0;
  std::ptrdiff_t index = -1;  // -1: empty range
};

namespace detail {
// Strictly-better comparison; ties go to the lower index so the reduction
// result does not depend on evaluation order.
inline bool scan_better(double v, std::ptrdiff_t i, double bv, std::ptrdiff_t bi) {
  if (bi < 0) return true;
  if (v != bv) return v > bv;
  return i < bi;
}
}  // namespace detail

// Deterministic argmax of value_at(0..count-1). Serial and Parallel agree
// bit-for-bit: the winner is a specific index and its value is re-usable.
template <class F>
ScanBest scan_max(std::ptrdiff_t count, F&& value_at, ExecMode mode) {
  ScanBest best;
#ifdef _OPENMP
  if (mode == ExecMode::Parallel && count > 1) {
    #pragma omp parallel
    {
      ScanBest local;
      #pragma omp for schedule(dynamic, 16) nowait
      for (std::ptrdiff_t i = 0; i < count; ++i) {
        double v = value_at(i);
        if (detail::scan_better(v, i, local.value, local.index)) local = {v, i};
      }
      #pragma omp critical(hdual_scan_max)
      {
        if (local.index >= 0 &&
            detail::scan_better(local.value, local.index, best.value, best.index))
          best = local;
      }
    }
    return best;
  }
#else
  (void)mode;
#endif
  for (std::ptrdiff_t i = 0; i < count; ++i) {
    double v = value_at(i);
    if (detail::scan_better(v, i, best.value, best.index)) best = {v, i};
  }
  return best;
}

// Lowest index i with hit(i), or -1. Evaluates in blocks so a parallel run can
// stop early while still returning the same index as the serial scan.
template <class P>
std::ptrdiff_t scan_first_hit(std::ptrdiff_t count, P&& hit, ExecMode mode) {
#ifdef _OPENMP
  if (mode == ExecMode::Parallel && count > 1) {
    const std::ptrdiff_t block = 16 * static_cast<std::ptrdiff_t>(omp_get_max_threads());
    for (std::ptrdiff_t lo = 0; lo < count; lo += block) {
      const std::ptrdiff_t hi = std::min(count, lo + block);
      std::ptrdiff_t found = count;
      #pragma omp parallel for schedule(dynamic, 1) reduction(min : found)
      for (std::ptrdiff_t i = lo; i < hi; ++i) {
        if (hit(i) && i < found) found = i;
      }
      if (found < count) return found;
    }
    return -1;
  }
#else
  (void)mode;
#endif
  for (std::ptrdiff_t i = 0; i < count; ++i)
    if (hit(i)) return i;
  return -1;
}

}  // namespace hdual
