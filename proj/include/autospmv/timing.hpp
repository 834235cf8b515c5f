#pragma once

#include <chrono>
#include <cstddef>
#include <functional>

namespace autospmv {

using Seconds = std::chrono::duration<double>;

struct TimingParams {
  Seconds min_total{0.2};
  std::size_t max_reps = 200000;
  int warmup = 3;
};

struct KernelTiming {
  double mean_seconds = 0.0;
  std::size_t repetitions = 0;
  double total_seconds = 0.0;
};

/// Runs `kernel` `warmup` times untimed, then repeatedly until the summed
/// wall time reaches `min_total` or `max_reps` runs were timed. Reports the
/// arithmetic mean. Not reentrant with respect to other timings in flight:
/// callers serialize benchmarking.
KernelTiming time_kernel(const std::function<void()>& kernel, const TimingParams& params = {});

/// Useful-work rate in MFLOPS with the 2*nnz flop convention (padding
/// multiplications do not count).
double mflops(std::size_t nnz, const KernelTiming& timing);

}  // namespace autospmv
