#include "autospmv/timing.hpp"

#include <stdexcept>

namespace autospmv {

KernelTiming time_kernel(const std::function<void()>& kernel, const TimingParams& params) {
  if (params.min_total.count() <= 0.0) throw std::invalid_argument("time_kernel: min_total must be > 0");
  if (params.max_reps < 1) throw std::invalid_argument("time_kernel: max_reps must be >= 1");

  for (int i = 0; i < params.warmup; ++i) kernel();

  using clock = std::chrono::steady_clock;
  KernelTiming t;
  Seconds total{0.0};
  while (t.repetitions < params.max_reps && total < params.min_total) {
    const auto start = clock::now();
    kernel();
    total += clock::now() - start;
    ++t.repetitions;
  }
  t.total_seconds = total.count();
  t.mean_seconds = t.total_seconds / static_cast<double>(t.repetitions);
  return t;
}

double mflops(std::size_t nnz, const KernelTiming& timing) {
  if (!(timing.mean_seconds > 0.0)) throw std::invalid_argument("mflops: non-positive time");
  return 2.0 * static_cast<double>(nnz) / (timing.mean_seconds * 1e6);
}

}  // namespace autospmv
