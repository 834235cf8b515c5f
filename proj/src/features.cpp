#include "autospmv/features.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace autospmv {

SparsityFeatures extract_features(const TripletMatrix& m) {
  if (m.n_rows() < 1) throw std::invalid_argument("extract_features: matrix has no rows");

  const auto counts = m.row_counts();
  const std::size_t n = counts.size();
  const std::size_t max_len = *std::max_element(counts.begin(), counts.end());

  // histogram[k] = number of rows holding exactly k nonzeros
  std::vector<std::size_t> histogram(max_len + 1, 0);
  for (auto c : counts) ++histogram[c];

  SparsityFeatures f;
  f.n = static_cast<double>(n);
  f.nnz = static_cast<double>(m.nnz());
  f.avg_nnz = f.nnz / f.n;

  double ss = 0.0;
  for (std::size_t k = 0; k <= max_len; ++k) {
    if (histogram[k] == 0) continue;
    const double d = static_cast<double>(k) - f.avg_nnz;
    ss += static_cast<double>(histogram[k]) * d * d;
  }
  f.var_nnz = ss / f.n;
  f.std_nnz = std::sqrt(f.var_nnz);
  f.ell_ratio = max_len == 0 ? 1.0 : f.nnz / (f.n * static_cast<double>(max_len));

  // Order statistics straight from the histogram.
  auto kth = [&](std::size_t k) {
    std::size_t seen = 0;
    for (std::size_t len = 0; len <= max_len; ++len) {
      seen += histogram[len];
      if (seen > k) return static_cast<double>(len);
    }
    return static_cast<double>(max_len);
  };
  f.median = n % 2 == 1 ? kth(n / 2) : (kth(n / 2 - 1) + kth(n / 2)) / 2.0;

  std::size_t best = 0;
  for (std::size_t k = 1; k <= max_len; ++k) {
    if (histogram[k] > histogram[best]) best = k;
  }
  f.mode = static_cast<double>(best);
  return f;
}

double time_feature_extraction(const TripletMatrix& m, const TimingParams& params) {
  volatile double sink = 0.0;
  auto t = time_kernel([&] { sink = sink + extract_features(m).nnz; }, params);
  return t.mean_seconds;
}

}  // namespace autospmv
