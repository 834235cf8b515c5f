#pragma once

#include <array>
#include <cstddef>
#include <string_view>
#include <vector>

#include "autospmv/matrix_io.hpp"
#include "autospmv/timing.hpp"

namespace autospmv {

/// The eight row-distribution features every predictor consumes.
///
/// Variance and standard deviation are population statistics over all rows
/// (empty rows included). The median of an even row count is the mean of the
/// two middle values; the mode breaks ties toward the smallest row length.
/// ell_ratio is nnz / (n * max_nnz), or 1 for a matrix with no nonzeros.
struct SparsityFeatures {
  double n = 0;
  double nnz = 0;
  double avg_nnz = 0;
  double var_nnz = 0;
  double ell_ratio = 1;
  double median = 0;
  double mode = 0;
  double std_nnz = 0;

  static constexpr std::size_t kCount = 8;
  static constexpr std::array<std::string_view, kCount> kNames = {
      "n", "nnz", "avg_nnz", "var_nnz", "ell_ratio", "median", "mode", "std_nnz"};

  std::array<double, kCount> to_array() const {
    return {n, nnz, avg_nnz, var_nnz, ell_ratio, median, mode, std_nnz};
  }
  static SparsityFeatures from_array(const std::array<double, kCount>& v) {
    return {v[0], v[1], v[2], v[3], v[4], v[5], v[6], v[7]};
  }
  static std::vector<std::string> names() { return {kNames.begin(), kNames.end()}; }

  friend bool operator==(const SparsityFeatures&, const SparsityFeatures&) = default;
};

/// Single pass over the row-length histogram. Throws std::invalid_argument
/// for a matrix with zero rows.
SparsityFeatures extract_features(const TripletMatrix& m);

/// Mean seconds per extract_features call under the kernel timing protocol.
double time_feature_extraction(const TripletMatrix& m, const TimingParams& params = {});

}  // namespace autospmv
