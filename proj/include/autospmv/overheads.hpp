#pragma once

#include <array>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "autospmv/features.hpp"
#include "autospmv/formats.hpp"
#include "autospmv/matrix_io.hpp"
#include "autospmv/timing.hpp"

namespace autospmv {

/// Run-time overhead components for one matrix, in seconds.
struct OverheadObservation {
  std::string matrix_id;
  SparsityFeatures features;
  double f_latency = 0.0;  // feature extraction
  /// Conversion from COO, indexed by Format; absent when infeasible or not measured.
  std::array<std::optional<double>, 4> c_latency;
  double o_latency = 0.0;  // overhead-model prediction call
  double p_latency = 0.0;  // format-model prediction call

  std::size_t nnz() const noexcept { return static_cast<std::size_t>(features.nnz); }
  std::optional<double> conversion(Format f) const { return c_latency[static_cast<std::size_t>(f)]; }
  /// f + c(target) + o + p; nullopt when c(target) is absent.
  std::optional<double> total(Format target) const;

  friend bool operator==(const OverheadObservation&, const OverheadObservation&) = default;
};

struct OverheadMeasureOptions {
  TimingParams timing;
  FormatOptions formats;
  std::vector<Format> targets{std::begin(kAllFormats), std::end(kAllFormats)};
  /// Prediction calls to time for o_latency and p_latency; unset means 0.
  std::function<void(const SparsityFeatures&)> overhead_probe;
  std::function<void(const SparsityFeatures&)> format_probe;
};

/// Times extract_features and each conversion under the kernel timing
/// protocol, one measurement at a time.
std::vector<OverheadObservation> measure_overheads(const std::vector<NamedMatrix>& matrices,
                                                   const OverheadMeasureOptions& opts = {});

void write_overheads_csv(std::ostream& out, const std::vector<OverheadObservation>& obs);
std::vector<OverheadObservation> read_overheads_csv(std::istream& in,
                                                    const std::string& source = "<csv>");
void save_overheads(const std::filesystem::path& path, const std::vector<OverheadObservation>& obs);
std::vector<OverheadObservation> load_overheads(const std::filesystem::path& path);

}  // namespace autospmv
