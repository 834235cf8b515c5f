#pragma once

#include <cstddef>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "autospmv/config_space.hpp"
#include "autospmv/features.hpp"
#include "autospmv/formats.hpp"
#include "autospmv/matrix_io.hpp"
#include "autospmv/timing.hpp"

namespace autospmv {

inline constexpr int kSchemaVersion = 1;

struct MeasurementRecord {
  std::string matrix_id;
  SparsityFeatures features;
  ConfigPoint config;
  bool feasible = true;
  std::size_t repetitions = 0;
  double latency_seconds = 0.0;
  double mflops = 0.0;
  std::optional<double> energy_joules;
  std::optional<double> avg_power_watts;
  std::optional<double> energy_efficiency;  // MFLOPS per watt
  /// Values of SweepDataset::extra_columns, kept as text.
  std::vector<std::string> extra;

  friend bool operator==(const MeasurementRecord&, const MeasurementRecord&) = default;
};

struct MachineFingerprint {
  std::string host;
  int worker_budget = 1;
  std::string timestamp;  // UTC, ISO-8601

  friend bool operator==(const MachineFingerprint&, const MachineFingerprint&) = default;
};

MachineFingerprint current_machine();

struct SweepDataset {
  int schema_version = kSchemaVersion;
  MachineFingerprint machine;
  ConfigSpace space;
  std::vector<std::string> extra_columns;
  std::vector<MeasurementRecord> records;

  /// Throws DataError on duplicate (matrix_id, config), points outside the
  /// space, non-positive feasible latency, or an energy_efficiency that is
  /// not mflops / avg_power.
  void validate() const;

  /// Appends after checking the record against the invariants above.
  void add(MeasurementRecord r);
  bool contains(std::string_view matrix_id, const ConfigPoint& p) const;

  /// Matrix ids in order of first appearance.
  std::vector<std::string> matrix_ids() const;

  /// Objective value of a record: a built-in numeric column or an extra
  /// column. nullopt when the column is empty for that record.
  std::optional<double> objective_value(const MeasurementRecord& r, std::string_view column) const;
  bool has_column(std::string_view column) const;
};

struct SweepOptions {
  TimingParams timing;
  FormatOptions formats;
  /// Check every kernel output against the triplet reference before timing.
  bool verify = false;
  /// Timing rounds per matrix. Each round times every point once, so drift
  /// affects all points alike; the record keeps the median round mean.
  int rounds = 1;
  /// Written (CSV plus sidecar) after each completed matrix.
  std::optional<std::filesystem::path> checkpoint;
  std::function<void(const MeasurementRecord&)> on_record;
};

/// One record per (matrix, point). Points already present in `resume` are
/// copied instead of re-measured. Timing is strictly one kernel at a time.
SweepDataset run_sweep(const std::vector<NamedMatrix>& matrices, const ConfigSpace& space,
                       const SweepOptions& opts, const SweepDataset* resume = nullptr);

/// Every *.mtx file under `dir` (sorted by name), id = file stem. Parse
/// failures rethrow as DataError naming the file.
std::vector<NamedMatrix> load_matrix_dir(const std::filesystem::path& dir);
NamedMatrix load_matrix_file(const std::filesystem::path& path);

/// Deterministic right-hand side used by sweeps and verification.
std::vector<double> probe_vector(std::size_t n);

}  // namespace autospmv
