#pragma once

#include <filesystem>
#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "autospmv/sweep.hpp"
#include "json.hpp"

namespace autospmv {

// Column order: matrix_id, the eight sparsity features, one column per config
// dimension, feasible, repetitions, latency_seconds, mflops, energy_joules,
// avg_power_watts, energy_efficiency, then any extra columns. Missing
// optionals are empty fields.

std::vector<std::string> csv_header(const SweepDataset& ds);
void write_csv(std::ostream& out, const SweepDataset& ds);

/// `meta` is the sidecar document when available. Without it the config
/// space is inferred from the header and the values in first-seen order.
/// Throws DataError naming `source` and the line of any malformed row.
SweepDataset read_csv(std::istream& in, const std::optional<nlohmann::json>& meta = std::nullopt,
                      const std::string& source = "<csv>");

/// Schema version, machine fingerprint and config space.
nlohmann::json dataset_meta(const SweepDataset& ds);
std::filesystem::path sidecar_path(const std::filesystem::path& csv);

/// Writes the CSV and its `<csv>.meta.json` sidecar.
void export_csv(const SweepDataset& ds, const std::filesystem::path& csv);
/// Reads the sidecar when present; rejects a schema version mismatch.
SweepDataset import_csv(const std::filesystem::path& csv);

}  // namespace autospmv
