#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "autospmv/labeling.hpp"
#include "autospmv/sweep.hpp"

namespace autospmv {

struct ReportRow {
  std::string matrix_id;
  std::optional<double> default_value;
  std::optional<double> chosen_value;
};

/// Objective values of the default and the chosen config per matrix, as
/// improvement percentages over the default.
struct ImprovementReport {
  Objective objective;
  std::vector<ReportRow> rows;

  /// (default - chosen) / default * 100 when minimizing,
  /// (chosen - default) / default * 100 when maximizing. nullopt when either
  /// value is missing or not positive.
  std::optional<double> improvement(const ReportRow& r) const;

  /// Over rows with an improvement: (1 - geomean(chosen / default)) * 100
  /// when minimizing, (geomean(chosen / default) - 1) * 100 when maximizing.
  std::optional<double> gmean() const;

  /// Fixed-width table; values %.6g, percentages %.2f, "n/a" when absent.
  std::string to_text() const;
  /// matrix_id,default,chosen,improvement_percent with a trailing GMean row.
  std::string to_csv() const;
};

/// Looks up the default point and each chosen point in the dataset. Missing
/// or infeasible records leave the value empty.
ImprovementReport build_report(const SweepDataset& ds, const Objective& objective,
                               const std::vector<std::pair<std::string, ConfigPoint>>& chosen);

}  // namespace autospmv
