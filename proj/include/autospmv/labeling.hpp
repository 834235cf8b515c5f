#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "autospmv/dataset.hpp"
#include "autospmv/sweep.hpp"

namespace autospmv {

enum class Direction { minimize, maximize };

struct Objective {
  std::string column = "latency_seconds";
  Direction direction = Direction::minimize;
};

/// Built-in direction for known columns: mflops and energy_efficiency are
/// maximized, everything else minimized unless `direction` is given.
Objective make_objective(std::string_view column,
                         std::optional<std::string_view> direction = std::nullopt);

struct LabelingResult {
  /// One classification dataset per config dimension, in space order. Rows
  /// are the eight sparsity features of each labeled matrix.
  std::vector<LabeledDataset> per_dimension;
  std::vector<std::string> matrix_ids;
  std::vector<ConfigPoint> winners;
  /// Matrices without a feasible point that carries the objective.
  std::vector<std::string> dropped;
};

/// Index into `ds.records` of the winning record for `matrix_id`: best
/// objective, then smaller latency, then the point whose declared-order
/// value indices compare lexicographically smallest.
std::optional<std::size_t> winning_record(const SweepDataset& ds, std::string_view matrix_id,
                                          const Objective& obj);

LabelingResult label_dataset(const SweepDataset& ds, const Objective& obj);

}  // namespace autospmv
