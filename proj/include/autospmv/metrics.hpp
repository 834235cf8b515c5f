#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "autospmv/dataset.hpp"
#include "json.hpp"

namespace autospmv {

/// Stand-in for -inf when a constant-target holdout is predicted imperfectly.
inline constexpr double kR2Floor = -1e12;

struct EvalReport {
  Task task = Task::classification;
  std::size_t count = 0;
  double accuracy = 0.0;
  double macro_f1 = 0.0;
  /// confusion[truth][predicted]
  std::vector<std::vector<std::size_t>> confusion;
  double mse = 0.0;
  double r2 = 0.0;

  /// Throws std::logic_error when a metric leaves its valid range.
  void check_bounds() const;
  nlohmann::json to_json() const;
  static EvalReport from_json(const nlohmann::json& j);
};

/// Labels are class indices in [0, n_classes). Per-class F1 is averaged over
/// classes that occur in either the truth or the predictions.
EvalReport evaluate_classification(std::span<const double> truth, std::span<const double> pred,
                                   std::size_t n_classes);

EvalReport evaluate_regression(std::span<const double> truth, std::span<const double> pred);

}  // namespace autospmv
