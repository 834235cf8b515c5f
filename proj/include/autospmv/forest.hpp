#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "autospmv/tree.hpp"

namespace autospmv {

struct ForestParams {
  int n_estimators = 100;
  TreeParams tree;  // max_features left unset means the task default
  bool bootstrap = true;
  /// When false every split sees all features.
  bool feature_subsampling = true;
  int worker_count = 1;

  void validate() const;
};

class RandomForest {
 public:
  RandomForest() = default;

  /// Tree i draws from mix_seed(seed, i), so the result does not depend on
  /// worker_count or scheduling.
  static RandomForest fit(const LabeledDataset& data, const ForestParams& params,
                          std::uint64_t seed);

  /// Majority vote (lowest class index wins ties) or mean of tree outputs.
  double predict(std::span<const double> x) const;
  std::vector<double> predict(const std::vector<std::vector<double>>& rows) const;

  Task task() const noexcept { return task_; }
  std::size_t arity() const noexcept { return arity_; }
  const std::vector<DecisionTree>& trees() const noexcept { return trees_; }

  nlohmann::json to_json() const;
  static RandomForest from_json(const nlohmann::json& j);

 private:
  Task task_ = Task::classification;
  std::size_t arity_ = 0;
  std::size_t n_classes_ = 0;
  std::vector<DecisionTree> trees_;
};

/// ceil(sqrt(d)) for classification, max(1, d / 3) for regression.
int default_max_features(Task task, std::size_t arity);

}  // namespace autospmv
