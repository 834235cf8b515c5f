#pragma once

#include <span>
#include <vector>

#include "autospmv/centroid.hpp"
#include "autospmv/dataset.hpp"
#include "json.hpp"

namespace autospmv {

/// Mean target of the k nearest training rows in standardized space.
/// Distance ties resolve to the earlier training row.
class KnnRegressor {
 public:
  KnnRegressor() = default;

  static KnnRegressor fit(const LabeledDataset& data, int k = 5,
                          Metric metric = Metric::euclidean);

  double predict(std::span<const double> x) const;
  std::vector<double> predict(const std::vector<std::vector<double>>& rows) const;

  int k() const noexcept { return k_; }
  std::size_t arity() const noexcept { return scaler_.mean.size(); }

  nlohmann::json to_json() const;
  static KnnRegressor from_json(const nlohmann::json& j);

 private:
  int k_ = 5;
  Metric metric_ = Metric::euclidean;
  FeatureScaler scaler_;
  std::vector<std::vector<double>> points_;  // scaled
  std::vector<double> targets_;
};

}  // namespace autospmv
