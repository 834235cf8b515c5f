#pragma once

#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "autospmv/dataset.hpp"
#include "json.hpp"

namespace autospmv {

enum class Metric { manhattan, euclidean };

std::string_view to_string(Metric m);
std::optional<Metric> parse_metric(std::string_view name);

/// Per-class means in standardized feature space.
class NearestCentroid {
 public:
  NearestCentroid() = default;

  static NearestCentroid fit(const LabeledDataset& data, Metric metric = Metric::manhattan);

  /// Nearest centroid; equal distances go to the lowest class index, which is
  /// also the lexicographically smallest label.
  double predict(std::span<const double> x) const;
  std::vector<double> predict(const std::vector<std::vector<double>>& rows) const;

  Metric metric() const noexcept { return metric_; }
  std::size_t arity() const noexcept { return scaler_.mean.size(); }
  const FeatureScaler& scaler() const noexcept { return scaler_; }
  /// Indexed by class; classes absent from training have no centroid.
  const std::vector<std::optional<std::vector<double>>>& centroids() const noexcept {
    return centroids_;
  }

  nlohmann::json to_json() const;
  static NearestCentroid from_json(const nlohmann::json& j);

 private:
  Metric metric_ = Metric::manhattan;
  FeatureScaler scaler_;
  std::vector<std::optional<std::vector<double>>> centroids_;
};

nlohmann::json scaler_to_json(const FeatureScaler& s);
FeatureScaler scaler_from_json(const nlohmann::json& j);

}  // namespace autospmv
