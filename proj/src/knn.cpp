#include "autospmv/knn.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include "autospmv/common.hpp"

namespace autospmv {

KnnRegressor KnnRegressor::fit(const LabeledDataset& data, int k, Metric metric) {
  data.validate();
  if (data.task != Task::regression) throw std::invalid_argument("knn needs a regression dataset");
  if (data.size() == 0) throw std::invalid_argument("cannot fit on an empty dataset");
  if (k < 1) throw std::invalid_argument("k must be >= 1");

  KnnRegressor m;
  m.k_ = k;
  m.metric_ = metric;
  m.scaler_ = FeatureScaler::fit(data.rows);
  m.points_.reserve(data.size());
  for (const auto& r : data.rows) m.points_.push_back(m.scaler_.transform(r));
  m.targets_ = data.targets;
  return m;
}

double KnnRegressor::predict(std::span<const double> x) const {
  if (x.size() != arity()) {
    throw DimensionMismatch("knn expects " + std::to_string(arity()) + " features, got " +
                            std::to_string(x.size()));
  }
  const auto z = scaler_.transform(x);
  std::vector<std::pair<double, std::size_t>> dist;
  dist.reserve(points_.size());
  for (std::size_t i = 0; i < points_.size(); ++i) {
    double d = 0.0;
    for (std::size_t j = 0; j < z.size(); ++j) {
      const double diff = z[j] - points_[i][j];
      d += metric_ == Metric::manhattan ? std::abs(diff) : diff * diff;
    }
    dist.emplace_back(d, i);
  }
  const std::size_t kk = std::min(points_.size(), static_cast<std::size_t>(k_));
  std::partial_sort(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(kk), dist.end());
  double sum = 0.0;
  for (std::size_t i = 0; i < kk; ++i) sum += targets_[dist[i].second];
  return sum / static_cast<double>(kk);
}

std::vector<double> KnnRegressor::predict(const std::vector<std::vector<double>>& rows) const {
  std::vector<double> out;
  out.reserve(rows.size());
  for (const auto& r : rows) out.push_back(predict(r));
  return out;
}

nlohmann::json KnnRegressor::to_json() const {
  return {{"k", k_},
          {"metric", to_string(metric_)},
          {"scaler", scaler_to_json(scaler_)},
          {"points", points_},
          {"targets", targets_}};
}

KnnRegressor KnnRegressor::from_json(const nlohmann::json& j) {
  KnnRegressor m;
  m.k_ = j.at("k").get<int>();
  const auto metric = parse_metric(j.at("metric").get<std::string>());
  if (!metric || m.k_ < 1) throw std::invalid_argument("bad knn header in model file");
  m.metric_ = *metric;
  m.scaler_ = scaler_from_json(j.at("scaler"));
  m.points_ = j.at("points").get<std::vector<std::vector<double>>>();
  m.targets_ = j.at("targets").get<std::vector<double>>();
  if (m.points_.size() != m.targets_.size() || m.points_.empty()) {
    throw std::invalid_argument("knn points/targets mismatch");
  }
  for (const auto& p : m.points_) {
    if (p.size() != m.arity()) throw std::invalid_argument("knn point arity mismatch");
  }
  return m;
}

}  // namespace autospmv
