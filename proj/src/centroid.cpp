#include "autospmv/centroid.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "autospmv/common.hpp"

namespace autospmv {

std::string_view to_string(Metric m) {
  return m == Metric::manhattan ? "manhattan" : "euclidean";
}

std::optional<Metric> parse_metric(std::string_view name) {
  if (name == "manhattan") return Metric::manhattan;
  if (name == "euclidean") return Metric::euclidean;
  return std::nullopt;
}

NearestCentroid NearestCentroid::fit(const LabeledDataset& data, Metric metric) {
  data.validate();
  if (data.task != Task::classification) {
    throw std::invalid_argument("nearest centroid needs a classification dataset");
  }
  if (data.size() == 0) throw std::invalid_argument("cannot fit on an empty dataset");

  NearestCentroid m;
  m.metric_ = metric;
  m.scaler_ = FeatureScaler::fit(data.rows);
  const std::size_t d = data.arity();
  std::vector<std::vector<double>> sums(data.n_classes(), std::vector<double>(d, 0.0));
  std::vector<std::size_t> counts(data.n_classes(), 0);
  for (std::size_t i = 0; i < data.size(); ++i) {
    const auto z = m.scaler_.transform(data.rows[i]);
    const auto c = static_cast<std::size_t>(data.label_of(i));
    for (std::size_t j = 0; j < d; ++j) sums[c][j] += z[j];
    ++counts[c];
  }
  m.centroids_.resize(data.n_classes());
  for (std::size_t c = 0; c < sums.size(); ++c) {
    if (counts[c] == 0) continue;
    for (auto& v : sums[c]) v /= static_cast<double>(counts[c]);
    m.centroids_[c] = std::move(sums[c]);
  }
  return m;
}

double NearestCentroid::predict(std::span<const double> x) const {
  if (x.size() != arity()) {
    throw DimensionMismatch("nearest centroid expects " + std::to_string(arity()) +
                            " features, got " + std::to_string(x.size()));
  }
  const auto z = scaler_.transform(x);
  double best = std::numeric_limits<double>::infinity();
  std::size_t best_class = 0;
  for (std::size_t c = 0; c < centroids_.size(); ++c) {
    if (!centroids_[c]) continue;
    double dist = 0.0;
    for (std::size_t j = 0; j < z.size(); ++j) {
      const double diff = z[j] - (*centroids_[c])[j];
      dist += metric_ == Metric::manhattan ? std::abs(diff) : diff * diff;
    }
    if (dist < best) {
      best = dist;
      best_class = c;
    }
  }
  return static_cast<double>(best_class);
}

std::vector<double> NearestCentroid::predict(const std::vector<std::vector<double>>& rows) const {
  std::vector<double> out;
  out.reserve(rows.size());
  for (const auto& r : rows) out.push_back(predict(r));
  return out;
}

nlohmann::json scaler_to_json(const FeatureScaler& s) {
  return {{"mean", s.mean}, {"scale", s.scale}};
}

FeatureScaler scaler_from_json(const nlohmann::json& j) {
  FeatureScaler s;
  s.mean = j.at("mean").get<std::vector<double>>();
  s.scale = j.at("scale").get<std::vector<double>>();
  if (s.mean.size() != s.scale.size()) throw std::invalid_argument("scaler size mismatch");
  for (double v : s.scale) {
    if (!(v > 0.0)) throw std::invalid_argument("scaler scale must be positive");
  }
  return s;
}

nlohmann::json NearestCentroid::to_json() const {
  nlohmann::json j;
  j["metric"] = to_string(metric_);
  j["scaler"] = scaler_to_json(scaler_);
  auto& cs = j["centroids"] = nlohmann::json::array();
  for (const auto& c : centroids_) cs.push_back(c ? nlohmann::json(*c) : nlohmann::json(nullptr));
  return j;
}

NearestCentroid NearestCentroid::from_json(const nlohmann::json& j) {
  NearestCentroid m;
  const auto metric = parse_metric(j.at("metric").get<std::string>());
  if (!metric) throw std::invalid_argument("unknown metric in model file");
  m.metric_ = *metric;
  m.scaler_ = scaler_from_json(j.at("scaler"));
  for (const auto& c : j.at("centroids")) {
    if (c.is_null()) {
      m.centroids_.emplace_back();
      continue;
    }
    auto v = c.get<std::vector<double>>();
    if (v.size() != m.arity()) throw std::invalid_argument("centroid arity mismatch");
    m.centroids_.emplace_back(std::move(v));
  }
  return m;
}

}  // namespace autospmv
