#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "autospmv/centroid.hpp"
#include "autospmv/dataset.hpp"
#include "autospmv/forest.hpp"
#include "autospmv/knn.hpp"
#include "autospmv/metrics.hpp"
#include "autospmv/tree.hpp"
#include "json.hpp"

namespace autospmv {

enum class LearnerKind { decision_tree, random_forest, nearest_centroid, knn };

std::string_view to_string(LearnerKind k);
std::optional<LearnerKind> parse_learner(std::string_view name);

/// Union of every learner's knobs; each learner reads the ones it owns.
struct HyperParams {
  LearnerKind kind = LearnerKind::decision_tree;
  TreeParams tree;
  int n_estimators = 100;
  bool bootstrap = true;
  bool feature_subsampling = true;
  Metric metric = Metric::manhattan;
  int k = 5;

  /// Set a knob from text: criterion, max_depth ("none" or int),
  /// min_samples_leaf, max_features, n_estimators, bootstrap, metric, k.
  void set(std::string_view name, std::string_view value);
  nlohmann::json to_json() const;
  static HyperParams from_json(const nlohmann::json& j);
};

struct ModelMeta {
  std::vector<std::string> feature_names;
  std::vector<std::string> classes;
  Task task = Task::classification;
  /// Regression targets were fitted as ln(y); predictions are mapped back.
  bool log_target = false;
  std::string fingerprint;
  std::uint64_t seed = 0;
};

class Model {
 public:
  Model() = default;

  static Model train(const LabeledDataset& data, const HyperParams& hp, std::uint64_t seed,
                     bool log_target = false, int worker_count = 1);

  /// Class index for classifiers; target in original units for regressors.
  double predict(std::span<const double> x) const;
  std::vector<double> predict(const std::vector<std::vector<double>>& rows) const;
  /// Regressor output before the inverse log transform.
  double predict_fitted_scale(std::span<const double> x) const;
  std::string predict_label(std::span<const double> x) const;

  const ModelMeta& meta() const noexcept { return meta_; }
  const HyperParams& hyperparams() const noexcept { return hp_; }
  std::size_t arity() const noexcept { return meta_.feature_names.size(); }

  /// Throws DimensionMismatch on feature-name disagreement and
  /// std::invalid_argument on task or label-alphabet disagreement.
  void check_compatible(const LabeledDataset& data) const;

  nlohmann::json to_json() const;
  static Model from_json(const nlohmann::json& j);
  void save(const std::filesystem::path& path) const;
  static Model load(const std::filesystem::path& path);

 private:
  ModelMeta meta_;
  HyperParams hp_;
  std::variant<DecisionTree, RandomForest, NearestCentroid, KnnRegressor> impl_;
};

/// Scores a model on a holdout. Regressors with a log target are scored in
/// log space (ln of truth vs fitted-scale prediction).
EvalReport evaluate(const Model& model, const LabeledDataset& holdout);

}  // namespace autospmv
