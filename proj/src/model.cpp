#include "autospmv/model.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>

#include "autospmv/common.hpp"
#include "autospmv/numeric_text.hpp"

namespace autospmv {

namespace {

constexpr const char* kModelFormat = "autospmv-model";
constexpr int kModelVersion = 1;

int parse_int_knob(std::string_view name, std::string_view value) {
  const auto v = parse_int(value);
  if (!v) throw std::invalid_argument("hyperparameter " + std::string(name) + ": '" +
                                      std::string(value) + "' is not an integer");
  return static_cast<int>(*v);
}

const char* task_name(Task t) { return t == Task::classification ? "classification" : "regression"; }

Task parse_task(const std::string& s) {
  if (s == "classification") return Task::classification;
  if (s == "regression") return Task::regression;
  throw std::invalid_argument("unknown task '" + s + "'");
}

}  // namespace

std::string_view to_string(LearnerKind k) {
  switch (k) {
    case LearnerKind::decision_tree: return "decision_tree";
    case LearnerKind::random_forest: return "random_forest";
    case LearnerKind::nearest_centroid: return "nearest_centroid";
    case LearnerKind::knn: return "knn";
  }
  return "?";
}

std::optional<LearnerKind> parse_learner(std::string_view name) {
  for (auto k : {LearnerKind::decision_tree, LearnerKind::random_forest,
                 LearnerKind::nearest_centroid, LearnerKind::knn}) {
    if (name == to_string(k)) return k;
  }
  return std::nullopt;
}

void HyperParams::set(std::string_view name, std::string_view value) {
  if (name == "criterion") {
    const auto c = parse_criterion(value);
    if (!c) throw std::invalid_argument("unknown criterion '" + std::string(value) + "'");
    tree.criterion = *c;
  } else if (name == "max_depth") {
    if (value == "none") {
      tree.max_depth.reset();
    } else {
      tree.max_depth = parse_int_knob(name, value);
    }
  } else if (name == "min_samples_leaf") {
    tree.min_samples_leaf = parse_int_knob(name, value);
  } else if (name == "max_features") {
    if (value == "none") {
      tree.max_features.reset();
    } else {
      tree.max_features = parse_int_knob(name, value);
    }
  } else if (name == "n_estimators") {
    n_estimators = parse_int_knob(name, value);
  } else if (name == "bootstrap") {
    if (value != "true" && value != "false") throw std::invalid_argument("bootstrap is true|false");
    bootstrap = value == "true";
  } else if (name == "metric") {
    const auto m = parse_metric(value);
    if (!m) throw std::invalid_argument("unknown metric '" + std::string(value) + "'");
    metric = *m;
  } else if (name == "k") {
    k = parse_int_knob(name, value);
  } else {
    throw std::invalid_argument("unknown hyperparameter '" + std::string(name) + "'");
  }
}

nlohmann::json HyperParams::to_json() const {
  return {{"learner", to_string(kind)},
          {"tree", tree_params_to_json(tree)},
          {"n_estimators", n_estimators},
          {"bootstrap", bootstrap},
          {"feature_subsampling", feature_subsampling},
          {"metric", to_string(metric)},
          {"k", k}};
}

HyperParams HyperParams::from_json(const nlohmann::json& j) {
  HyperParams hp;
  const auto kind = parse_learner(j.at("learner").get<std::string>());
  if (!kind) throw std::invalid_argument("unknown learner in model file");
  hp.kind = *kind;
  hp.tree = tree_params_from_json(j.at("tree"));
  hp.n_estimators = j.at("n_estimators").get<int>();
  hp.bootstrap = j.at("bootstrap").get<bool>();
  hp.feature_subsampling = j.at("feature_subsampling").get<bool>();
  const auto metric = parse_metric(j.at("metric").get<std::string>());
  if (!metric) throw std::invalid_argument("unknown metric in model file");
  hp.metric = *metric;
  hp.k = j.at("k").get<int>();
  return hp;
}

Model Model::train(const LabeledDataset& data, const HyperParams& hp, std::uint64_t seed,
                   bool log_target, int worker_count) {
  data.validate();
  if (data.size() < 2) throw std::invalid_argument("training needs at least 2 rows");

  Model m;
  m.hp_ = hp;
  m.meta_.feature_names = data.feature_names;
  m.meta_.classes = data.classes;
  m.meta_.task = data.task;
  m.meta_.log_target = log_target && data.task == Task::regression;
  m.meta_.fingerprint = fingerprint(data);
  m.meta_.seed = seed;

  if (data.task == Task::regression) {
    m.hp_.tree.criterion = Criterion::squared_error;
  } else if (hp.tree.criterion == Criterion::squared_error) {
    throw std::invalid_argument("squared_error is a regression criterion");
  }

  const LabeledDataset* fit_data = &data;
  LabeledDataset logged;
  if (m.meta_.log_target) {
    logged = data;
    for (auto& t : logged.targets) {
      if (!(t > 0.0)) throw std::invalid_argument("log target requires positive targets");
      t = std::log(t);
    }
    fit_data = &logged;
  }

  switch (hp.kind) {
    case LearnerKind::decision_tree:
      m.impl_ = DecisionTree::fit(*fit_data, m.hp_.tree, seed);
      break;
    case LearnerKind::random_forest: {
      ForestParams fp;
      fp.n_estimators = m.hp_.n_estimators;
      fp.tree = m.hp_.tree;
      fp.bootstrap = m.hp_.bootstrap;
      fp.feature_subsampling = m.hp_.feature_subsampling;
      fp.worker_count = worker_count;
      m.impl_ = RandomForest::fit(*fit_data, fp, seed);
      break;
    }
    case LearnerKind::nearest_centroid:
      m.impl_ = NearestCentroid::fit(*fit_data, m.hp_.metric);
      break;
    case LearnerKind::knn:
      m.impl_ = KnnRegressor::fit(*fit_data, m.hp_.k, m.hp_.metric);
      break;
  }
  return m;
}

double Model::predict_fitted_scale(std::span<const double> x) const {
  if (x.size() != arity()) {
    throw DimensionMismatch("model expects " + std::to_string(arity()) + " features, got " +
                            std::to_string(x.size()));
  }
  return std::visit([&](const auto& impl) { return impl.predict(x); }, impl_);
}

double Model::predict(std::span<const double> x) const {
  const double v = predict_fitted_scale(x);
  return meta_.log_target ? std::exp(v) : v;
}

std::vector<double> Model::predict(const std::vector<std::vector<double>>& rows) const {
  std::vector<double> out;
  out.reserve(rows.size());
  for (const auto& r : rows) out.push_back(predict(r));
  return out;
}

std::string Model::predict_label(std::span<const double> x) const {
  if (meta_.task != Task::classification) throw std::logic_error("regressor has no labels");
  return meta_.classes.at(static_cast<std::size_t>(predict(x)));
}

void Model::check_compatible(const LabeledDataset& data) const {
  if (data.feature_names != meta_.feature_names) {
    throw DimensionMismatch("feature set differs from the model's (" +
                            std::to_string(data.arity()) + " vs " + std::to_string(arity()) +
                            " features)");
  }
  if (data.task != meta_.task) throw std::invalid_argument("dataset task differs from the model's");
  if (data.task == Task::classification) {
    for (std::size_t i = 0; i < data.size(); ++i) {
      const auto& label = data.classes.at(static_cast<std::size_t>(data.label_of(i)));
      if (std::find(meta_.classes.begin(), meta_.classes.end(), label) == meta_.classes.end()) {
        throw std::invalid_argument("label '" + label + "' is outside the model's alphabet");
      }
    }
  }
}

nlohmann::json Model::to_json() const {
  nlohmann::json j;
  j["format"] = kModelFormat;
  j["version"] = kModelVersion;
  j["meta"] = {{"feature_names", meta_.feature_names},
               {"classes", meta_.classes},
               {"task", task_name(meta_.task)},
               {"log_target", meta_.log_target},
               {"fingerprint", meta_.fingerprint},
               {"seed", meta_.seed}};
  j["hyperparams"] = hp_.to_json();
  j["model"] = std::visit([](const auto& impl) { return impl.to_json(); }, impl_);
  return j;
}

Model Model::from_json(const nlohmann::json& j) {
  if (j.value("format", "") != kModelFormat) throw std::invalid_argument("not a model file");
  if (j.at("version").get<int>() != kModelVersion) {
    throw std::invalid_argument("unsupported model version");
  }
  Model m;
  const auto& meta = j.at("meta");
  m.meta_.feature_names = meta.at("feature_names").get<std::vector<std::string>>();
  m.meta_.classes = meta.at("classes").get<std::vector<std::string>>();
  m.meta_.task = parse_task(meta.at("task").get<std::string>());
  m.meta_.log_target = meta.at("log_target").get<bool>();
  m.meta_.fingerprint = meta.at("fingerprint").get<std::string>();
  m.meta_.seed = meta.at("seed").get<std::uint64_t>();
  m.hp_ = HyperParams::from_json(j.at("hyperparams"));

  const auto& body = j.at("model");
  std::size_t body_arity = 0;
  switch (m.hp_.kind) {
    case LearnerKind::decision_tree: {
      auto t = DecisionTree::from_json(body);
      body_arity = t.arity();
      if (t.task() != m.meta_.task || (m.meta_.task == Task::classification &&
                                       t.n_classes() != m.meta_.classes.size())) {
        throw std::invalid_argument("tree disagrees with model metadata");
      }
      m.impl_ = std::move(t);
      break;
    }
    case LearnerKind::random_forest: {
      auto f = RandomForest::from_json(body);
      body_arity = f.arity();
      if (f.task() != m.meta_.task || (m.meta_.task == Task::classification &&
                                       f.trees().front().n_classes() != m.meta_.classes.size())) {
        throw std::invalid_argument("forest disagrees with model metadata");
      }
      m.impl_ = std::move(f);
      break;
    }
    case LearnerKind::nearest_centroid: {
      auto c = NearestCentroid::from_json(body);
      body_arity = c.arity();
      if (c.centroids().size() != m.meta_.classes.size()) {
        throw std::invalid_argument("centroid count disagrees with label alphabet");
      }
      m.impl_ = std::move(c);
      break;
    }
    case LearnerKind::knn: {
      auto k = KnnRegressor::from_json(body);
      body_arity = k.arity();
      m.impl_ = std::move(k);
      break;
    }
  }
  if (body_arity != m.meta_.feature_names.size()) {
    throw DimensionMismatch("model body arity disagrees with its feature names");
  }
  return m;
}

void Model::save(const std::filesystem::path& path) const {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << to_json().dump(1) << '\n';
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

Model Model::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(path.string() + ": " + e.what());
  }
  return from_json(j);
}

EvalReport evaluate(const Model& model, const LabeledDataset& holdout) {
  model.check_compatible(holdout);
  if (holdout.size() == 0) throw std::invalid_argument("cannot evaluate an empty holdout");
  const auto& meta = model.meta();
  std::vector<double> truth, pred;
  truth.reserve(holdout.size());
  pred.reserve(holdout.size());
  for (std::size_t i = 0; i < holdout.size(); ++i) {
    if (meta.task == Task::classification) {
      const auto& label = holdout.classes[static_cast<std::size_t>(holdout.label_of(i))];
      truth.push_back(static_cast<double>(
          std::find(meta.classes.begin(), meta.classes.end(), label) - meta.classes.begin()));
      pred.push_back(model.predict(holdout.rows[i]));
    } else if (meta.log_target) {
      if (!(holdout.targets[i] > 0.0)) throw std::invalid_argument("log target needs y > 0");
      truth.push_back(std::log(holdout.targets[i]));
      pred.push_back(model.predict_fitted_scale(holdout.rows[i]));
    } else {
      truth.push_back(holdout.targets[i]);
      pred.push_back(model.predict(holdout.rows[i]));
    }
  }
  return meta.task == Task::classification
             ? evaluate_classification(truth, pred, meta.classes.size())
             : evaluate_regression(truth, pred);
}

}  // namespace autospmv
