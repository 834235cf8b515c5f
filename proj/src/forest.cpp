#include "autospmv/forest.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <numeric>
#include <stdexcept>

#include "autospmv/random.hpp"

namespace autospmv {

void ForestParams::validate() const {
  if (n_estimators < 1) throw std::invalid_argument("n_estimators must be >= 1");
  if (worker_count < 1) throw std::invalid_argument("worker_count must be >= 1");
  tree.validate();
}

int default_max_features(Task task, std::size_t arity) {
  const auto d = static_cast<double>(arity);
  if (task == Task::classification) return std::max(1, static_cast<int>(std::ceil(std::sqrt(d))));
  return std::max(1, static_cast<int>(arity / 3));
}

RandomForest RandomForest::fit(const LabeledDataset& data, const ForestParams& params,
                               std::uint64_t seed) {
  params.validate();
  data.validate();
  if (data.size() == 0) throw std::invalid_argument("cannot fit a forest on an empty dataset");

  TreeParams tp = params.tree;
  if (params.feature_subsampling) {
    if (!tp.max_features) tp.max_features = default_max_features(data.task, data.arity());
  } else {
    tp.max_features.reset();
  }

  RandomForest forest;
  forest.task_ = data.task;
  forest.arity_ = data.arity();
  forest.n_classes_ = data.task == Task::classification ? data.n_classes() : 0;
  forest.trees_.resize(static_cast<std::size_t>(params.n_estimators));

  const std::size_t n = data.size();
  std::exception_ptr failure;
#pragma omp parallel for num_threads(params.worker_count) if (params.worker_count > 1) \
    schedule(dynamic, 1)
  for (int i = 0; i < params.n_estimators; ++i) {
    try {
      const std::uint64_t tree_seed = mix_seed(seed, static_cast<std::uint64_t>(i));
      Rng rng(tree_seed);
      std::vector<std::size_t> rows(n);
      if (params.bootstrap) {
        for (auto& r : rows) r = rng.uniform_index(n);
      } else {
        std::iota(rows.begin(), rows.end(), std::size_t{0});
      }
      forest.trees_[static_cast<std::size_t>(i)] = DecisionTree::fit(data, rows, tp, rng.next());
    } catch (...) {
#pragma omp critical(forest_failure)
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
  return forest;
}

double RandomForest::predict(std::span<const double> x) const {
  if (trees_.empty()) throw std::logic_error("forest is not fitted");
  if (task_ == Task::regression) {
    double sum = 0.0;
    for (const auto& t : trees_) sum += t.predict(x);
    return sum / static_cast<double>(trees_.size());
  }
  std::vector<int> votes(n_classes_, 0);
  for (const auto& t : trees_) ++votes[static_cast<std::size_t>(t.predict(x))];
  return static_cast<double>(std::max_element(votes.begin(), votes.end()) - votes.begin());
}

std::vector<double> RandomForest::predict(const std::vector<std::vector<double>>& rows) const {
  std::vector<double> out;
  out.reserve(rows.size());
  for (const auto& r : rows) out.push_back(predict(r));
  return out;
}

nlohmann::json RandomForest::to_json() const {
  nlohmann::json j;
  j["task"] = task_ == Task::classification ? "classification" : "regression";
  j["arity"] = arity_;
  j["n_classes"] = n_classes_;
  auto& trees = j["trees"] = nlohmann::json::array();
  for (const auto& t : trees_) trees.push_back(t.to_json());
  return j;
}

RandomForest RandomForest::from_json(const nlohmann::json& j) {
  RandomForest f;
  f.task_ = j.at("task").get<std::string>() == "regression" ? Task::regression
                                                             : Task::classification;
  f.arity_ = j.at("arity").get<std::size_t>();
  f.n_classes_ = j.at("n_classes").get<std::size_t>();
  for (const auto& t : j.at("trees")) {
    auto tree = DecisionTree::from_json(t);
    if (tree.arity() != f.arity_ || tree.task() != f.task_ || tree.n_classes() != f.n_classes_) {
      throw std::invalid_argument("forest member disagrees with forest header");
    }
    f.trees_.push_back(std::move(tree));
  }
  if (f.trees_.empty()) throw std::invalid_argument("forest has no trees");
  return f;
}

}  // namespace autospmv
