#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "autospmv/dataset.hpp"
#include "json.hpp"

namespace autospmv {

enum class Criterion { gini, entropy, squared_error };

std::string_view to_string(Criterion c);
std::optional<Criterion> parse_criterion(std::string_view name);

struct TreeParams {
  Criterion criterion = Criterion::gini;
  std::optional<int> max_depth;  // nullopt: grow until pure or too small
  int min_samples_leaf = 1;
  /// Features examined per split; nullopt examines all of them.
  std::optional<int> max_features;

  void validate() const;
};

struct TreeNode {
  int feature = -1;  // -1 marks a leaf
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  std::size_t samples = 0;
  /// Class counts for classification leaves, {mean} for regression leaves.
  std::vector<double> value;

  bool is_leaf() const noexcept { return feature < 0; }
  friend bool operator==(const TreeNode&, const TreeNode&) = default;
};

/// CART tree over axis-aligned splits. Prediction goes left when
/// x[feature] <= threshold.
class DecisionTree {
 public:
  DecisionTree() = default;

  static DecisionTree fit(const LabeledDataset& data, const TreeParams& params,
                          std::uint64_t seed = 0);

  /// Fit on a multiset of row indices (duplicates allowed, as in bootstrap).
  static DecisionTree fit(const LabeledDataset& data, std::span<const std::size_t> rows,
                          const TreeParams& params, std::uint64_t seed = 0);

  /// Class index (as a double) or regression value.
  double predict(std::span<const double> x) const;
  std::vector<double> predict(const std::vector<std::vector<double>>& rows) const;

  const TreeNode& leaf_for(std::span<const double> x) const;

  Task task() const noexcept { return task_; }
  std::size_t arity() const noexcept { return arity_; }
  std::size_t n_classes() const noexcept { return n_classes_; }
  const TreeParams& params() const noexcept { return params_; }
  const std::vector<TreeNode>& nodes() const noexcept { return nodes_; }

  /// Longest root-to-leaf path, in edges.
  int depth() const;
  std::size_t leaf_count() const;

  nlohmann::json to_json() const;
  static DecisionTree from_json(const nlohmann::json& j);

  friend bool operator==(const DecisionTree& a, const DecisionTree& b) {
    return a.task_ == b.task_ && a.arity_ == b.arity_ && a.n_classes_ == b.n_classes_ &&
           a.nodes_ == b.nodes_;
  }

 private:
  Task task_ = Task::classification;
  std::size_t arity_ = 0;
  std::size_t n_classes_ = 0;
  TreeParams params_;
  std::vector<TreeNode> nodes_;

  friend class TreeBuilder;
};

nlohmann::json tree_params_to_json(const TreeParams& p);
TreeParams tree_params_from_json(const nlohmann::json& j);

}  // namespace autospmv
