#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace autospmv {

enum class Task { classification, regression };

/// Feature rows with either class labels or real targets.
///
/// For classification `targets[i]` holds an index into `classes`, which is
/// kept sorted so that "lowest class index" and "lexicographically smallest
/// label" coincide.
struct LabeledDataset {
  std::vector<std::string> feature_names;
  Task task = Task::classification;
  std::vector<std::string> classes;
  std::vector<std::vector<double>> rows;
  std::vector<double> targets;

  std::size_t size() const noexcept { return rows.size(); }
  std::size_t arity() const noexcept { return feature_names.size(); }
  std::size_t n_classes() const noexcept { return classes.size(); }
  int label_of(std::size_t i) const { return static_cast<int>(targets[i]); }

  /// Throws std::invalid_argument on ragged rows or out-of-alphabet labels.
  void validate() const;
};

LabeledDataset make_classification(std::vector<std::string> feature_names,
                                   std::vector<std::vector<double>> rows,
                                   const std::vector<std::string>& labels);

LabeledDataset make_regression(std::vector<std::string> feature_names,
                               std::vector<std::vector<double>> rows,
                               std::vector<double> targets);

/// Rows picked by index; keeps names and the full label alphabet.
LabeledDataset subset(const LabeledDataset& data, std::span<const std::size_t> indices);

/// Seeded shuffle split: the first round(train_fraction * n) shuffled indices
/// train, the rest hold out. Both sides are non-empty when n >= 2.
std::pair<std::vector<std::size_t>, std::vector<std::size_t>> split_indices(
    std::size_t n, double train_fraction, std::uint64_t seed);

/// FNV-1a over names, labels and the bit patterns of every value.
std::string fingerprint(const LabeledDataset& data);
/// FNV-1a of arbitrary bytes, as 16 hex digits.
std::string text_fingerprint(std::string_view text);

/// Per-feature standardization fitted on training rows. Constant features
/// (std == 0) pass through centered but unscaled.
struct FeatureScaler {
  std::vector<double> mean;
  std::vector<double> scale;

  static FeatureScaler fit(const std::vector<std::vector<double>>& rows);
  std::vector<double> transform(std::span<const double> x) const;
};

}  // namespace autospmv
