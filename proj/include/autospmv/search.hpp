#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "autospmv/model.hpp"

namespace autospmv {

/// Discrete hyperparameter ranges; each trial draws one value per knob.
struct SearchSpace {
  LearnerKind kind = LearnerKind::decision_tree;
  std::vector<std::pair<std::string, std::vector<std::string>>> knobs;

  std::size_t point_count() const;
  nlohmann::json to_json() const;
};

/// criterion x max_depth {none, 1..20} x min_samples_leaf {1..5}.
SearchSpace decision_tree_space(Task task);
/// criterion x n_estimators {50, 100, 150, 200} x max_depth {none, 5, 10, 15, 20}.
SearchSpace random_forest_space(Task task);
SearchSpace nearest_centroid_space();
SearchSpace knn_space();

struct TrialRecord {
  int trial = 0;
  std::vector<std::pair<std::string, std::string>> choice;
  /// Holdout accuracy (classification) or MSE (regression).
  double score = 0.0;

  friend bool operator==(const TrialRecord&, const TrialRecord&) = default;
};

struct SearchResult {
  Model best;
  EvalReport report;
  std::vector<TrialRecord> log;
  int best_trial = 0;
};

struct SearchOptions {
  int trials = 20;
  double train_fraction = 0.8;
  std::uint64_t seed = 0;
  bool log_target = false;
  int worker_count = 1;
};

/// Trial t samples with its own stream mix_seed(seed, t), so a longer search
/// repeats a shorter one's trials as a prefix. Best is the highest accuracy
/// or lowest MSE; ties keep the earliest trial.
SearchResult random_search(const SearchSpace& space, const LabeledDataset& data,
                           const SearchOptions& opts);

/// Same search over a caller-chosen split (for grouped holdouts).
SearchResult random_search(const SearchSpace& space, const LabeledDataset& train,
                           const LabeledDataset& holdout, const SearchOptions& opts);

}  // namespace autospmv
