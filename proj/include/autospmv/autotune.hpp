#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "autospmv/config_space.hpp"
#include "autospmv/labeling.hpp"
#include "autospmv/model.hpp"
#include "autospmv/overhead_model.hpp"
#include "autospmv/search.hpp"
#include "autospmv/sweep.hpp"
#include "json.hpp"

namespace autospmv {

// ---------------------------------------------------------------------------
// Training

struct DimensionClassifier {
  std::string dimension;
  Model model;
  EvalReport report;
  std::vector<TrialRecord> trials;
  int best_trial = 0;
  /// Only one label value occurred; the model always predicts it.
  bool degenerate = false;
  std::string fingerprint;  // of the serialized model
};

struct LatencyRegressor {
  Model model;
  std::optional<EvalReport> report;  // ln(seconds) space
  std::string fingerprint;
};

struct ModelBundle {
  Objective objective;
  ConfigSpace space;
  std::uint64_t seed = 0;
  std::string dataset_fingerprint;
  std::vector<std::string> train_ids;
  std::vector<std::string> holdout_ids;
  std::vector<std::string> dropped_ids;
  std::vector<DimensionClassifier> classifiers;  // space order
  std::optional<LatencyRegressor> latency;
  nlohmann::json search_space;

  const DimensionClassifier& classifier(std::string_view dimension) const;

  /// bundle.json, classifier_<dim>.json, latency.json, train_report.json.
  void save(const std::filesystem::path& dir) const;
  static ModelBundle load(const std::filesystem::path& dir);

  nlohmann::json manifest_json() const;
  nlohmann::json train_report_json() const;
};

struct TrainOptions {
  LearnerKind classifier = LearnerKind::decision_tree;
  int trials = 20;
  double train_fraction = 0.8;
  std::uint64_t seed = 0;
  bool latency_regressor = true;
  int latency_trees = 100;
  /// Per-split feature subsets for the latency forest; off means bagging.
  bool latency_feature_subsampling = false;
  int worker_count = 1;
};

/// Labels the dataset, splits the labeled matrices (not records) into
/// train/holdout, tunes one classifier per dimension by random search and
/// fits the latency regressor on the training matrices' feasible records.
ModelBundle train_pipeline(const SweepDataset& ds, const Objective& objective,
                           const TrainOptions& opts = {});

/// Latency-regressor input: the sparsity features followed by one
/// declared-order value index per dimension (named cfg_<dimension>).
std::vector<std::string> latency_feature_names(const ConfigSpace& space);
std::vector<double> latency_row(const ConfigSpace& space, const SparsityFeatures& f,
                                const ConfigPoint& p);

// ---------------------------------------------------------------------------
// Compile-time mode

/// Classifier output per dimension. Throws DimensionMismatch when a
/// classifier was trained on other features.
ConfigPoint predict_config(const ModelBundle& bundle, const SparsityFeatures& f);

/// Advisory flag text for the non-format dimensions, space order.
std::string render_flags(const ConfigSpace& space, const ConfigPoint& p);

struct CompileTimeOptions {
  /// Time recommended vs default config (executable spaces only).
  bool verify = false;
  TimingParams timing;
  FormatOptions formats;
};

struct Recommendation {
  std::string matrix_id;
  Objective objective;
  std::vector<std::string> dimensions;
  /// Every classifier's answer, format included.
  ConfigPoint predicted;
  /// What this mode applies: `predicted` with format fixed to csr.
  ConfigPoint config;
  std::string flags;
  std::vector<std::pair<std::string, std::string>> model_fingerprints;
  std::optional<double> default_latency_seconds;
  std::optional<double> recommended_latency_seconds;

  std::optional<double> measured_improvement_percent() const;
  /// `measured` holds the timings; everything else is deterministic.
  nlohmann::json to_json() const;
  static Recommendation from_json(const nlohmann::json& j);
};

Recommendation compile_time_optimize(const NamedMatrix& m, const ModelBundle& bundle,
                                     const CompileTimeOptions& opts = {});

// ---------------------------------------------------------------------------
// Run-time mode

/// Estimates the run-time mode consumes. Built from trained models by
/// make_predictors, or injected directly.
struct RuntimePredictors {
  std::function<Format(const SparsityFeatures&)> best_format;
  /// Seconds per SpMV of the format at the exec config below.
  std::function<std::optional<double>(const SparsityFeatures&, Format)> latency;
  std::function<std::optional<double>(const SparsityFeatures&)> f_latency;
  std::function<std::optional<double>(const SparsityFeatures&, Format)> c_latency;
  /// Best known exec config; unset keeps the defaults.
  std::function<ExecConfig(const SparsityFeatures&)> exec_config;
  double o_latency = 0.0;
  double p_latency = 0.0;
};

/// Needs a format dimension with values every Format parser accepts and a
/// latency regressor in the bundle.
RuntimePredictors make_predictors(const ModelBundle& bundle, const OverheadModel& overhead);

/// convert iff iterations * gain_per_iteration > overhead.
bool gate(std::uint64_t iterations, double gain_per_iteration, double overhead_seconds);

enum class Verdict { convert, keep_default };
std::string_view to_string(Verdict v);

struct RuntimeDecision {
  std::string matrix_id;
  Format default_format = Format::csr;
  Format predicted_format = Format::csr;
  std::uint64_t expected_iterations = 1;
  double gain_per_iteration_seconds = 0.0;
  double predicted_gain_seconds = 0.0;
  double predicted_overhead_seconds = 0.0;
  double f_latency = 0.0;
  double c_latency = 0.0;
  double o_latency = 0.0;
  double p_latency = 0.0;
  Verdict verdict = Verdict::keep_default;
  std::string reason;
  ExecConfig exec;
  std::optional<double> actual_conversion_seconds;

  nlohmann::json to_json() const;
};

struct RuntimeOptions {
  FormatOptions formats;
  /// Convert and time the conversion when the verdict is convert.
  bool perform_conversion = true;
};

/// Throws std::invalid_argument when expected_iterations < 1. A predicted
/// format that fails the memory guard, or lacks a latency or conversion
/// estimate, yields keep_default with the reason recorded and zero gain.
RuntimeDecision run_time_optimize(const NamedMatrix& m, const RuntimePredictors& predictors,
                                  std::uint64_t expected_iterations,
                                  const RuntimeOptions& opts = {});

}  // namespace autospmv
