#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <vector>

#include "autospmv/formats.hpp"
#include "autospmv/model.hpp"
#include "autospmv/overheads.hpp"
#include "json.hpp"

namespace autospmv {

struct OverheadModelOptions {
  int n_estimators = 100;
  std::optional<int> max_depth;
  /// Off by default: every split sees all features (plain bagging), which
  /// tracks a law dominated by one feature far better than d/3 subsets.
  bool feature_subsampling = false;
  std::uint64_t seed = 0;
  double train_fraction = 0.8;
  int worker_count = 1;
  /// Fit seconds per stored slot (nnz, or n * max_nnz for ELL) and scale
  /// back, so the forest learns a rate instead of extrapolating size.
  bool storage_scaled = true;
  /// When the observations carry no o_latency, time predict_f + predict_c
  /// on the training features instead.
  bool time_prediction = true;
};

enum class TargetScale { none, nnz, ell_slots };
std::string_view to_string(TargetScale s);

/// Stored slots the conversion writes, at least 1.
double target_scale(TargetScale s, const SparsityFeatures& f);

/// A fitted overhead regressor with its holdout scores. The model predicts
/// seconds / target_scale (fitted in log space when every target is
/// positive); `raw` scores predicted seconds, `log_space` their logarithm.
struct OverheadRegressor {
  Model model;
  TargetScale scale = TargetScale::none;
  std::size_t train_count = 0;
  std::size_t holdout_count = 0;
  std::optional<EvalReport> log_space;
  std::optional<EvalReport> raw;
};

class OverheadModel {
 public:
  /// Needs at least 10 observations. Formats with fewer than two measured
  /// conversions get no regressor.
  static OverheadModel train(const std::vector<OverheadObservation>& obs,
                             const OverheadModelOptions& opts = {});

  /// Seconds, clamped to >= 0.
  std::optional<double> predict_f(const SparsityFeatures& f) const;
  std::optional<double> predict_c(const SparsityFeatures& f, Format target) const;

  double o_latency() const noexcept { return o_latency_; }
  double p_latency() const noexcept { return p_latency_; }
  void set_o_latency(double s) { o_latency_ = s; }
  void set_p_latency(double s) { p_latency_ = s; }

  const std::optional<OverheadRegressor>& f_regressor() const noexcept { return f_; }
  const std::optional<OverheadRegressor>& c_regressor(Format target) const {
    return c_[static_cast<std::size_t>(target)];
  }

  /// Holdout scores of every regressor; no model parameters.
  nlohmann::json report_json() const;

  nlohmann::json to_json() const;
  static OverheadModel from_json(const nlohmann::json& j);
  void save(const std::filesystem::path& path) const;
  static OverheadModel load(const std::filesystem::path& path);

 private:
  std::optional<OverheadRegressor> f_;
  std::array<std::optional<OverheadRegressor>, 4> c_;
  double o_latency_ = 0.0;
  double p_latency_ = 0.0;
};

}  // namespace autospmv
