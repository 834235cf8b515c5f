#include "autospmv/overhead_model.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <stdexcept>
#include <string>

#include "autospmv/random.hpp"
#include "autospmv/timing.hpp"

namespace autospmv {

namespace {

using Target = std::function<std::optional<double>(const OverheadObservation&)>;

std::vector<double> row_of(const SparsityFeatures& f) {
  const auto a = f.to_array();
  return {a.begin(), a.end()};
}

double log_variance(const std::vector<double>& v) {
  double mean = 0.0;
  for (double x : v) mean += std::log(x);
  mean /= static_cast<double>(v.size());
  double ss = 0.0;
  for (double x : v) ss += (std::log(x) - mean) * (std::log(x) - mean);
  return ss / static_cast<double>(v.size());
}

/// Keep the storage scale only if dividing by it makes the positive
/// targets less dispersed in log space; a constant target stays unscaled.
bool scale_explains_growth(const std::vector<double>& ys, const std::vector<double>& scales) {
  if (!std::all_of(ys.begin(), ys.end(), [](double y) { return y > 0.0; })) return false;
  std::vector<double> rates(ys.size());
  for (std::size_t i = 0; i < ys.size(); ++i) rates[i] = ys[i] / scales[i];
  return log_variance(rates) < log_variance(ys);
}

double predict_seconds(const OverheadRegressor& r, const SparsityFeatures& f) {
  return std::max(0.0, r.model.predict(row_of(f)) * target_scale(r.scale, f));
}

std::optional<OverheadRegressor> fit_regressor(const std::vector<OverheadObservation>& obs,
                                               const std::vector<std::size_t>& train_idx,
                                               const std::vector<std::size_t>& holdout_idx,
                                               const Target& target, TargetScale scale,
                                               const HyperParams& hp, std::uint64_t seed,
                                               int worker_count) {
  std::vector<std::vector<double>> rows;
  std::vector<double> ys, scales;
  for (auto i : train_idx) {
    if (auto y = target(obs[i])) {
      rows.push_back(row_of(obs[i].features));
      ys.push_back(*y);
      scales.push_back(target_scale(scale, obs[i].features));
    }
  }
  if (ys.size() < 2) return std::nullopt;
  if (scale != TargetScale::none && !scale_explains_growth(ys, scales)) scale = TargetScale::none;
  for (std::size_t i = 0; i < ys.size(); ++i) {
    if (scale != TargetScale::none) ys[i] /= scales[i];
  }
  const bool log_target = std::all_of(ys.begin(), ys.end(), [](double y) { return y > 0.0; });

  OverheadRegressor r;
  r.scale = scale;
  r.train_count = ys.size();
  r.model = Model::train(make_regression(SparsityFeatures::names(), std::move(rows), std::move(ys)),
                         hp, seed, log_target, worker_count);

  std::vector<double> truth, pred;
  for (auto i : holdout_idx) {
    if (auto y = target(obs[i])) {
      truth.push_back(*y);
      pred.push_back(predict_seconds(r, obs[i].features));
    }
  }
  r.holdout_count = truth.size();
  if (truth.empty()) return r;
  r.raw = evaluate_regression(truth, pred);
  auto positive = [](const std::vector<double>& v) {
    return std::all_of(v.begin(), v.end(), [](double y) { return y > 0.0; });
  };
  if (positive(truth) && positive(pred)) {
    for (auto& y : truth) y = std::log(y);
    for (auto& y : pred) y = std::log(y);
    r.log_space = evaluate_regression(truth, pred);
  }
  return r;
}

std::optional<double> clamped(const std::optional<OverheadRegressor>& r,
                              const SparsityFeatures& f) {
  if (!r) return std::nullopt;
  return predict_seconds(*r, f);
}

nlohmann::json scores_json(const OverheadRegressor& r) {
  nlohmann::json j;
  j["train_count"] = r.train_count;
  j["holdout_count"] = r.holdout_count;
  j["log_space"] = r.log_space ? r.log_space->to_json() : nlohmann::json(nullptr);
  j["raw"] = r.raw ? r.raw->to_json() : nlohmann::json(nullptr);
  j["target_scale"] = to_string(r.scale);
  return j;
}

nlohmann::json regressor_json(const std::optional<OverheadRegressor>& r) {
  if (!r) return nullptr;
  auto j = scores_json(*r);
  j["model"] = r->model.to_json();
  return j;
}

std::optional<OverheadRegressor> regressor_from_json(const nlohmann::json& j) {
  if (j.is_null()) return std::nullopt;
  OverheadRegressor r;
  r.model = Model::from_json(j.at("model"));
  const auto scale = j.at("target_scale").get<std::string>();
  if (scale == "none") {
    r.scale = TargetScale::none;
  } else if (scale == "nnz") {
    r.scale = TargetScale::nnz;
  } else if (scale == "ell_slots") {
    r.scale = TargetScale::ell_slots;
  } else {
    throw std::invalid_argument("overhead model: unknown target_scale '" + scale + "'");
  }
  if (r.model.meta().task != Task::regression ||
      r.model.meta().feature_names != SparsityFeatures::names()) {
    throw std::invalid_argument("overhead model: regressor does not take the sparsity features");
  }
  r.train_count = j.at("train_count").get<std::size_t>();
  r.holdout_count = j.at("holdout_count").get<std::size_t>();
  if (!j.at("log_space").is_null()) r.log_space = EvalReport::from_json(j.at("log_space"));
  if (!j.at("raw").is_null()) r.raw = EvalReport::from_json(j.at("raw"));
  return r;
}

}  // namespace

std::string_view to_string(TargetScale s) {
  switch (s) {
    case TargetScale::none: return "none";
    case TargetScale::nnz: return "nnz";
    case TargetScale::ell_slots: return "ell_slots";
  }
  return "none";
}

double target_scale(TargetScale s, const SparsityFeatures& f) {
  switch (s) {
    case TargetScale::none: return 1.0;
    case TargetScale::nnz: return std::max(1.0, f.nnz);
    case TargetScale::ell_slots:
      return std::max(1.0, f.ell_ratio > 0.0 ? f.nnz / f.ell_ratio : f.nnz);
  }
  return 1.0;
}

OverheadModel OverheadModel::train(const std::vector<OverheadObservation>& obs,
                                   const OverheadModelOptions& opts) {
  if (obs.size() < 10) {
    throw std::invalid_argument("overhead model needs at least 10 observations, got " +
                                std::to_string(obs.size()));
  }
  const auto [train_idx, holdout_idx] = split_indices(obs.size(), opts.train_fraction, opts.seed);

  HyperParams hp;
  hp.kind = LearnerKind::random_forest;
  hp.n_estimators = opts.n_estimators;
  hp.tree.criterion = Criterion::squared_error;
  hp.tree.max_depth = opts.max_depth;
  hp.feature_subsampling = opts.feature_subsampling;

  const auto scaled = [&](TargetScale s) { return opts.storage_scaled ? s : TargetScale::none; };

  OverheadModel m;
  m.f_ = fit_regressor(
      obs, train_idx, holdout_idx,
      [](const OverheadObservation& o) { return std::optional<double>(o.f_latency); },
      scaled(TargetScale::nnz), hp, mix_seed(opts.seed, 100), opts.worker_count);
  for (Format fmt : kAllFormats) {
    const auto k = static_cast<std::size_t>(fmt);
    m.c_[k] = fit_regressor(
        obs, train_idx, holdout_idx,
        [fmt](const OverheadObservation& o) { return o.conversion(fmt); },
        scaled(fmt == Format::ell ? TargetScale::ell_slots : TargetScale::nnz), hp,
        mix_seed(opts.seed, 101 + k), opts.worker_count);
  }

  double o_sum = 0.0, p_sum = 0.0;
  for (const auto& o : obs) {
    o_sum += o.o_latency;
    p_sum += o.p_latency;
  }
  m.o_latency_ = o_sum / static_cast<double>(obs.size());
  m.p_latency_ = p_sum / static_cast<double>(obs.size());

  if (m.o_latency_ == 0.0 && opts.time_prediction) {
    std::optional<Format> probe;
    for (Format fmt : kAllFormats) {
      if (m.c_regressor(fmt)) {
        probe = fmt;
        break;
      }
    }
    std::size_t next = 0;
    double sink = 0.0;
    const TimingParams quick{Seconds{0.02}, 10000, 1};
    m.o_latency_ = time_kernel(
                       [&] {
                         const auto& f = obs[next++ % obs.size()].features;
                         sink += m.predict_f(f).value_or(0.0);
                         if (probe) sink += m.predict_c(f, *probe).value_or(0.0);
                       },
                       quick)
                       .mean_seconds;
    (void)sink;
  }
  return m;
}

std::optional<double> OverheadModel::predict_f(const SparsityFeatures& f) const {
  return clamped(f_, f);
}

std::optional<double> OverheadModel::predict_c(const SparsityFeatures& f, Format target) const {
  return clamped(c_[static_cast<std::size_t>(target)], f);
}

nlohmann::json OverheadModel::report_json() const {
  nlohmann::json j;
  j["f_latency"] = f_ ? scores_json(*f_) : nlohmann::json(nullptr);
  auto& c = j["c_latency"] = nlohmann::json::object();
  for (Format fmt : kAllFormats) {
    const auto& r = c_regressor(fmt);
    c[std::string(to_string(fmt))] = r ? scores_json(*r) : nlohmann::json(nullptr);
  }
  j["o_latency"] = o_latency_;
  j["p_latency"] = p_latency_;
  j["target_transform"] =
      "ln(seconds / target_scale); raw scores on predicted seconds, log_space on their ln";
  return j;
}

nlohmann::json OverheadModel::to_json() const {
  nlohmann::json j;
  j["format"] = "autospmv-overhead-model";
  j["version"] = 1;
  j["f_latency"] = regressor_json(f_);
  auto& c = j["c_latency"] = nlohmann::json::object();
  for (Format fmt : kAllFormats) c[std::string(to_string(fmt))] = regressor_json(c_regressor(fmt));
  j["o_latency"] = o_latency_;
  j["p_latency"] = p_latency_;
  return j;
}

OverheadModel OverheadModel::from_json(const nlohmann::json& j) {
  try {
    if (j.at("format").get<std::string>() != "autospmv-overhead-model") {
      throw std::invalid_argument("not an overhead model file");
    }
    if (j.at("version").get<int>() != 1) {
      throw std::invalid_argument("unsupported overhead model version");
    }
    OverheadModel m;
    m.f_ = regressor_from_json(j.at("f_latency"));
    for (Format fmt : kAllFormats) {
      m.c_[static_cast<std::size_t>(fmt)] =
          regressor_from_json(j.at("c_latency").at(std::string(to_string(fmt))));
    }
    m.o_latency_ = j.at("o_latency").get<double>();
    m.p_latency_ = j.at("p_latency").get<double>();
    if (m.o_latency_ < 0 || m.p_latency_ < 0) {
      throw std::invalid_argument("overhead model: negative prediction latency");
    }
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("overhead model: ") + e.what());
  }
}

void OverheadModel::save(const std::filesystem::path& path) const {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << to_json().dump(1) << '\n';
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

OverheadModel OverheadModel::load(const std::filesystem::path& path) {
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

}  // namespace autospmv
