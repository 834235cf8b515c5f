#include "autospmv/autotune.hpp"

#include <algorithm>
#include <chrono>
#include <fstream>
#include <iostream>
#include <memory>
#include <set>
#include <sstream>
#include <stdexcept>

#include "autospmv/common.hpp"
#include "autospmv/dataset_csv.hpp"
#include "autospmv/kernels.hpp"
#include "autospmv/random.hpp"

namespace autospmv {

namespace {

std::vector<double> feature_row(const SparsityFeatures& f) {
  const auto a = f.to_array();
  return {a.begin(), a.end()};
}

std::string model_fingerprint(const Model& m) { return text_fingerprint(m.to_json().dump()); }

SearchSpace classifier_space(LearnerKind kind) {
  switch (kind) {
    case LearnerKind::decision_tree:
      return decision_tree_space(Task::classification);
    case LearnerKind::random_forest:
      return random_forest_space(Task::classification);
    case LearnerKind::nearest_centroid:
      return nearest_centroid_space();
    case LearnerKind::knn:
      break;
  }
  throw std::invalid_argument("knn is a regressor; pick decision_tree, random_forest or "
                              "nearest_centroid for config classifiers");
}

std::string file_stem_for(std::string_view dimension) {
  std::string s;
  for (char c : dimension) {
    const bool keep = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
                      c == '_' || c == '-';
    s.push_back(keep ? c : '_');
  }
  return "classifier_" + s;
}

nlohmann::json objective_json(const Objective& o) {
  return {{"column", o.column}, {"direction", o.direction == Direction::minimize ? "min" : "max"}};
}

Objective objective_from_json(const nlohmann::json& j) {
  return make_objective(j.at("column").get<std::string>(), j.at("direction").get<std::string>());
}

nlohmann::json trials_json(const std::vector<TrialRecord>& trials) {
  auto out = nlohmann::json::array();
  for (const auto& t : trials) {
    nlohmann::json choice = nlohmann::json::object();
    for (const auto& [k, v] : t.choice) choice[k] = v;
    out.push_back({{"trial", t.trial}, {"choice", choice}, {"score", t.score}});
  }
  return out;
}

std::vector<TrialRecord> trials_from_json(const nlohmann::json& j) {
  std::vector<TrialRecord> out;
  for (const auto& t : j) {
    TrialRecord r;
    r.trial = t.at("trial").get<int>();
    for (const auto& [k, v] : t.at("choice").items()) r.choice.emplace_back(k, v.get<std::string>());
    r.score = t.at("score").get<double>();
    out.push_back(std::move(r));
  }
  return out;
}

nlohmann::json read_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  try {
    nlohmann::json j;
    in >> j;
    return j;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

void write_json(const std::filesystem::path& path, const nlohmann::json& j) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path.string());
  out << j.dump(1) << '\n';
  if (!out) throw DataError("write failed: " + path.string());
}

Model load_checked(const std::filesystem::path& path, const std::string& expected_fp) {
  Model m;
  try {
    m = Model::from_json(read_json(path));
  } catch (const std::invalid_argument& e) {
    throw DataError(path.string() + ": " + e.what());
  }
  if (model_fingerprint(m) != expected_fp) {
    throw DataError(path.string() + ": fingerprint does not match bundle.json");
  }
  return m;
}

}  // namespace

// ---------------------------------------------------------------------------
// Training

std::vector<std::string> latency_feature_names(const ConfigSpace& space) {
  auto names = SparsityFeatures::names();
  for (const auto& d : space.dims()) names.push_back("cfg_" + d.name);
  return names;
}

std::vector<double> latency_row(const ConfigSpace& space, const SparsityFeatures& f,
                                const ConfigPoint& p) {
  auto row = feature_row(f);
  for (auto o : space.ordinal(p)) row.push_back(static_cast<double>(o));
  return row;
}

const DimensionClassifier& ModelBundle::classifier(std::string_view dimension) const {
  for (const auto& c : classifiers) {
    if (c.dimension == dimension) return c;
  }
  throw std::invalid_argument("bundle has no classifier for '" + std::string(dimension) + "'");
}

ModelBundle train_pipeline(const SweepDataset& ds, const Objective& objective,
                           const TrainOptions& opts) {
  ds.validate();
  const auto search = classifier_space(opts.classifier);
  const auto labels = label_dataset(ds, objective);
  const auto n = labels.matrix_ids.size();
  if (n < 2) {
    throw DataError("training needs at least two matrices with a feasible '" + objective.column +
                    "' value, found " + std::to_string(n));
  }

  ModelBundle b;
  b.objective = objective;
  b.space = ds.space;
  b.seed = opts.seed;
  b.dropped_ids = labels.dropped;
  b.search_space = search.to_json();
  {
    std::ostringstream csv;
    write_csv(csv, ds);
    b.dataset_fingerprint = text_fingerprint(csv.str());
  }

  auto [train_idx, holdout_idx] = split_indices(n, opts.train_fraction, opts.seed);
  std::sort(train_idx.begin(), train_idx.end());
  std::sort(holdout_idx.begin(), holdout_idx.end());
  for (auto i : train_idx) b.train_ids.push_back(labels.matrix_ids[i]);
  for (auto i : holdout_idx) b.holdout_ids.push_back(labels.matrix_ids[i]);

  for (std::size_t d = 0; d < ds.space.size(); ++d) {
    const auto& data = labels.per_dimension[d];
    SearchOptions so;
    so.trials = opts.trials;
    so.train_fraction = opts.train_fraction;
    so.seed = mix_seed(opts.seed, 200 + d);
    so.worker_count = opts.worker_count;
    auto res = random_search(search, subset(data, train_idx), subset(data, holdout_idx), so);

    DimensionClassifier c;
    c.dimension = ds.space.dims()[d].name;
    c.degenerate = data.n_classes() == 1;
    if (c.degenerate) {
      std::cerr << "warning: every labeled matrix prefers " << c.dimension << "="
                << data.classes.front() << "; the classifier is constant\n";
    }
    c.model = std::move(res.best);
    c.report = res.report;
    c.trials = std::move(res.log);
    c.best_trial = res.best_trial;
    c.fingerprint = model_fingerprint(c.model);
    b.classifiers.push_back(std::move(c));
  }

  if (opts.latency_regressor) {
    const std::set<std::string> train_set(b.train_ids.begin(), b.train_ids.end());
    const std::set<std::string> holdout_set(b.holdout_ids.begin(), b.holdout_ids.end());
    std::vector<std::vector<double>> rows, hrows;
    std::vector<double> ys, hys;
    for (const auto& r : ds.records) {
      if (!r.feasible || !(r.latency_seconds > 0.0)) continue;
      if (train_set.count(r.matrix_id)) {
        rows.push_back(latency_row(ds.space, r.features, r.config));
        ys.push_back(r.latency_seconds);
      } else if (holdout_set.count(r.matrix_id)) {
        hrows.push_back(latency_row(ds.space, r.features, r.config));
        hys.push_back(r.latency_seconds);
      }
    }
    if (ys.size() >= 2) {
      HyperParams hp;
      hp.kind = LearnerKind::random_forest;
      hp.n_estimators = opts.latency_trees;
      hp.tree.criterion = Criterion::squared_error;
      hp.feature_subsampling = opts.latency_feature_subsampling;
      LatencyRegressor lr;
      lr.model = Model::train(make_regression(latency_feature_names(ds.space), std::move(rows),
                                              std::move(ys)),
                              hp, mix_seed(opts.seed, 300), true, opts.worker_count);
      if (!hys.empty()) {
        lr.report = evaluate(lr.model, make_regression(latency_feature_names(ds.space),
                                                       std::move(hrows), std::move(hys)));
      }
      lr.fingerprint = model_fingerprint(lr.model);
      b.latency = std::move(lr);
    }
  }
  return b;
}

nlohmann::json ModelBundle::manifest_json() const {
  nlohmann::json j;
  j["format"] = "autospmv-bundle";
  j["version"] = 1;
  j["objective"] = objective_json(objective);
  j["space"] = space.to_json();
  j["seed"] = seed;
  j["dataset_fingerprint"] = dataset_fingerprint;
  j["train_ids"] = train_ids;
  j["holdout_ids"] = holdout_ids;
  j["dropped_ids"] = dropped_ids;
  auto& cs = j["classifiers"] = nlohmann::json::array();
  for (const auto& c : classifiers) {
    cs.push_back({{"dimension", c.dimension},
                  {"file", file_stem_for(c.dimension) + ".json"},
                  {"fingerprint", c.fingerprint},
                  {"degenerate", c.degenerate}});
  }
  j["latency"] = latency ? nlohmann::json{{"file", "latency.json"},
                                          {"fingerprint", latency->fingerprint}}
                         : nlohmann::json(nullptr);
  return j;
}

nlohmann::json ModelBundle::train_report_json() const {
  nlohmann::json j;
  j["objective"] = objective_json(objective);
  j["dataset_fingerprint"] = dataset_fingerprint;
  j["train_count"] = train_ids.size();
  j["holdout_count"] = holdout_ids.size();
  j["search_space"] = search_space;
  auto& cs = j["classifiers"] = nlohmann::json::array();
  for (const auto& c : classifiers) {
    cs.push_back({{"dimension", c.dimension},
                  {"degenerate", c.degenerate},
                  {"hyperparams", c.model.hyperparams().to_json()},
                  {"best_trial", c.best_trial},
                  {"holdout", c.report.to_json()},
                  {"trials", trials_json(c.trials)}});
  }
  if (latency) {
    j["latency"] = {{"features", latency_feature_names(space)},
                    {"holdout_log_space", latency->report ? latency->report->to_json()
                                                          : nlohmann::json(nullptr)}};
  } else {
    j["latency"] = nullptr;
  }
  j["notes"] = {
      "Hyperparameters are tuned by seeded random search over discrete ranges; each trial "
      "is scored on the holdout matrices.",
      "Latency targets are fitted as ln(seconds) and scored in that space.",
      "Train and holdout are split by matrix, so no matrix contributes to both."};
  return j;
}

void ModelBundle::save(const std::filesystem::path& dir) const {
  std::filesystem::create_directories(dir);
  write_json(dir / "bundle.json", manifest_json());
  for (const auto& c : classifiers) {
    write_json(dir / (file_stem_for(c.dimension) + ".json"), c.model.to_json());
  }
  if (latency) write_json(dir / "latency.json", latency->model.to_json());
  write_json(dir / "train_report.json", train_report_json());
}

ModelBundle ModelBundle::load(const std::filesystem::path& dir) {
  const auto j = read_json(dir / "bundle.json");
  const auto ctx = (dir / "bundle.json").string() + ": ";
  ModelBundle b;
  try {
    if (j.at("format").get<std::string>() != "autospmv-bundle") {
      throw DataError(ctx + "not a model bundle");
    }
    if (j.at("version").get<int>() != 1) throw DataError(ctx + "unsupported bundle version");
    b.objective = objective_from_json(j.at("objective"));
    b.space = ConfigSpace::from_json(j.at("space"));
    b.seed = j.at("seed").get<std::uint64_t>();
    b.dataset_fingerprint = j.at("dataset_fingerprint").get<std::string>();
    b.train_ids = j.at("train_ids").get<std::vector<std::string>>();
    b.holdout_ids = j.at("holdout_ids").get<std::vector<std::string>>();
    b.dropped_ids = j.at("dropped_ids").get<std::vector<std::string>>();

    nlohmann::json report;
    if (std::filesystem::exists(dir / "train_report.json")) {
      report = read_json(dir / "train_report.json");
      b.search_space = report.value("search_space", nlohmann::json(nullptr));
    }
    const auto& cs = j.at("classifiers");
    if (cs.size() != b.space.size()) {
      throw DataError(ctx + "expected one classifier per config dimension");
    }
    for (std::size_t d = 0; d < cs.size(); ++d) {
      DimensionClassifier c;
      c.dimension = cs[d].at("dimension").get<std::string>();
      if (c.dimension != b.space.dims()[d].name) {
        throw DataError(ctx + "classifier order does not follow the config space");
      }
      c.degenerate = cs[d].at("degenerate").get<bool>();
      c.fingerprint = cs[d].at("fingerprint").get<std::string>();
      c.model = load_checked(dir / cs[d].at("file").get<std::string>(), c.fingerprint);
      if (c.model.meta().task != Task::classification) {
        throw DataError(ctx + c.dimension + " model is not a classifier");
      }
      for (const auto& label : c.model.meta().classes) {
        if (!b.space.value_index(d, label)) {
          throw DataError(ctx + c.dimension + " model predicts '" + label +
                          "', which the space does not declare");
        }
      }
      if (report.contains("classifiers") && d < report["classifiers"].size()) {
        const auto& r = report["classifiers"][d];
        c.report = EvalReport::from_json(r.at("holdout"));
        c.trials = trials_from_json(r.at("trials"));
        c.best_trial = r.at("best_trial").get<int>();
      }
      b.classifiers.push_back(std::move(c));
    }
    if (!j.at("latency").is_null()) {
      LatencyRegressor lr;
      lr.fingerprint = j["latency"].at("fingerprint").get<std::string>();
      lr.model = load_checked(dir / j["latency"].at("file").get<std::string>(), lr.fingerprint);
      if (lr.model.meta().feature_names != latency_feature_names(b.space)) {
        throw DataError(ctx + "latency model features do not match the config space");
      }
      if (report.contains("latency") && report["latency"].is_object() &&
          !report["latency"].at("holdout_log_space").is_null()) {
        lr.report = EvalReport::from_json(report["latency"]["holdout_log_space"]);
      }
      b.latency = std::move(lr);
    }
  } catch (const nlohmann::json::exception& e) {
    throw DataError(ctx + e.what());
  } catch (const std::invalid_argument& e) {
    throw DataError(ctx + e.what());
  }
  return b;
}

// ---------------------------------------------------------------------------
// Compile-time mode

ConfigPoint predict_config(const ModelBundle& bundle, const SparsityFeatures& f) {
  const auto row = feature_row(f);
  const auto names = SparsityFeatures::names();
  ConfigPoint p;
  for (const auto& c : bundle.classifiers) {
    if (c.model.meta().feature_names != names) {
      throw DimensionMismatch("classifier for " + c.dimension +
                              " was trained on a different feature schema");
    }
    p.push_back(c.model.predict_label(row));
  }
  if (p.size() != bundle.space.size() || !bundle.space.contains(p)) {
    throw std::logic_error("predicted config lies outside the declared space");
  }
  return p;
}

std::string render_flags(const ConfigSpace& space, const ConfigPoint& p) {
  std::string out;
  for (std::size_t d = 0; d < space.size(); ++d) {
    const auto& name = space.dims()[d].name;
    const auto& v = p.at(d);
    std::string flag;
    if (name == kFormatDim) continue;
    if (name == kWorkerDim) {
      flag = "OMP_NUM_THREADS=" + v;
    } else if (name == kChunkDim) {
      flag = "OMP_SCHEDULE=static," + v;
    } else if (name == "maxrregcount") {
      flag = "--maxrregcount=" + v;
    } else if (name == "tb_size") {
      flag = "--launch-hint tb_size=" + v;
    } else if (name == "memory" || name == "memory_config") {
      flag = "--launch-hint cache_config=" + v;
    } else {
      flag = "--hint " + name + "=" + v;
    }
    if (!out.empty()) out += ' ';
    out += flag;
  }
  return out;
}

std::optional<double> Recommendation::measured_improvement_percent() const {
  if (!default_latency_seconds || !recommended_latency_seconds || !(*default_latency_seconds > 0)) {
    return std::nullopt;
  }
  return (*default_latency_seconds - *recommended_latency_seconds) / *default_latency_seconds *
         100.0;
}

nlohmann::json Recommendation::to_json() const {
  nlohmann::json j;
  j["matrix_id"] = matrix_id;
  j["objective"] = objective_json(objective);
  j["dimensions"] = dimensions;
  auto named = [&](const ConfigPoint& p) {
    nlohmann::json o = nlohmann::json::object();
    for (std::size_t d = 0; d < dimensions.size(); ++d) o[dimensions[d]] = p.at(d);
    return o;
  };
  j["predicted"] = named(predicted);
  j["config"] = named(config);
  j["flags"] = flags;
  nlohmann::json fps = nlohmann::json::object();
  for (const auto& [dim, fp] : model_fingerprints) fps[dim] = fp;
  j["models"] = fps;
  if (default_latency_seconds || recommended_latency_seconds) {
    nlohmann::json m;
    m["default_latency_seconds"] = default_latency_seconds.value_or(0.0);
    m["recommended_latency_seconds"] = recommended_latency_seconds.value_or(0.0);
    const auto impr = measured_improvement_percent();
    m["improvement_percent"] = impr ? nlohmann::json(*impr) : nlohmann::json(nullptr);
    j["measured"] = m;
  }
  return j;
}

Recommendation Recommendation::from_json(const nlohmann::json& j) {
  try {
    Recommendation r;
    r.matrix_id = j.at("matrix_id").get<std::string>();
    r.objective = objective_from_json(j.at("objective"));
    r.dimensions = j.at("dimensions").get<std::vector<std::string>>();
    for (const auto& d : r.dimensions) {
      r.predicted.push_back(j.at("predicted").at(d).get<std::string>());
      r.config.push_back(j.at("config").at(d).get<std::string>());
    }
    r.flags = j.at("flags").get<std::string>();
    for (const auto& [dim, fp] : j.at("models").items()) {
      r.model_fingerprints.emplace_back(dim, fp.get<std::string>());
    }
    if (j.contains("measured")) {
      r.default_latency_seconds = j["measured"].at("default_latency_seconds").get<double>();
      r.recommended_latency_seconds = j["measured"].at("recommended_latency_seconds").get<double>();
    }
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("recommendation: ") + e.what());
  }
}

Recommendation compile_time_optimize(const NamedMatrix& m, const ModelBundle& bundle,
                                     const CompileTimeOptions& opts) {
  const auto features = extract_features(m.matrix);
  Recommendation r;
  r.matrix_id = m.id;
  r.objective = bundle.objective;
  for (const auto& d : bundle.space.dims()) r.dimensions.push_back(d.name);
  r.predicted = predict_config(bundle, features);
  r.config = r.predicted;
  if (const auto fd = bundle.space.index_of(kFormatDim)) {
    r.config[*fd] = bundle.space.default_point()[*fd];
  }
  r.flags = render_flags(bundle.space, r.config);
  for (const auto& c : bundle.classifiers) r.model_fingerprints.emplace_back(c.dimension, c.fingerprint);

  if (opts.verify) {
    if (!bundle.space.executable()) {
      throw std::invalid_argument("verification needs a space of executable dimensions only");
    }
    const auto def = resolve(bundle.space, bundle.space.default_point());
    const auto rec = resolve(bundle.space, r.config);
    const FormatMatrix a = convert(m.matrix, def.format, opts.formats);
    const auto x = probe_vector(static_cast<std::size_t>(m.matrix.n_cols()));
    std::vector<double> y(static_cast<std::size_t>(m.matrix.n_rows()));
    r.default_latency_seconds =
        time_kernel([&] { spmv(a, x, y, def.exec); }, opts.timing).mean_seconds;
    r.recommended_latency_seconds =
        time_kernel([&] { spmv(a, x, y, rec.exec); }, opts.timing).mean_seconds;
  }
  return r;
}

// ---------------------------------------------------------------------------
// Run-time mode

RuntimePredictors make_predictors(const ModelBundle& bundle, const OverheadModel& overhead) {
  const auto fd = bundle.space.index_of(kFormatDim);
  if (!fd) throw std::invalid_argument("the bundle's config space has no format dimension");
  for (const auto& v : bundle.space.dims()[*fd].values) {
    if (!parse_format(v)) throw std::invalid_argument("format value '" + v + "' is not executable");
  }
  if (!bundle.latency) throw std::invalid_argument("the bundle has no latency regressor");

  auto b = std::make_shared<const ModelBundle>(bundle);
  auto o = std::make_shared<const OverheadModel>(overhead);
  const std::size_t fdim = *fd;

  RuntimePredictors p;
  p.best_format = [b, fdim](const SparsityFeatures& f) {
    return *parse_format(b->classifiers[fdim].model.predict_label(feature_row(f)));
  };
  p.latency = [b, fdim](const SparsityFeatures& f, Format fmt) -> std::optional<double> {
    auto point = predict_config(*b, f);
    point[fdim] = std::string(to_string(fmt));
    if (!b->space.value_index(fdim, point[fdim])) return std::nullopt;
    return std::max(0.0, b->latency->model.predict(latency_row(b->space, f, point)));
  };
  p.exec_config = [b](const SparsityFeatures& f) {
    return resolve(b->space, predict_config(*b, f)).exec;
  };
  p.f_latency = [o](const SparsityFeatures& f) { return o->predict_f(f); };
  p.c_latency = [o](const SparsityFeatures& f, Format fmt) { return o->predict_c(f, fmt); };
  p.o_latency = overhead.o_latency();
  p.p_latency = overhead.p_latency();
  return p;
}

bool gate(std::uint64_t iterations, double gain_per_iteration, double overhead_seconds) {
  return static_cast<double>(iterations) * gain_per_iteration > overhead_seconds;
}

std::string_view to_string(Verdict v) {
  return v == Verdict::convert ? "convert" : "keep-default";
}

nlohmann::json RuntimeDecision::to_json() const {
  nlohmann::json j;
  j["matrix_id"] = matrix_id;
  j["default_format"] = to_string(default_format);
  j["predicted_format"] = to_string(predicted_format);
  j["expected_iterations"] = expected_iterations;
  j["gain_per_iteration_seconds"] = gain_per_iteration_seconds;
  j["predicted_gain_seconds"] = predicted_gain_seconds;
  j["predicted_overhead_seconds"] = predicted_overhead_seconds;
  j["overhead_components"] = {
      {"f_latency", f_latency}, {"c_latency", c_latency}, {"o_latency", o_latency}, {"p_latency", p_latency}};
  j["verdict"] = to_string(verdict);
  j["reason"] = reason;
  j["exec_config"] = {{"worker_count", exec.worker_count}, {"rows_per_chunk", exec.rows_per_chunk}};
  if (actual_conversion_seconds) {
    j["measured"] = {{"conversion_seconds", *actual_conversion_seconds}};
  }
  return j;
}

RuntimeDecision run_time_optimize(const NamedMatrix& m, const RuntimePredictors& predictors,
                                  std::uint64_t expected_iterations, const RuntimeOptions& opts) {
  if (expected_iterations < 1) throw std::invalid_argument("expected_iterations must be >= 1");
  if (!predictors.best_format || !predictors.latency || !predictors.f_latency ||
      !predictors.c_latency) {
    throw std::invalid_argument("run-time mode needs format, latency and overhead predictors");
  }
  const auto features = extract_features(m.matrix);
  RuntimeDecision d;
  d.matrix_id = m.id;
  d.expected_iterations = expected_iterations;
  d.predicted_format = predictors.best_format(features);
  if (predictors.exec_config) d.exec = predictors.exec_config(features);

  const auto f = predictors.f_latency(features);
  const auto c = predictors.c_latency(features, d.predicted_format);
  d.f_latency = f.value_or(0.0);
  d.c_latency = c.value_or(0.0);
  d.o_latency = predictors.o_latency;
  d.p_latency = predictors.p_latency;
  d.predicted_overhead_seconds = d.f_latency + d.c_latency + d.o_latency + d.p_latency;

  const std::string target(to_string(d.predicted_format));
  if (d.predicted_format == d.default_format) {
    d.reason = "predicted format is the default";
  } else if (!conversion_feasible(m.matrix, d.predicted_format, opts.formats)) {
    d.reason = "conversion to " + target + " exceeds the memory guard";
  } else if (!f) {
    d.reason = "no feature-extraction estimate";
  } else if (!c) {
    d.reason = "no conversion estimate for " + target;
  } else {
    const auto lat_default = predictors.latency(features, d.default_format);
    const auto lat_target = predictors.latency(features, d.predicted_format);
    if (!lat_default || !lat_target) {
      d.reason = "no latency estimate for " + std::string(!lat_default ? to_string(d.default_format)
                                                                       : target);
    } else {
      d.gain_per_iteration_seconds = std::max(0.0, *lat_default - *lat_target);
      d.predicted_gain_seconds =
          static_cast<double>(expected_iterations) * d.gain_per_iteration_seconds;
      const bool go = gate(expected_iterations, d.gain_per_iteration_seconds,
                           d.predicted_overhead_seconds);
      d.verdict = go ? Verdict::convert : Verdict::keep_default;
      d.reason = go ? "predicted gain exceeds predicted overhead"
                    : "predicted gain does not exceed predicted overhead";
    }
  }

  if (d.verdict == Verdict::convert && opts.perform_conversion) {
    const auto t0 = std::chrono::steady_clock::now();
    const auto converted = convert(m.matrix, d.predicted_format, opts.formats);
    d.actual_conversion_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    (void)converted;
  }
  return d;
}

}  // namespace autospmv
