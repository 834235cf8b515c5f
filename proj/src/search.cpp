#include "autospmv/search.hpp"

#include <stdexcept>

#include "autospmv/random.hpp"

namespace autospmv {

std::size_t SearchSpace::point_count() const {
  if (knobs.empty()) return 1;
  std::size_t n = 1;
  for (const auto& [name, values] : knobs) n *= values.size();
  return n;
}

nlohmann::json SearchSpace::to_json() const {
  nlohmann::json j;
  j["learner"] = to_string(kind);
  auto& ks = j["knobs"] = nlohmann::json::array();
  for (const auto& [name, values] : knobs) ks.push_back({{"name", name}, {"values", values}});
  return j;
}

namespace {

std::vector<std::string> int_range(int lo, int hi) {
  std::vector<std::string> out;
  for (int v = lo; v <= hi; ++v) out.push_back(std::to_string(v));
  return out;
}

std::vector<std::string> criteria(Task task) {
  if (task == Task::regression) return {"squared_error"};
  return {"gini", "entropy"};
}

}  // namespace

SearchSpace decision_tree_space(Task task) {
  auto depths = int_range(1, 20);
  depths.insert(depths.begin(), "none");
  return {LearnerKind::decision_tree,
          {{"criterion", criteria(task)},
           {"max_depth", std::move(depths)},
           {"min_samples_leaf", int_range(1, 5)}}};
}

SearchSpace random_forest_space(Task task) {
  return {LearnerKind::random_forest,
          {{"criterion", criteria(task)},
           {"n_estimators", {"50", "100", "150", "200"}},
           {"max_depth", {"none", "5", "10", "15", "20"}}}};
}

SearchSpace nearest_centroid_space() {
  return {LearnerKind::nearest_centroid, {{"metric", {"manhattan", "euclidean"}}}};
}

SearchSpace knn_space() {
  return {LearnerKind::knn,
          {{"k", {"1", "3", "5", "7", "9"}}, {"metric", {"manhattan", "euclidean"}}}};
}

SearchResult random_search(const SearchSpace& space, const LabeledDataset& data,
                           const SearchOptions& opts) {
  data.validate();
  const auto [train_idx, holdout_idx] = split_indices(data.size(), opts.train_fraction, opts.seed);
  return random_search(space, subset(data, train_idx), subset(data, holdout_idx), opts);
}

SearchResult random_search(const SearchSpace& space, const LabeledDataset& train,
                           const LabeledDataset& holdout, const SearchOptions& opts) {
  if (opts.trials < 1) throw std::invalid_argument("search needs at least one trial");
  for (const auto& [name, values] : space.knobs) {
    if (values.empty()) throw std::invalid_argument("search knob '" + name + "' has no values");
  }
  const bool classify = train.task == Task::classification;

  SearchResult result;
  std::optional<Model> best;
  std::optional<EvalReport> best_report;
  for (int t = 0; t < opts.trials; ++t) {
    Rng rng(mix_seed(opts.seed, static_cast<std::uint64_t>(t)));
    HyperParams hp;
    hp.kind = space.kind;
    TrialRecord rec;
    rec.trial = t;
    for (const auto& [name, values] : space.knobs) {
      const auto& v = values[rng.uniform_index(values.size())];
      hp.set(name, v);
      rec.choice.emplace_back(name, v);
    }
    auto model = Model::train(train, hp, rng.next(), opts.log_target, opts.worker_count);
    auto report = evaluate(model, holdout);
    rec.score = classify ? report.accuracy : report.mse;
    const bool better = !best_report || (classify ? rec.score > best_report->accuracy
                                                  : rec.score < best_report->mse);
    if (better) {
      best = std::move(model);
      best_report = report;
      result.best_trial = t;
    }
    result.log.push_back(std::move(rec));
  }
  result.best = std::move(*best);
  result.report = *best_report;
  return result;
}

}  // namespace autospmv
