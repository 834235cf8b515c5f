#include "autospmv/tree.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

#include "autospmv/common.hpp"
#include "autospmv/random.hpp"

namespace autospmv {

std::string_view to_string(Criterion c) {
  switch (c) {
    case Criterion::gini: return "gini";
    case Criterion::entropy: return "entropy";
    case Criterion::squared_error: return "squared_error";
  }
  return "?";
}

std::optional<Criterion> parse_criterion(std::string_view name) {
  if (name == "gini") return Criterion::gini;
  if (name == "entropy") return Criterion::entropy;
  if (name == "squared_error") return Criterion::squared_error;
  return std::nullopt;
}

void TreeParams::validate() const {
  if (max_depth && *max_depth < 0) throw std::invalid_argument("max_depth must be >= 0");
  if (min_samples_leaf < 1) throw std::invalid_argument("min_samples_leaf must be >= 1");
  if (max_features && *max_features < 1) throw std::invalid_argument("max_features must be >= 1");
}

namespace {

double class_impurity(Criterion c, std::span<const double> counts, double n) {
  if (n <= 0) return 0.0;
  double acc = 0.0;
  if (c == Criterion::gini) {
    for (double k : counts) acc += (k / n) * (k / n);
    return n * (1.0 - acc);
  }
  for (double k : counts) {
    if (k > 0) acc -= (k / n) * std::log2(k / n);
  }
  return n * acc;
}

double sse(double sum, double sumsq, double n) {
  if (n <= 0) return 0.0;
  return std::max(0.0, sumsq - sum * sum / n);
}

struct Split {
  int feature = -1;
  double threshold = 0.0;
  double score = std::numeric_limits<double>::infinity();  // weighted child impurity
};

}  // namespace

class TreeBuilder {
 public:
  TreeBuilder(const LabeledDataset& data, const TreeParams& params, std::uint64_t seed)
      : data_(data), params_(params), rng_(seed) {}

  DecisionTree build(std::span<const std::size_t> rows) {
    tree_.task_ = data_.task;
    tree_.arity_ = data_.arity();
    tree_.n_classes_ = data_.task == Task::classification ? data_.n_classes() : 0;
    tree_.params_ = params_;
    std::vector<std::size_t> idx(rows.begin(), rows.end());
    grow(idx, 0);
    return std::move(tree_);
  }

 private:
  const LabeledDataset& data_;
  const TreeParams& params_;
  Rng rng_;
  DecisionTree tree_;

  bool classification() const { return data_.task == Task::classification; }
  double x(std::size_t row, int f) const { return data_.rows[row][static_cast<std::size_t>(f)]; }
  double y(std::size_t row) const { return data_.targets[row]; }

  int grow(std::vector<std::size_t>& idx, int depth) {
    const int id = static_cast<int>(tree_.nodes_.size());
    tree_.nodes_.push_back(make_leaf(idx));

    const bool at_depth = params_.max_depth && depth >= *params_.max_depth;
    const bool too_small = idx.size() < 2 * static_cast<std::size_t>(params_.min_samples_leaf);
    if (at_depth || too_small || pure(idx)) return id;

    const Split s = best_split(idx);
    if (s.feature < 0) return id;

    std::vector<std::size_t> left, right;
    for (auto r : idx) (x(r, s.feature) <= s.threshold ? left : right).push_back(r);
    idx.clear();
    idx.shrink_to_fit();

    const int l = grow(left, depth + 1);
    const int r = grow(right, depth + 1);
    auto& node = tree_.nodes_[static_cast<std::size_t>(id)];
    node.feature = s.feature;
    node.threshold = s.threshold;
    node.left = l;
    node.right = r;
    return id;
  }

  TreeNode make_leaf(const std::vector<std::size_t>& idx) const {
    TreeNode n;
    n.samples = idx.size();
    if (classification()) {
      n.value.assign(data_.n_classes(), 0.0);
      for (auto r : idx) n.value[static_cast<std::size_t>(y(r))] += 1.0;
    } else {
      double sum = 0.0;
      for (auto r : idx) sum += y(r);
      n.value = {idx.empty() ? 0.0 : sum / static_cast<double>(idx.size())};
    }
    return n;
  }

  bool pure(const std::vector<std::size_t>& idx) const {
    for (auto r : idx)
      if (y(r) != y(idx.front())) return false;
    return true;
  }

  std::vector<int> candidate_features() {
    const int d = static_cast<int>(data_.arity());
    std::vector<int> all(static_cast<std::size_t>(d));
    std::iota(all.begin(), all.end(), 0);
    if (!params_.max_features || *params_.max_features >= d) return all;
    const int m = *params_.max_features;
    for (int i = 0; i < m; ++i) {
      const auto j = i + static_cast<int>(rng_.uniform_index(static_cast<std::uint64_t>(d - i)));
      std::swap(all[static_cast<std::size_t>(i)], all[static_cast<std::size_t>(j)]);
    }
    all.resize(static_cast<std::size_t>(m));
    std::sort(all.begin(), all.end());
    return all;
  }

  Split best_split(const std::vector<std::size_t>& idx) {
    Split best;
    const std::size_t n = idx.size();
    const std::size_t min_leaf = static_cast<std::size_t>(params_.min_samples_leaf);
    std::vector<std::size_t> sorted(idx);

    std::vector<double> total(classification() ? data_.n_classes() : 0, 0.0);
    double sum = 0.0, sumsq = 0.0;
    for (auto r : idx) {
      if (classification()) {
        total[static_cast<std::size_t>(y(r))] += 1.0;
      } else {
        sum += y(r);
        sumsq += y(r) * y(r);
      }
    }

    std::vector<double> left(total.size()), right(total.size());
    for (int f : candidate_features()) {
      std::stable_sort(sorted.begin(), sorted.end(),
                       [&](std::size_t a, std::size_t b) { return x(a, f) < x(b, f); });
      std::fill(left.begin(), left.end(), 0.0);
      double lsum = 0.0, lsumsq = 0.0;
      for (std::size_t k = 0; k + 1 < n; ++k) {
        const auto r = sorted[k];
        if (classification()) {
          left[static_cast<std::size_t>(y(r))] += 1.0;
        } else {
          lsum += y(r);
          lsumsq += y(r) * y(r);
        }
        const double a = x(r, f);
        const double b = x(sorted[k + 1], f);
        if (a == b) continue;
        const std::size_t nl = k + 1, nr = n - nl;
        if (nl < min_leaf || nr < min_leaf) continue;

        double score;
        if (classification()) {
          for (std::size_t c = 0; c < total.size(); ++c) right[c] = total[c] - left[c];
          score = class_impurity(params_.criterion, left, static_cast<double>(nl)) +
                  class_impurity(params_.criterion, right, static_cast<double>(nr));
        } else {
          score = sse(lsum, lsumsq, static_cast<double>(nl)) +
                  sse(sum - lsum, sumsq - lsumsq, static_cast<double>(nr));
        }
        if (score < best.score) {
          double t = a + (b - a) / 2.0;
          if (!(t < b)) t = a;
          best = {f, t, score};
        }
      }
    }
    return best;
  }
};

DecisionTree DecisionTree::fit(const LabeledDataset& data, const TreeParams& params,
                               std::uint64_t seed) {
  std::vector<std::size_t> rows(data.size());
  std::iota(rows.begin(), rows.end(), std::size_t{0});
  return fit(data, rows, params, seed);
}

DecisionTree DecisionTree::fit(const LabeledDataset& data, std::span<const std::size_t> rows,
                               const TreeParams& params, std::uint64_t seed) {
  params.validate();
  data.validate();
  if (rows.empty()) throw std::invalid_argument("cannot fit a tree on an empty dataset");
  const bool regression_criterion = params.criterion == Criterion::squared_error;
  if (regression_criterion != (data.task == Task::regression)) {
    throw std::invalid_argument("criterion " + std::string(to_string(params.criterion)) +
                                " does not match the dataset task");
  }
  return TreeBuilder(data, params, seed).build(rows);
}

const TreeNode& DecisionTree::leaf_for(std::span<const double> x) const {
  if (nodes_.empty()) throw std::logic_error("tree is not fitted");
  if (x.size() != arity_) {
    throw DimensionMismatch("tree expects " + std::to_string(arity_) + " features, got " +
                            std::to_string(x.size()));
  }
  const TreeNode* n = &nodes_.front();
  while (!n->is_leaf()) {
    n = &nodes_[static_cast<std::size_t>(x[static_cast<std::size_t>(n->feature)] <= n->threshold
                                             ? n->left
                                             : n->right)];
  }
  return *n;
}

double DecisionTree::predict(std::span<const double> x) const {
  const TreeNode& leaf = leaf_for(x);
  if (task_ == Task::regression) return leaf.value.front();
  // max_element returns the first maximum: ties go to the lowest class index.
  return static_cast<double>(std::max_element(leaf.value.begin(), leaf.value.end()) -
                             leaf.value.begin());
}

std::vector<double> DecisionTree::predict(const std::vector<std::vector<double>>& rows) const {
  std::vector<double> out;
  out.reserve(rows.size());
  for (const auto& r : rows) out.push_back(predict(r));
  return out;
}

int DecisionTree::depth() const {
  if (nodes_.empty()) return 0;
  int best = 0;
  std::vector<std::pair<int, int>> stack{{0, 0}};
  while (!stack.empty()) {
    auto [id, d] = stack.back();
    stack.pop_back();
    const auto& n = nodes_[static_cast<std::size_t>(id)];
    if (n.is_leaf()) {
      best = std::max(best, d);
    } else {
      stack.push_back({n.left, d + 1});
      stack.push_back({n.right, d + 1});
    }
  }
  return best;
}

std::size_t DecisionTree::leaf_count() const {
  return static_cast<std::size_t>(
      std::count_if(nodes_.begin(), nodes_.end(), [](const TreeNode& n) { return n.is_leaf(); }));
}

nlohmann::json tree_params_to_json(const TreeParams& p) {
  nlohmann::json j;
  j["criterion"] = to_string(p.criterion);
  j["max_depth"] = p.max_depth ? nlohmann::json(*p.max_depth) : nlohmann::json(nullptr);
  j["min_samples_leaf"] = p.min_samples_leaf;
  j["max_features"] = p.max_features ? nlohmann::json(*p.max_features) : nlohmann::json(nullptr);
  return j;
}

TreeParams tree_params_from_json(const nlohmann::json& j) {
  TreeParams p;
  const auto c = parse_criterion(j.at("criterion").get<std::string>());
  if (!c) throw std::invalid_argument("unknown criterion in model file");
  p.criterion = *c;
  if (!j.at("max_depth").is_null()) p.max_depth = j.at("max_depth").get<int>();
  p.min_samples_leaf = j.at("min_samples_leaf").get<int>();
  if (j.contains("max_features") && !j.at("max_features").is_null()) {
    p.max_features = j.at("max_features").get<int>();
  }
  p.validate();
  return p;
}

nlohmann::json DecisionTree::to_json() const {
  nlohmann::json j;
  j["task"] = task_ == Task::classification ? "classification" : "regression";
  j["arity"] = arity_;
  j["n_classes"] = n_classes_;
  j["params"] = tree_params_to_json(params_);
  auto& nodes = j["nodes"] = nlohmann::json::array();
  for (const auto& n : nodes_) {
    nodes.push_back({{"f", n.feature}, {"t", n.threshold}, {"l", n.left}, {"r", n.right},
                     {"n", n.samples}, {"v", n.value}});
  }
  return j;
}

DecisionTree DecisionTree::from_json(const nlohmann::json& j) {
  DecisionTree t;
  const auto task = j.at("task").get<std::string>();
  if (task != "classification" && task != "regression") {
    throw std::invalid_argument("unknown task '" + task + "' in model file");
  }
  t.task_ = task == "classification" ? Task::classification : Task::regression;
  t.arity_ = j.at("arity").get<std::size_t>();
  t.n_classes_ = j.at("n_classes").get<std::size_t>();
  t.params_ = tree_params_from_json(j.at("params"));
  const auto& nodes = j.at("nodes");
  if (!nodes.is_array() || nodes.empty()) throw std::invalid_argument("tree has no nodes");
  const int count = static_cast<int>(nodes.size());
  const std::size_t value_len = t.task_ == Task::classification ? t.n_classes_ : 1;
  for (int i = 0; i < count; ++i) {
    const auto& e = nodes[static_cast<std::size_t>(i)];
    TreeNode n;
    n.feature = e.at("f").get<int>();
    n.threshold = e.at("t").get<double>();
    n.left = e.at("l").get<int>();
    n.right = e.at("r").get<int>();
    n.samples = e.at("n").get<std::size_t>();
    n.value = e.at("v").get<std::vector<double>>();
    if (n.value.size() != value_len) throw std::invalid_argument("tree node payload size");
    if (!n.is_leaf()) {
      const bool ok = n.feature < static_cast<int>(t.arity_) && n.left > i && n.right > i &&
                      n.left < count && n.right < count;
      if (!ok) throw std::invalid_argument("malformed tree node " + std::to_string(i));
    }
    t.nodes_.push_back(std::move(n));
  }
  return t;
}

}  // namespace autospmv
