#include "autospmv/dataset.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "autospmv/random.hpp"

namespace autospmv {

void LabeledDataset::validate() const {
  if (targets.size() != rows.size()) {
    throw std::invalid_argument("dataset: " + std::to_string(rows.size()) + " rows but " +
                                std::to_string(targets.size()) + " targets");
  }
  for (const auto& r : rows) {
    if (r.size() != feature_names.size()) {
      throw std::invalid_argument("dataset: row arity " + std::to_string(r.size()) +
                                  " != " + std::to_string(feature_names.size()));
    }
  }
  if (task == Task::classification) {
    for (double t : targets) {
      if (t < 0 || t >= static_cast<double>(classes.size()) || t != std::floor(t)) {
        throw std::invalid_argument("dataset: label outside the class alphabet");
      }
    }
  }
}

LabeledDataset make_classification(std::vector<std::string> feature_names,
                                   std::vector<std::vector<double>> rows,
                                   const std::vector<std::string>& labels) {
  LabeledDataset d;
  d.feature_names = std::move(feature_names);
  d.task = Task::classification;
  d.rows = std::move(rows);
  d.classes = labels;
  std::sort(d.classes.begin(), d.classes.end());
  d.classes.erase(std::unique(d.classes.begin(), d.classes.end()), d.classes.end());
  d.targets.reserve(labels.size());
  for (const auto& l : labels) {
    d.targets.push_back(static_cast<double>(
        std::lower_bound(d.classes.begin(), d.classes.end(), l) - d.classes.begin()));
  }
  d.validate();
  return d;
}

LabeledDataset make_regression(std::vector<std::string> feature_names,
                               std::vector<std::vector<double>> rows,
                               std::vector<double> targets) {
  LabeledDataset d;
  d.feature_names = std::move(feature_names);
  d.task = Task::regression;
  d.rows = std::move(rows);
  d.targets = std::move(targets);
  d.validate();
  return d;
}

LabeledDataset subset(const LabeledDataset& data, std::span<const std::size_t> indices) {
  LabeledDataset out;
  out.feature_names = data.feature_names;
  out.task = data.task;
  out.classes = data.classes;
  out.rows.reserve(indices.size());
  out.targets.reserve(indices.size());
  for (auto i : indices) {
    out.rows.push_back(data.rows.at(i));
    out.targets.push_back(data.targets.at(i));
  }
  return out;
}

std::pair<std::vector<std::size_t>, std::vector<std::size_t>> split_indices(
    std::size_t n, double train_fraction, std::uint64_t seed) {
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
    throw std::invalid_argument("split fraction must lie in (0, 1)");
  }
  std::vector<std::size_t> idx(n);
  for (std::size_t i = 0; i < n; ++i) idx[i] = i;
  Rng rng(mix_seed(seed, 0x5917));
  for (std::size_t i = n; i > 1; --i) std::swap(idx[i - 1], idx[rng.uniform_index(i)]);
  auto n_train = static_cast<std::size_t>(std::llround(train_fraction * static_cast<double>(n)));
  if (n >= 2) n_train = std::clamp<std::size_t>(n_train, 1, n - 1);
  std::vector<std::size_t> train(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(n_train));
  std::vector<std::size_t> test(idx.begin() + static_cast<std::ptrdiff_t>(n_train), idx.end());
  return {std::move(train), std::move(test)};
}

namespace {

struct Fnv1a {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  void bytes(const void* p, std::size_t n) {
    const auto* b = static_cast<const unsigned char*>(p);
    for (std::size_t i = 0; i < n; ++i) {
      h ^= b[i];
      h *= 0x100000001b3ULL;
    }
  }
  void str(const std::string& s) {
    bytes(s.data(), s.size());
    bytes("\0", 1);
  }
  void num(double v) {
    const auto bits = std::bit_cast<std::uint64_t>(v);
    bytes(&bits, sizeof(bits));
  }
};

std::string hex(std::uint64_t h) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace

std::string text_fingerprint(std::string_view text) {
  Fnv1a f;
  f.bytes(text.data(), text.size());
  return hex(f.h);
}

std::string fingerprint(const LabeledDataset& data) {
  Fnv1a f;
  for (const auto& n : data.feature_names) f.str(n);
  f.num(data.task == Task::classification ? 0.0 : 1.0);
  for (const auto& c : data.classes) f.str(c);
  for (std::size_t i = 0; i < data.rows.size(); ++i) {
    for (double v : data.rows[i]) f.num(v);
    f.num(data.targets[i]);
  }
  return hex(f.h);
}

FeatureScaler FeatureScaler::fit(const std::vector<std::vector<double>>& rows) {
  FeatureScaler s;
  if (rows.empty()) return s;
  const std::size_t d = rows.front().size();
  const double n = static_cast<double>(rows.size());
  s.mean.assign(d, 0.0);
  s.scale.assign(d, 1.0);
  for (const auto& r : rows)
    for (std::size_t j = 0; j < d; ++j) s.mean[j] += r[j];
  for (auto& m : s.mean) m /= n;
  for (std::size_t j = 0; j < d; ++j) {
    double ss = 0.0;
    for (const auto& r : rows) ss += (r[j] - s.mean[j]) * (r[j] - s.mean[j]);
    const double sd = std::sqrt(ss / n);
    s.scale[j] = sd > 0.0 ? sd : 1.0;
  }
  return s;
}

std::vector<double> FeatureScaler::transform(std::span<const double> x) const {
  std::vector<double> out(x.size());
  for (std::size_t j = 0; j < x.size(); ++j) out[j] = (x[j] - mean[j]) / scale[j];
  return out;
}

}  // namespace autospmv
