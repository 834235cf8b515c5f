#include "autospmv/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <stdexcept>

namespace autospmv {

void EvalReport::check_bounds() const {
  auto bad = [](const char* what) { throw std::logic_error(std::string("metric out of range: ") + what); };
  if (task == Task::classification) {
    if (!(accuracy >= 0.0 && accuracy <= 1.0)) bad("accuracy");
    if (!(macro_f1 >= 0.0 && macro_f1 <= 1.0)) bad("macro_f1");
  } else {
    if (!(mse >= 0.0)) bad("mse");
    if (!(r2 <= 1.0)) bad("r2");
  }
}

nlohmann::json EvalReport::to_json() const {
  nlohmann::json j;
  j["task"] = task == Task::classification ? "classification" : "regression";
  j["count"] = count;
  if (task == Task::classification) {
    j["accuracy"] = accuracy;
    j["macro_f1"] = macro_f1;
    j["confusion"] = confusion;
  } else {
    j["mse"] = mse;
    j["r2"] = r2;
  }
  return j;
}

EvalReport EvalReport::from_json(const nlohmann::json& j) {
  EvalReport r;
  const auto task = j.at("task").get<std::string>();
  if (task != "classification" && task != "regression") {
    throw std::invalid_argument("report: unknown task '" + task + "'");
  }
  r.task = task == "classification" ? Task::classification : Task::regression;
  r.count = j.at("count").get<std::size_t>();
  if (r.task == Task::classification) {
    r.accuracy = j.at("accuracy").get<double>();
    r.macro_f1 = j.at("macro_f1").get<double>();
    r.confusion = j.at("confusion").get<std::vector<std::vector<std::size_t>>>();
  } else {
    r.mse = j.at("mse").get<double>();
    r.r2 = j.at("r2").get<double>();
  }
  return r;
}

EvalReport evaluate_classification(std::span<const double> truth, std::span<const double> pred,
                                   std::size_t n_classes) {
  if (truth.size() != pred.size()) throw std::invalid_argument("truth/prediction length mismatch");
  if (truth.empty()) throw std::invalid_argument("cannot evaluate an empty holdout");
  EvalReport r;
  r.task = Task::classification;
  r.count = truth.size();
  r.confusion.assign(n_classes, std::vector<std::size_t>(n_classes, 0));
  std::size_t correct = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    const auto t = static_cast<std::size_t>(truth[i]);
    const auto p = static_cast<std::size_t>(pred[i]);
    if (t >= n_classes || p >= n_classes) throw std::invalid_argument("label outside alphabet");
    ++r.confusion[t][p];
    if (t == p) ++correct;
  }
  r.accuracy = static_cast<double>(correct) / static_cast<double>(r.count);

  double f1_sum = 0.0;
  std::size_t present = 0;
  for (std::size_t c = 0; c < n_classes; ++c) {
    std::size_t tp = r.confusion[c][c], row = 0, col = 0;
    for (std::size_t k = 0; k < n_classes; ++k) {
      row += r.confusion[c][k];
      col += r.confusion[k][c];
    }
    if (row == 0 && col == 0) continue;
    ++present;
    // F1 = 2TP / (2TP + FP + FN) = 2TP / (row + col)
    f1_sum += 2.0 * static_cast<double>(tp) / static_cast<double>(row + col);
  }
  r.macro_f1 = f1_sum / static_cast<double>(present);
  r.check_bounds();
  return r;
}

EvalReport evaluate_regression(std::span<const double> truth, std::span<const double> pred) {
  if (truth.size() != pred.size()) throw std::invalid_argument("truth/prediction length mismatch");
  if (truth.empty()) throw std::invalid_argument("cannot evaluate an empty holdout");
  EvalReport r;
  r.task = Task::regression;
  r.count = truth.size();
  const double n = static_cast<double>(truth.size());
  double mean = 0.0;
  for (double t : truth) mean += t;
  mean /= n;
  double ss_res = 0.0, ss_tot = 0.0;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    ss_res += (truth[i] - pred[i]) * (truth[i] - pred[i]);
    ss_tot += (truth[i] - mean) * (truth[i] - mean);
  }
  r.mse = ss_res / n;
  if (ss_tot > 0.0) {
    r.r2 = std::max(kR2Floor, 1.0 - ss_res / ss_tot);
  } else {
    r.r2 = ss_res == 0.0 ? 0.0 : kR2Floor;
  }
  r.check_bounds();
  return r;
}

}  // namespace autospmv
