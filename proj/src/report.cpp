#include "autospmv/report.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <map>

#include "autospmv/csv.hpp"

namespace autospmv {

namespace {

std::string fmt(const char* spec, double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), spec, v);
  return buf;
}

std::string value_text(const std::optional<double>& v) { return v ? fmt("%.6g", *v) : "n/a"; }
std::string percent_text(const std::optional<double>& v) { return v ? fmt("%.2f", *v) : "n/a"; }

std::string pad(const std::string& s, std::size_t width, bool left) {
  if (s.size() >= width) return s;
  const std::string fill(width - s.size(), ' ');
  return left ? s + fill : fill + s;
}

}  // namespace

std::optional<double> ImprovementReport::improvement(const ReportRow& r) const {
  if (!r.default_value || !r.chosen_value || !(*r.default_value > 0) || !(*r.chosen_value > 0)) {
    return std::nullopt;
  }
  const double d = *r.default_value, c = *r.chosen_value;
  return (objective.direction == Direction::minimize ? d - c : c - d) / d * 100.0;
}

std::optional<double> ImprovementReport::gmean() const {
  double log_sum = 0.0;
  std::size_t count = 0;
  for (const auto& r : rows) {
    if (!improvement(r)) continue;
    log_sum += std::log(*r.chosen_value / *r.default_value);
    ++count;
  }
  if (count == 0) return std::nullopt;
  const double g = std::exp(log_sum / static_cast<double>(count));
  return (objective.direction == Direction::minimize ? 1.0 - g : g - 1.0) * 100.0;
}

std::string ImprovementReport::to_text() const {
  std::vector<std::array<std::string, 4>> cells;
  cells.push_back({"matrix_id", "default", "chosen", "improvement%"});
  for (const auto& r : rows) {
    cells.push_back({r.matrix_id, value_text(r.default_value), value_text(r.chosen_value),
                     percent_text(improvement(r))});
  }
  cells.push_back({"GMean", "", "", percent_text(gmean())});

  std::array<std::size_t, 4> width{};
  for (const auto& row : cells)
    for (std::size_t k = 0; k < 4; ++k) width[k] = std::max(width[k], row[k].size());

  std::string out = "objective: " + objective.column +
                    (objective.direction == Direction::minimize ? " (min)\n" : " (max)\n");
  for (const auto& row : cells) {
    std::string line = pad(row[0], width[0], true);
    for (std::size_t k = 1; k < 4; ++k) line += "  " + pad(row[k], width[k], false);
    while (!line.empty() && line.back() == ' ') line.pop_back();
    out += line + '\n';
  }
  return out;
}

std::string ImprovementReport::to_csv() const {
  auto opt = [](const std::optional<double>& v, const char* spec) {
    return v ? fmt(spec, *v) : std::string();
  };
  std::string out = "matrix_id,default,chosen,improvement_percent\n";
  for (const auto& r : rows) {
    out += csv::join({r.matrix_id, opt(r.default_value, "%.6g"), opt(r.chosen_value, "%.6g"),
                      opt(improvement(r), "%.2f")}) +
           '\n';
  }
  out += csv::join({"GMean", "", "", opt(gmean(), "%.2f")}) + '\n';
  return out;
}

ImprovementReport build_report(const SweepDataset& ds, const Objective& objective,
                               const std::vector<std::pair<std::string, ConfigPoint>>& chosen) {
  std::map<std::pair<std::string, ConfigPoint>, const MeasurementRecord*> index;
  for (const auto& r : ds.records) index[{r.matrix_id, r.config}] = &r;
  auto value_at = [&](const std::string& id, const ConfigPoint& p) -> std::optional<double> {
    const auto it = index.find({id, p});
    if (it == index.end() || !it->second->feasible) return std::nullopt;
    return ds.objective_value(*it->second, objective.column);
  };

  ImprovementReport rep;
  rep.objective = objective;
  const auto def = ds.space.default_point();
  for (const auto& [id, point] : chosen) {
    rep.rows.push_back({id, value_at(id, def), value_at(id, point)});
  }
  return rep;
}

}  // namespace autospmv
