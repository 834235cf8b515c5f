#include "autospmv/labeling.hpp"

#include <iostream>
#include <map>
#include <stdexcept>

namespace autospmv {

Objective make_objective(std::string_view column, std::optional<std::string_view> direction) {
  Objective o;
  o.column = std::string(column);
  if (direction) {
    if (*direction == "min") {
      o.direction = Direction::minimize;
    } else if (*direction == "max") {
      o.direction = Direction::maximize;
    } else {
      throw std::invalid_argument("direction must be min or max");
    }
  } else {
    o.direction = column == "mflops" || column == "energy_efficiency" ? Direction::maximize
                                                                      : Direction::minimize;
  }
  return o;
}

namespace {

struct Candidate {
  std::size_t index;
  double value;
  double latency;
  std::vector<std::size_t> ordinal;
};

bool beats(const Candidate& a, const Candidate& b, Direction dir) {
  if (a.value != b.value) return dir == Direction::minimize ? a.value < b.value : a.value > b.value;
  if (a.latency != b.latency) return a.latency < b.latency;
  return a.ordinal < b.ordinal;
}

std::optional<Candidate> candidate(const SweepDataset& ds, std::size_t i, const Objective& obj) {
  const auto& r = ds.records[i];
  if (!r.feasible) return std::nullopt;
  const auto v = ds.objective_value(r, obj.column);
  if (!v) return std::nullopt;
  return Candidate{i, *v, r.latency_seconds, ds.space.ordinal(r.config)};
}

}  // namespace

std::optional<std::size_t> winning_record(const SweepDataset& ds, std::string_view matrix_id,
                                          const Objective& obj) {
  if (!ds.has_column(obj.column)) {
    throw std::invalid_argument("dataset has no column '" + obj.column + "'");
  }
  std::optional<Candidate> best;
  for (std::size_t i = 0; i < ds.records.size(); ++i) {
    if (ds.records[i].matrix_id != matrix_id) continue;
    auto c = candidate(ds, i, obj);
    if (c && (!best || beats(*c, *best, obj.direction))) best = std::move(c);
  }
  if (!best) return std::nullopt;
  return best->index;
}

LabelingResult label_dataset(const SweepDataset& ds, const Objective& obj) {
  if (!ds.has_column(obj.column)) {
    throw std::invalid_argument("dataset has no column '" + obj.column + "'");
  }
  // One pass grouping by matrix keeps this linear in the record count.
  std::map<std::string, std::optional<Candidate>> best;
  for (std::size_t i = 0; i < ds.records.size(); ++i) {
    auto& slot = best[ds.records[i].matrix_id];
    auto c = candidate(ds, i, obj);
    if (c && (!slot || beats(*c, *slot, obj.direction))) slot = std::move(c);
  }

  LabelingResult out;
  std::vector<std::vector<double>> rows;
  std::vector<std::vector<std::string>> labels(ds.space.size());
  for (const auto& id : ds.matrix_ids()) {
    const auto& w = best.at(id);
    if (!w) {
      std::cerr << "warning: " << id << " has no feasible record with " << obj.column
                << "; dropped from labels\n";
      out.dropped.push_back(id);
      continue;
    }
    const auto& r = ds.records[w->index];
    out.matrix_ids.push_back(id);
    out.winners.push_back(r.config);
    const auto f = r.features.to_array();
    rows.emplace_back(f.begin(), f.end());
    for (std::size_t d = 0; d < ds.space.size(); ++d) labels[d].push_back(r.config[d]);
  }
  for (std::size_t d = 0; d < ds.space.size(); ++d) {
    out.per_dimension.push_back(make_classification(SparsityFeatures::names(), rows, labels[d]));
  }
  return out;
}

}  // namespace autospmv
