#include "autospmv/dataset_csv.hpp"

#include <fstream>
#include <sstream>

#include "autospmv/common.hpp"
#include "autospmv/csv.hpp"
#include "autospmv/numeric_text.hpp"

namespace autospmv {

namespace {

constexpr const char* kTrailing[] = {"feasible",      "repetitions",     "latency_seconds",
                                     "mflops",        "energy_joules",   "avg_power_watts",
                                     "energy_efficiency"};
constexpr std::size_t kTrailingCount = std::size(kTrailing);

std::string opt_text(const std::optional<double>& v) { return v ? format_double(*v) : ""; }

}  // namespace

std::vector<std::string> csv_header(const SweepDataset& ds) {
  std::vector<std::string> h{"matrix_id"};
  for (auto n : SparsityFeatures::kNames) h.emplace_back(n);
  for (const auto& d : ds.space.dims()) h.push_back(d.name);
  for (auto t : kTrailing) h.emplace_back(t);
  h.insert(h.end(), ds.extra_columns.begin(), ds.extra_columns.end());
  return h;
}

void write_csv(std::ostream& out, const SweepDataset& ds) {
  out << csv::join(csv_header(ds)) << '\n';
  for (const auto& r : ds.records) {
    std::vector<std::string> f{r.matrix_id};
    for (double v : r.features.to_array()) f.push_back(format_double(v));
    f.insert(f.end(), r.config.begin(), r.config.end());
    f.emplace_back(r.feasible ? "true" : "false");
    f.push_back(std::to_string(r.repetitions));
    f.push_back(r.feasible ? format_double(r.latency_seconds) : "");
    f.push_back(r.feasible ? format_double(r.mflops) : "");
    f.push_back(opt_text(r.energy_joules));
    f.push_back(opt_text(r.avg_power_watts));
    f.push_back(opt_text(r.energy_efficiency));
    f.insert(f.end(), r.extra.begin(), r.extra.end());
    out << csv::join(f) << '\n';
  }
}

nlohmann::json dataset_meta(const SweepDataset& ds) {
  return {{"schema_version", ds.schema_version},
          {"machine",
           {{"host", ds.machine.host},
            {"worker_budget", ds.machine.worker_budget},
            {"timestamp", ds.machine.timestamp}}},
          {"space", ds.space.to_json()},
          {"extra_columns", ds.extra_columns},
          {"symmetric_inputs", "expanded to both triangles before features and timing"}};
}

SweepDataset read_csv(std::istream& in, const std::optional<nlohmann::json>& meta,
                      const std::string& source) {
  csv::Reader reader(in);
  std::vector<std::string> header;
  if (!reader.next(header)) throw DataError(source + ": empty file (no header)");
  auto fail = [&](std::size_t line, const std::string& msg) -> DataError {
    return DataError(source + ":" + std::to_string(line) + ": " + msg);
  };

  constexpr std::size_t kLead = 1 + SparsityFeatures::kCount;
  const auto expected_lead = [] {
    std::vector<std::string> h{"matrix_id"};
    for (auto n : SparsityFeatures::kNames) h.emplace_back(n);
    return h;
  }();
  if (header.size() < kLead + kTrailingCount ||
      !std::equal(expected_lead.begin(), expected_lead.end(), header.begin())) {
    throw fail(1, "header does not start with matrix_id and the sparsity features");
  }
  const auto feasible_at = std::find(header.begin() + kLead, header.end(), "feasible");
  if (feasible_at == header.end() ||
      static_cast<std::size_t>(header.end() - feasible_at) < kTrailingCount) {
    throw fail(1, "header is missing the measurement columns");
  }
  for (std::size_t i = 0; i < kTrailingCount; ++i) {
    if (*(feasible_at + static_cast<std::ptrdiff_t>(i)) != kTrailing[i]) {
      throw fail(1, std::string("expected column '") + kTrailing[i] + "'");
    }
  }
  const std::vector<std::string> dim_names(header.begin() + kLead, feasible_at);
  const std::size_t n_dims = dim_names.size();
  const std::vector<std::string> extras(feasible_at + kTrailingCount, header.end());

  SweepDataset ds;
  ds.extra_columns = extras;
  if (meta) {
    const int version = meta->value("schema_version", -1);
    if (version != kSchemaVersion) {
      throw DataError(source + ": schema version " + std::to_string(version) +
                      " does not match supported version " + std::to_string(kSchemaVersion));
    }
    ds.schema_version = version;
    try {
      const auto& m = meta->at("machine");
      ds.machine = {m.at("host").get<std::string>(), m.at("worker_budget").get<int>(),
                    m.at("timestamp").get<std::string>()};
      ds.space = ConfigSpace::from_json(meta->at("space"));
    } catch (const std::exception& e) {
      throw DataError(source + ": bad sidecar: " + e.what());
    }
    if (ds.space.size() != n_dims) throw fail(1, "header dimensions disagree with the sidecar space");
    for (std::size_t d = 0; d < n_dims; ++d) {
      if (ds.space.dims()[d].name != dim_names[d]) {
        throw fail(1, "dimension column '" + dim_names[d] + "' disagrees with the sidecar");
      }
    }
  }

  std::vector<ConfigDimension> inferred(n_dims);
  for (std::size_t d = 0; d < n_dims; ++d) inferred[d].name = dim_names[d];

  std::vector<std::string> f;
  while (reader.next(f)) {
    const std::size_t line = reader.line();
    if (f.size() == 1 && f[0].empty()) continue;
    if (f.size() != header.size()) {
      throw fail(line, "expected " + std::to_string(header.size()) + " fields, found " +
                           std::to_string(f.size()));
    }
    MeasurementRecord r;
    r.matrix_id = f[0];
    if (r.matrix_id.empty()) throw fail(line, "empty matrix_id");
    std::array<double, SparsityFeatures::kCount> feats{};
    for (std::size_t i = 0; i < feats.size(); ++i) {
      const auto v = parse_double(f[1 + i]);
      if (!v) throw fail(line, "feature " + header[1 + i] + ": '" + f[1 + i] + "' is not a number");
      feats[i] = *v;
    }
    r.features = SparsityFeatures::from_array(feats);
    for (std::size_t d = 0; d < n_dims; ++d) {
      const auto& v = f[kLead + d];
      r.config.push_back(v);
      auto& vals = inferred[d].values;
      if (std::find(vals.begin(), vals.end(), v) == vals.end()) vals.push_back(v);
    }
    std::size_t c = kLead + n_dims;
    const auto& feas = f[c++];
    if (feas == "true" || feas == "1") {
      r.feasible = true;
    } else if (feas == "false" || feas == "0") {
      r.feasible = false;
    } else {
      throw fail(line, "feasible must be true or false, found '" + feas + "'");
    }
    const auto reps = parse_int(f[c]);
    if (!reps || *reps < 0) throw fail(line, "repetitions: '" + f[c] + "'");
    r.repetitions = static_cast<std::size_t>(*reps);
    ++c;
    auto number = [&](std::size_t col, bool required) -> std::optional<double> {
      if (f[col].empty()) {
        if (required) throw fail(line, header[col] + " is required for feasible records");
        return std::nullopt;
      }
      const auto v = parse_double(f[col]);
      if (!v) throw fail(line, header[col] + ": '" + f[col] + "' is not a number");
      return v;
    };
    r.latency_seconds = number(c, r.feasible).value_or(0.0);
    r.mflops = number(c + 1, r.feasible).value_or(0.0);
    r.energy_joules = number(c + 2, false);
    r.avg_power_watts = number(c + 3, false);
    r.energy_efficiency = number(c + 4, false);
    r.extra.assign(f.begin() + static_cast<std::ptrdiff_t>(c + 5), f.end());
    ds.records.push_back(std::move(r));
  }

  if (!meta) {
    if (n_dims > 0 && ds.records.empty()) {
      throw DataError(source + ": cannot infer the config space of an empty dataset without " +
                      "its sidecar");
    }
    try {
      ds.space = ConfigSpace(std::move(inferred));
    } catch (const std::invalid_argument& e) {
      throw DataError(source + ": " + e.what());
    }
  }
  ds.validate();
  return ds;
}

std::filesystem::path sidecar_path(const std::filesystem::path& csv) {
  return std::filesystem::path(csv.string() + ".meta.json");
}

void export_csv(const SweepDataset& ds, const std::filesystem::path& csv) {
  ds.validate();
  {
    std::ofstream out(csv);
    if (!out) throw DataError("cannot write " + csv.string());
    write_csv(out, ds);
    if (!out) throw DataError("write failed: " + csv.string());
  }
  std::ofstream meta(sidecar_path(csv));
  if (!meta) throw DataError("cannot write " + sidecar_path(csv).string());
  meta << dataset_meta(ds).dump(2) << '\n';
}

SweepDataset import_csv(const std::filesystem::path& csv) {
  std::ifstream in(csv);
  if (!in) throw DataError("cannot open " + csv.string());
  std::optional<nlohmann::json> meta;
  const auto side = sidecar_path(csv);
  if (std::filesystem::exists(side)) {
    std::ifstream ms(side);
    try {
      meta = nlohmann::json::parse(ms);
    } catch (const nlohmann::json::exception& e) {
      throw DataError(side.string() + ": " + e.what());
    }
  }
  return read_csv(in, meta, csv.string());
}

}  // namespace autospmv
