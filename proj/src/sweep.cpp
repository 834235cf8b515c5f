#include "autospmv/sweep.hpp"

#include <omp.h>
#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <map>
#include <set>

#include "autospmv/common.hpp"
#include "autospmv/dataset_csv.hpp"
#include "autospmv/kernels.hpp"
#include "autospmv/numeric_text.hpp"
#include "autospmv/serial_kernels.hpp"

namespace autospmv {

MachineFingerprint current_machine() {
  MachineFingerprint m;
  char host[256] = {};
  if (gethostname(host, sizeof(host) - 1) == 0) m.host = host;
  m.worker_budget = omp_get_max_threads();
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  m.timestamp = buf;
  return m;
}

namespace {

std::string describe(const MeasurementRecord& r) {
  std::string s = r.matrix_id + " [";
  for (std::size_t i = 0; i < r.config.size(); ++i) s += (i ? "," : "") + r.config[i];
  return s + "]";
}

void check_record(const SweepDataset& ds, const MeasurementRecord& r) {
  if (!ds.space.contains(r.config)) throw DataError("record " + describe(r) + " is outside the space");
  if (r.extra.size() != ds.extra_columns.size()) {
    throw DataError("record " + describe(r) + " has the wrong number of extra columns");
  }
  if (r.feasible && !(r.latency_seconds > 0.0)) {
    throw DataError("feasible record " + describe(r) + " has non-positive latency");
  }
  if (r.energy_efficiency.has_value() != r.avg_power_watts.has_value()) {
    throw DataError("record " + describe(r) + ": energy_efficiency requires avg_power_watts");
  }
  if (r.energy_efficiency) {
    const double want = r.mflops / *r.avg_power_watts;
    if (std::abs(*r.energy_efficiency - want) > 1e-9 * std::max(std::abs(want), 1e-300)) {
      throw DataError("record " + describe(r) + ": energy_efficiency != mflops / avg_power_watts");
    }
  }
}

}  // namespace

void SweepDataset::validate() const {
  std::set<std::pair<std::string, ConfigPoint>> seen;
  for (const auto& r : records) {
    check_record(*this, r);
    if (!seen.emplace(r.matrix_id, r.config).second) {
      throw DataError("duplicate record " + describe(r));
    }
  }
}

void SweepDataset::add(MeasurementRecord r) {
  check_record(*this, r);
  if (contains(r.matrix_id, r.config)) throw DataError("duplicate record " + describe(r));
  records.push_back(std::move(r));
}

bool SweepDataset::contains(std::string_view matrix_id, const ConfigPoint& p) const {
  return std::any_of(records.begin(), records.end(), [&](const MeasurementRecord& r) {
    return r.matrix_id == matrix_id && r.config == p;
  });
}

std::vector<std::string> SweepDataset::matrix_ids() const {
  std::vector<std::string> ids;
  std::set<std::string> seen;
  for (const auto& r : records)
    if (seen.insert(r.matrix_id).second) ids.push_back(r.matrix_id);
  return ids;
}

bool SweepDataset::has_column(std::string_view column) const {
  static constexpr std::string_view builtin[] = {"latency_seconds", "mflops", "energy_joules",
                                                 "avg_power_watts", "energy_efficiency"};
  if (std::find(std::begin(builtin), std::end(builtin), column) != std::end(builtin)) return true;
  return std::find(extra_columns.begin(), extra_columns.end(), column) != extra_columns.end();
}

std::optional<double> SweepDataset::objective_value(const MeasurementRecord& r,
                                                    std::string_view column) const {
  if (column == "latency_seconds") return r.latency_seconds;
  if (column == "mflops") return r.mflops;
  if (column == "energy_joules") return r.energy_joules;
  if (column == "avg_power_watts") return r.avg_power_watts;
  if (column == "energy_efficiency") return r.energy_efficiency;
  const auto it = std::find(extra_columns.begin(), extra_columns.end(), column);
  if (it == extra_columns.end()) {
    throw std::invalid_argument("dataset has no column '" + std::string(column) + "'");
  }
  const auto& text = r.extra[static_cast<std::size_t>(it - extra_columns.begin())];
  if (text.empty()) return std::nullopt;
  const auto v = parse_double(text);
  if (!v) throw DataError("column " + std::string(column) + ": '" + text + "' is not a number");
  return v;
}

std::vector<double> probe_vector(std::size_t n) {
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = 1.0 + static_cast<double>(i % 7) / 8.0;
  return x;
}

namespace {

void verify_kernel(const NamedMatrix& nm, const FormatMatrix& f, const ExecConfig& cfg,
                   std::span<const double> x) {
  const auto& m = nm.matrix;
  std::vector<double> ref(static_cast<std::size_t>(m.n_rows()), 0.0);
  serial::spmv_triplets(m, x, ref);
  std::vector<double> mag(ref.size(), 0.0);
  for (const auto& e : m.entries()) {
    mag[static_cast<std::size_t>(e.row)] += std::abs(e.value * x[static_cast<std::size_t>(e.col)]);
  }
  const auto y = spmv(f, x, cfg);
  for (std::size_t i = 0; i < y.size(); ++i) {
    if (std::abs(y[i] - ref[i]) > 1e-12 * mag[i]) {
      throw std::logic_error("verification failed for " + nm.id + " in format " +
                             std::string(to_string(format_of(f))) + " at row " +
                             std::to_string(i));
    }
  }
}

}  // namespace

SweepDataset run_sweep(const std::vector<NamedMatrix>& matrices, const ConfigSpace& space,
                       const SweepOptions& opts, const SweepDataset* resume) {
  if (space.size() == 0) throw std::invalid_argument("sweep needs a nonempty config space");
  if (!space.executable()) {
    throw std::invalid_argument(
        "sweep can only execute format/worker_count/rows_per_chunk dimensions; import other "
        "dimensions from a measured dataset");
  }
  if (opts.rounds < 1) throw std::invalid_argument("sweep rounds must be >= 1");
  if (resume && !(resume->space == space)) {
    throw DataError("resume dataset was recorded over a different config space");
  }

  SweepDataset ds;
  ds.machine = resume ? resume->machine : current_machine();
  ds.space = space;
  const auto points = space.enumerate();

  std::map<std::pair<std::string, ConfigPoint>, const MeasurementRecord*> done;
  if (resume) {
    for (const auto& r : resume->records) done[{r.matrix_id, r.config}] = &r;
  }

  std::set<std::string> ids;
  for (const auto& nm : matrices) {
    if (!ids.insert(nm.id).second) throw std::invalid_argument("duplicate matrix id " + nm.id);

    const auto features = extract_features(nm.matrix);
    const auto x = probe_vector(static_cast<std::size_t>(nm.matrix.n_cols()));
    std::vector<double> y(static_cast<std::size_t>(nm.matrix.n_rows()));
    std::map<Format, std::optional<FormatMatrix>> converted;

    struct Pending {
      MeasurementRecord record;
      const FormatMatrix* matrix = nullptr;
      ExecConfig exec;
      std::vector<double> means;
      bool resumed = false;
    };
    std::vector<Pending> pending;
    for (const auto& p : points) {
      if (auto it = done.find({nm.id, p}); it != done.end()) {
        pending.push_back({*it->second, nullptr, {}, {}, true});
        continue;
      }
      const auto ep = resolve(space, p);
      Pending item;
      item.record.matrix_id = nm.id;
      item.record.features = features;
      item.record.config = p;
      item.exec = ep.exec;

      auto slot = converted.find(ep.format);
      if (slot == converted.end()) {
        std::optional<FormatMatrix> f;
        if (conversion_feasible(nm.matrix, ep.format, opts.formats)) {
          f = convert(nm.matrix, ep.format, opts.formats);
        }
        slot = converted.emplace(ep.format, std::move(f)).first;
      }
      if (!slot->second) {
        item.record.feasible = false;
      } else {
        item.matrix = &*slot->second;
        if (opts.verify) verify_kernel(nm, *item.matrix, ep.exec, x);
      }
      pending.push_back(std::move(item));
    }

    for (int round = 0; round < opts.rounds; ++round) {
      for (auto& item : pending) {
        if (!item.matrix) continue;
        const auto t = time_kernel([&] { spmv(*item.matrix, x, y, item.exec); }, opts.timing);
        item.means.push_back(t.mean_seconds);
        item.record.repetitions += t.repetitions;
      }
    }
    for (auto& item : pending) {
      auto& r = item.record;
      if (item.matrix) {
        auto& m = item.means;
        std::sort(m.begin(), m.end());
        const std::size_t h = m.size() / 2;
        r.latency_seconds = m.size() % 2 ? m[h] : 0.5 * (m[h - 1] + m[h]);
        r.mflops = mflops(nm.matrix.nnz(), KernelTiming{r.latency_seconds, r.repetitions, 0.0});
      }
      if (!item.resumed && opts.on_record) opts.on_record(r);
      ds.add(std::move(r));
    }
    if (opts.checkpoint) export_csv(ds, *opts.checkpoint);
  }
  // Resumed records for matrices outside this run are kept: the result is
  // the union of everything completed so far.
  if (resume) {
    for (const auto& r : resume->records) {
      if (!ids.count(r.matrix_id)) ds.add(r);
    }
  }
  return ds;
}

NamedMatrix load_matrix_file(const std::filesystem::path& path) {
  try {
    return {path.stem().string(), read_matrix_market(path)};
  } catch (const ParseError& e) {
    throw DataError(path.string() + ": " + e.what());
  } catch (const std::invalid_argument& e) {
    throw DataError(path.string() + ": " + e.what());
  } catch (const DataError&) {
    throw;
  } catch (const std::runtime_error& e) {
    throw DataError(e.what());
  }
}

std::vector<NamedMatrix> load_matrix_dir(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) throw DataError(dir.string() + " is not a directory");
  std::vector<std::filesystem::path> files;
  for (const auto& e : std::filesystem::directory_iterator(dir)) {
    if (e.is_regular_file() && e.path().extension() == ".mtx") files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  std::vector<NamedMatrix> out;
  for (const auto& f : files) out.push_back(load_matrix_file(f));
  return out;
}

}  // namespace autospmv
