#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <tuple>

#include "autospmv/common.hpp"
#include "autospmv/csv.hpp"
#include "autospmv/dataset_csv.hpp"
#include "autospmv/labeling.hpp"
#include "autospmv/numeric_text.hpp"
#include "autospmv/overheads.hpp"
#include "autospmv/random.hpp"
#include "autospmv/sweep.hpp"
#include "autospmv/synthetic.hpp"
#include "doctest.h"

using namespace autospmv;
namespace fs = std::filesystem;

namespace {

const TimingParams kFast{Seconds{0.002}, 1000, 1};

fs::path scratch(const std::string& name) {
  auto p = fs::temp_directory_path() / ("autospmv_harness_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

TripletMatrix identity(index_t n) {
  std::vector<Triplet> t;
  for (index_t i = 0; i < n; ++i) t.push_back({i, i, 1.0});
  return TripletMatrix(n, n, t);
}

/// Random dataset with coarse latencies so ties are common.
SweepDataset random_dataset(Rng& rng, bool with_extra) {
  SweepDataset ds;
  ds.machine = {"host", 4, "2026-01-01T00:00:00Z"};
  ds.space = ConfigSpace({{"format", {"csr", "ell", "sell"}},
                          {"tb_size", {"128", "256", "512"}},
                          {"memory", {"L1", "shared"}}});
  if (with_extra) ds.extra_columns = {"gpu_energy", "note"};
  const int n_mat = 1 + static_cast<int>(rng.uniform_index(6));
  for (int m = 0; m < n_mat; ++m) {
    SparsityFeatures f{static_cast<double>(10 + m), static_cast<double>(40 + m), 4.0, 0.5,
                       0.8, 4.0, 4.0, std::sqrt(0.5)};
    for (const auto& p : ds.space.enumerate()) {
      if (rng.uniform01() < 0.1) continue;  // sparse coverage
      MeasurementRecord r;
      r.matrix_id = "m" + std::to_string(m);
      r.features = f;
      r.config = p;
      r.feasible = rng.uniform01() > 0.2;
      if (r.feasible) {
        r.latency_seconds = 1e-3 * static_cast<double>(1 + rng.uniform_index(3));
        r.mflops = 2 * f.nnz / (r.latency_seconds * 1e6);
        r.repetitions = 10 + rng.uniform_index(100);
        if (rng.uniform01() < 0.5) {
          r.avg_power_watts = 50.0 + static_cast<double>(rng.uniform_index(3));
          r.energy_joules = *r.avg_power_watts * r.latency_seconds;
          r.energy_efficiency = r.mflops / *r.avg_power_watts;
        }
      }
      if (with_extra) {
        r.extra = {rng.uniform01() < 0.2 ? "" : format_double(static_cast<double>(rng.uniform_index(4))),
                   rng.uniform01() < 0.5 ? "plain" : "has,comma \"q\""};
      }
      ds.records.push_back(std::move(r));
    }
  }
  return ds;
}

/// Independent winner: filter, then min_element over a tuple key.
std::optional<ConfigPoint> brute_force_winner(const SweepDataset& ds, const std::string& id,
                                              const Objective& obj) {
  std::vector<std::tuple<double, double, std::vector<std::size_t>, ConfigPoint>> keys;
  for (const auto& r : ds.records) {
    if (r.matrix_id != id || !r.feasible) continue;
    const auto v = ds.objective_value(r, obj.column);
    if (!v) continue;
    const double signed_v = obj.direction == Direction::minimize ? *v : -*v;
    keys.emplace_back(signed_v, r.latency_seconds, ds.space.ordinal(r.config), r.config);
  }
  if (keys.empty()) return std::nullopt;
  return std::get<3>(*std::min_element(keys.begin(), keys.end()));
}

}  // namespace

TEST_CASE("csv quoting and reading") {
  CHECK(csv::escape("plain") == "plain");
  CHECK(csv::escape("a,b") == "\"a,b\"");
  CHECK(csv::escape("say \"hi\"") == "\"say \"\"hi\"\"\"");
  CHECK(csv::escape("two\nlines") == "\"two\nlines\"");

  std::istringstream in("a,\"b,c\",\"d\"\"e\"\r\n\"multi\nline\",,x\nlast\n");
  csv::Reader r(in);
  std::vector<std::string> f;
  REQUIRE(r.next(f));
  CHECK(f == std::vector<std::string>{"a", "b,c", "d\"e"});
  CHECK(r.line() == 1);
  REQUIRE(r.next(f));
  CHECK(f == std::vector<std::string>{"multi\nline", "", "x"});
  CHECK(r.line() == 2);
  REQUIRE(r.next(f));
  CHECK(f == std::vector<std::string>{"last"});
  CHECK(r.line() == 4);
  CHECK_FALSE(r.next(f));

  std::istringstream bad("\"open\n");
  csv::Reader rb(bad);
  CHECK_THROWS_AS(rb.next(f), DataError);
}

TEST_CASE("config space") {
  ConfigSpace s({{"a", {"x", "y"}}, {"b", {"1", "2", "3"}}});
  CHECK(s.point_count() == 6);
  const auto pts = s.enumerate();
  REQUIRE(pts.size() == 6);
  CHECK(pts[0] == ConfigPoint{"x", "1"});
  CHECK(pts[1] == ConfigPoint{"x", "2"});
  CHECK(pts[5] == ConfigPoint{"y", "3"});
  CHECK(s.contains({"y", "2"}));
  CHECK_FALSE(s.contains({"y", "4"}));
  CHECK_FALSE(s.contains({"y"}));
  CHECK(s.ordinal({"y", "2"}) == std::vector<std::size_t>{1, 1});
  CHECK(s.default_point() == ConfigPoint{"x", "1"});
  CHECK_FALSE(s.executable());
  CHECK(ConfigSpace::from_json(s.to_json()) == s);

  CHECK_THROWS_AS(ConfigSpace({{"a", {"x"}}, {"a", {"y"}}}), std::invalid_argument);
  CHECK_THROWS_AS(ConfigSpace(std::vector<ConfigDimension>{{"a", {}}}), std::invalid_argument);
  CHECK_THROWS_AS(ConfigSpace({{"a", {"x", "x"}}}), std::invalid_argument);

  auto cpu = default_cpu_space();
  CHECK(cpu.point_count() == 24);
  CHECK(cpu.executable());
  CHECK(cpu.default_point() == ConfigPoint{"csr", "1", "16"});
  ConfigSpace late_csr({{"format", {"ell", "csr"}}});
  CHECK(late_csr.default_point() == ConfigPoint{"csr"});
  const auto e = resolve(cpu, {"sell", "4", "256"});
  CHECK(e.format == Format::sell);
  CHECK(e.exec.worker_count == 4);
  CHECK(e.exec.rows_per_chunk == 256);
  ConfigSpace bad(std::vector<ConfigDimension>{{"format", {"coo"}}});
  CHECK_THROWS_AS(resolve(bad, {"coo"}), std::invalid_argument);

  // Numeric JSON values are accepted and kept as text.
  auto j = nlohmann::json::parse(R"({"dimensions":[{"name":"worker_count","values":[1,2]}]})");
  CHECK(ConfigSpace::from_json(j).dims()[0].values == std::vector<std::string>{"1", "2"});
}

TEST_CASE("sweep: record counts, verification, infeasible points") {
  Rng rng(1);
  SweepOptions opts;
  opts.timing = kFast;
  opts.verify = true;

  ConfigSpace two({{"format", {"csr", "ell"}}});
  auto ds = run_sweep({{"r", synthetic::random_sparse(30, 30, 0.2, rng)}}, two, opts);
  CHECK(ds.records.size() == 2);
  for (const auto& r : ds.records) {
    CHECK(r.feasible);
    CHECK(r.latency_seconds > 0);
    CHECK(r.repetitions >= 1);
    CHECK(r.mflops > 0);
  }

  ConfigSpace formats({{"format", {"csr", "ell", "bell", "sell"}}});
  auto id = run_sweep({{"eye", identity(50)}}, formats, opts);
  CHECK(id.records.size() == 4);
  for (const auto& r : id.records) CHECK(r.feasible);

  // A dense row makes ELL and BELL exceed a tight slot guard; CSR and SELL fit.
  opts.formats.limits.max_slots = 3000;
  auto wide = synthetic::with_dense_row(500, 0, rng);
  auto guarded = run_sweep({{"wide", wide}}, formats, opts);
  REQUIRE(guarded.records.size() == 4);
  CHECK(guarded.records[0].feasible);
  CHECK_FALSE(guarded.records[1].feasible);
  CHECK_FALSE(guarded.records[2].feasible);
  CHECK(guarded.records[1].latency_seconds == 0);
  CHECK(guarded.records[3].feasible);

  CHECK_THROWS_AS(run_sweep({{"x", identity(3)}}, ConfigSpace(std::vector<ConfigDimension>{{"tb_size", {"128"}}}), opts),
                  std::invalid_argument);
  CHECK_THROWS_AS(run_sweep({{"x", identity(3)}, {"x", identity(4)}}, formats, opts),
                  std::invalid_argument);
}

TEST_CASE("sweep: interleaved rounds keep one record per point") {
  Rng rng(2);
  SweepOptions opts;
  opts.timing = kFast;
  opts.rounds = 3;
  std::size_t callbacks = 0;
  opts.on_record = [&](const MeasurementRecord&) { ++callbacks; };
  ConfigSpace space({{"format", {"csr", "sell"}}, {"rows_per_chunk", {"16", "256"}}});
  const auto ds = run_sweep({{"r", synthetic::random_sparse(40, 40, 0.1, rng)}}, space, opts);
  CHECK(ds.records.size() == 4);
  CHECK(callbacks == 4);
  for (const auto& r : ds.records) {
    CHECK(r.repetitions >= 3);
    CHECK(r.latency_seconds > 0);
  }
  opts.rounds = 0;
  CHECK_THROWS_AS(run_sweep({{"x", identity(3)}}, space, opts), std::invalid_argument);
}

TEST_CASE("sweep: resume yields the union without duplicates") {
  Rng rng(2);
  std::vector<NamedMatrix> all;
  for (int i = 0; i < 4; ++i) all.push_back({"m" + std::to_string(i), synthetic::random_sparse(40, 40, 0.1, rng)});
  const auto space = default_cpu_space();
  SweepOptions opts;
  opts.timing = kFast;
  const auto dir = scratch("resume");
  opts.checkpoint = dir / "ckpt.csv";

  auto first = run_sweep({all[0], all[1]}, space, opts);
  REQUIRE(fs::exists(*opts.checkpoint));
  auto restored = import_csv(*opts.checkpoint);
  CHECK(restored.records == first.records);

  auto resumed = run_sweep({all[1], all[2], all[3]}, space, opts, &restored);
  CHECK(resumed.records.size() == 4 * space.point_count());
  CHECK_NOTHROW(resumed.validate());
  for (const auto& r : first.records) {
    auto it = std::find_if(resumed.records.begin(), resumed.records.end(), [&](const auto& x) {
      return x.matrix_id == r.matrix_id && x.config == r.config;
    });
    REQUIRE(it != resumed.records.end());
    CHECK(it->latency_seconds == r.latency_seconds);
  }
  fs::remove_all(dir);
}

TEST_CASE("sweep: repeat-run stability on 10 matrices x 16 points (advisory)") {
  Rng rng(3);
  std::vector<NamedMatrix> ms;
  for (int i = 0; i < 10; ++i) ms.push_back({"s" + std::to_string(i), synthetic::random_sparse(200, 200, 0.05, rng)});
  ConfigSpace space({{"format", {"csr", "ell", "bell", "sell"}},
                     {"worker_count", {"1", "2"}},
                     {"rows_per_chunk", {"16", "64"}}});
  SweepOptions opts;
  opts.timing = kFast;
  auto a = run_sweep(ms, space, opts);
  auto b = run_sweep(ms, space, opts);
  REQUIRE(a.records.size() == 160);
  REQUIRE(b.records.size() == 160);
  std::size_t stable = 0;
  for (std::size_t i = 0; i < 160; ++i) {
    const double ratio = b.records[i].latency_seconds / a.records[i].latency_seconds;
    stable += ratio >= 0.5 && ratio <= 2.0;
  }
  WARN(stable == 160);
  CHECK(stable > 0);
}

TEST_CASE("csv export/import round-trips") {
  Rng rng(4);
  const auto dir = scratch("csv");
  for (int t = 0; t < 10; ++t) {
    auto ds = random_dataset(rng, t % 2 == 0);
    export_csv(ds, dir / "ds.csv");
    auto back = import_csv(dir / "ds.csv");
    CHECK(back.records == ds.records);
    CHECK(back.space == ds.space);
    CHECK(back.machine == ds.machine);
    CHECK(back.extra_columns == ds.extra_columns);
  }

  // A measured 160-record dataset.
  std::vector<NamedMatrix> ms;
  for (int i = 0; i < 10; ++i) ms.push_back({"r" + std::to_string(i), synthetic::random_sparse(30, 30, 0.1, rng)});
  ConfigSpace space({{"format", {"csr", "ell", "bell", "sell"}},
                     {"worker_count", {"1", "2"}},
                     {"rows_per_chunk", {"16", "64"}}});
  SweepOptions opts;
  opts.timing = TimingParams{Seconds{0.0005}, 100, 0};
  auto measured = run_sweep(ms, space, opts);
  export_csv(measured, dir / "measured.csv");
  CHECK(import_csv(dir / "measured.csv").records == measured.records);

  SweepDataset empty;
  empty.space = space;
  export_csv(empty, dir / "empty.csv");
  std::ifstream e(dir / "empty.csv");
  std::string content((std::istreambuf_iterator<char>(e)), std::istreambuf_iterator<char>());
  CHECK(std::count(content.begin(), content.end(), '\n') == 1);
  auto empty_back = import_csv(dir / "empty.csv");
  CHECK(empty_back.records.empty());
  CHECK(empty_back.space == space);
  fs::remove_all(dir);
}

TEST_CASE("csv import: sidecar-free files, extra columns, errors") {
  const std::string header =
      "matrix_id,n,nnz,avg_nnz,var_nnz,ell_ratio,median,mode,std_nnz,format,tb_size,feasible,"
      "repetitions,latency_seconds,mflops,energy_joules,avg_power_watts,energy_efficiency,"
      "gpu_joules\n";
  const std::string rows =
      "a,4,8,2,0,1,2,2,0,csr,128,true,10,0.002,0.008,,,,5\n"
      "a,4,8,2,0,1,2,2,0,ell,128,true,10,0.001,0.016,,,,9\n"
      "a,4,8,2,0,1,2,2,0,ell,256,false,0,,,,,,\n";
  std::istringstream in(header + rows);
  auto ds = read_csv(in);
  CHECK(ds.space.dims()[0].values == std::vector<std::string>{"csr", "ell"});
  CHECK(ds.space.dims()[1].values == std::vector<std::string>{"128", "256"});
  CHECK(ds.extra_columns == std::vector<std::string>{"gpu_joules"});
  auto lab = label_dataset(ds, make_objective("gpu_joules"));
  CHECK(lab.winners.front() == ConfigPoint{"csr", "128"});
  auto lat = label_dataset(ds, make_objective("latency_seconds"));
  CHECK(lat.winners.front() == ConfigPoint{"ell", "128"});

  auto expect_line = [&](const std::string& text, const std::string& needle) {
    std::istringstream s(text);
    try {
      read_csv(s, std::nullopt, "f.csv");
      FAIL("expected a DataError");
    } catch (const DataError& e) {
      CHECK(std::string(e.what()).find(needle) != std::string::npos);
    }
  };
  expect_line(header + "a,4,8,2,0,1,2,2,0,csr,128,true,10,0.002,0.008,,,\n", "f.csv:2:");
  expect_line(header + rows + "b,x,8,2,0,1,2,2,0,csr,128,true,10,0.002,0.008,,,,5\n", "f.csv:5:");
  expect_line(header + "a,4,8,2,0,1,2,2,0,csr,128,maybe,10,0.002,0.008,,,,5\n", "f.csv:2:");
  expect_line(header + "a,4,8,2,0,1,2,2,0,csr,128,true,10,,0.008,,,,5\n", "f.csv:2:");
  expect_line(header + rows + rows, "duplicate");
  expect_line("matrix_id,n\n", "f.csv:1:");
  // energy_efficiency inconsistent with mflops / avg_power.
  expect_line(header + "a,4,8,2,0,1,2,2,0,csr,128,true,10,0.002,8,1,10,0.7,5\n", "energy_efficiency");

  std::istringstream again(header + rows);
  nlohmann::json meta = dataset_meta(ds);
  meta["schema_version"] = 99;
  CHECK_THROWS_WITH_AS(read_csv(again, meta), doctest::Contains("schema version"), DataError);
}

TEST_CASE("labeling: trivial cases") {
  SweepDataset ds;
  ds.space = ConfigSpace({{"format", {"csr"}}, {"worker_count", {"2"}}});
  for (int m = 0; m < 3; ++m) {
    MeasurementRecord r;
    r.matrix_id = "m" + std::to_string(m);
    r.config = {"csr", "2"};
    r.latency_seconds = 1e-3 * (m + 1);
    ds.records.push_back(r);
  }
  auto lab = label_dataset(ds, make_objective("latency_seconds"));
  REQUIRE(lab.per_dimension.size() == 2);
  CHECK(lab.per_dimension[0].classes == std::vector<std::string>{"csr"});
  CHECK(lab.per_dimension[1].classes == std::vector<std::string>{"2"});
  CHECK(lab.per_dimension[0].size() == 3);

  // ELL strictly dominates on every matrix.
  SweepDataset dom;
  dom.space = ConfigSpace({{"format", {"csr", "ell", "sell"}}});
  for (int m = 0; m < 5; ++m) {
    for (const auto& f : {"csr", "ell", "sell"}) {
      MeasurementRecord r;
      r.matrix_id = "m" + std::to_string(m);
      r.config = {f};
      r.latency_seconds = std::string(f) == "ell" ? 1e-4 : 1e-3 * (m + 1);
      r.mflops = 1.0 / r.latency_seconds;
      dom.records.push_back(r);
    }
  }
  auto l2 = label_dataset(dom, make_objective("latency_seconds"));
  for (std::size_t i = 0; i < l2.per_dimension[0].size(); ++i) {
    CHECK(l2.per_dimension[0].classes[static_cast<std::size_t>(l2.per_dimension[0].label_of(i))] == "ell");
  }
  auto l3 = label_dataset(dom, make_objective("mflops"));
  CHECK(l3.winners == l2.winners);

  // Ties: equal objective and latency resolve to the earliest declared value.
  SweepDataset tie;
  tie.space = ConfigSpace({{"format", {"sell", "csr"}}});
  for (const auto& f : {"csr", "sell"}) {
    MeasurementRecord r;
    r.matrix_id = "t";
    r.config = {f};
    r.latency_seconds = 1e-3;
    tie.records.push_back(r);
  }
  CHECK(label_dataset(tie, make_objective("latency_seconds")).winners.front() == ConfigPoint{"sell"});

  // A matrix with only infeasible records is dropped.
  MeasurementRecord bad;
  bad.matrix_id = "hopeless";
  bad.config = {"csr"};
  bad.feasible = false;
  tie.records.push_back(bad);
  auto l4 = label_dataset(tie, make_objective("latency_seconds"));
  CHECK(l4.dropped == std::vector<std::string>{"hopeless"});
  CHECK(l4.matrix_ids == std::vector<std::string>{"t"});

  CHECK_THROWS_AS(label_dataset(tie, make_objective("no_such_column")), std::invalid_argument);
  CHECK(make_objective("energy_efficiency").direction == Direction::maximize);
  CHECK(make_objective("energy_joules").direction == Direction::minimize);
  CHECK(make_objective("gpu_x", "max").direction == Direction::maximize);
  CHECK_THROWS_AS(make_objective("gpu_x", "up"), std::invalid_argument);
}

TEST_CASE("labeling matches brute force on 20 random datasets") {
  Rng rng(5);
  for (int t = 0; t < 20; ++t) {
    auto ds = random_dataset(rng, true);
    for (const auto& obj : {make_objective("latency_seconds"), make_objective("mflops"),
                            make_objective("energy_efficiency"), make_objective("gpu_energy")}) {
      auto lab = label_dataset(ds, obj);
      for (const auto& id : ds.matrix_ids()) {
        const auto want = brute_force_winner(ds, id, obj);
        const auto pos = std::find(lab.matrix_ids.begin(), lab.matrix_ids.end(), id);
        if (!want) {
          CHECK(pos == lab.matrix_ids.end());
          continue;
        }
        REQUIRE(pos != lab.matrix_ids.end());
        const auto k = static_cast<std::size_t>(pos - lab.matrix_ids.begin());
        CHECK(lab.winners[k] == *want);
        for (std::size_t d = 0; d < ds.space.size(); ++d) {
          const auto& pd = lab.per_dimension[d];
          CHECK(pd.classes[static_cast<std::size_t>(pd.label_of(k))] == (*want)[d]);
        }
        // Exhaustive consistency: no feasible record strictly beats the winner.
        const auto& wr = ds.records[*winning_record(ds, id, obj)];
        const double wv = *ds.objective_value(wr, obj.column);
        for (const auto& r : ds.records) {
          if (r.matrix_id != id || !r.feasible) continue;
          const auto v = ds.objective_value(r, obj.column);
          if (!v) continue;
          CHECK((obj.direction == Direction::minimize ? *v >= wv : *v <= wv));
        }
      }
    }
  }
}

TEST_CASE("overheads: tiny matrix, ladder trend, CSV round-trip") {
  OverheadMeasureOptions opts;
  opts.timing = TimingParams{Seconds{0.005}, 100000, 1};
  int probe_calls = 0;
  opts.format_probe = [&](const SparsityFeatures&) { ++probe_calls; };
  auto tiny = measure_overheads({{"tiny", identity(3)}}, opts);
  REQUIRE(tiny.size() == 1);
  CHECK(tiny[0].f_latency > 0);
  for (Format f : kAllFormats) {
    REQUIRE(tiny[0].conversion(f).has_value());
    CHECK(*tiny[0].conversion(f) > 0);
  }
  CHECK(tiny[0].o_latency == 0);
  CHECK(tiny[0].p_latency > 0);
  CHECK(probe_calls > 0);
  CHECK(*tiny[0].total(Format::ell) >= tiny[0].f_latency);

  Rng rng(6);
  std::vector<NamedMatrix> ladder;
  for (index_t n : {250, 2500, 25000, 250000}) {
    ladder.push_back({"u" + std::to_string(n), synthetic::uniform_rows(n, n, 4, rng)});
  }
  opts.targets = {Format::csr, Format::sell};
  opts.format_probe = nullptr;
  auto obs = measure_overheads(ladder, opts);
  for (std::size_t i = 1; i < obs.size(); ++i) {
    CHECK(obs[i].nnz() == 10 * obs[i - 1].nnz());
    CHECK(*obs[i].conversion(Format::csr) > *obs[i - 1].conversion(Format::csr));
    CHECK(obs[i].f_latency > obs[i - 1].f_latency);
  }
  CHECK_FALSE(obs[0].conversion(Format::ell).has_value());

  std::stringstream s;
  write_overheads_csv(s, obs);
  CHECK(read_overheads_csv(s) == obs);
  std::istringstream bad("nope\n");
  CHECK_THROWS_AS(read_overheads_csv(bad), DataError);
}
