// autospmv: sweep, train, recommend and decide from the command line.
//
// Exit codes: 0 success, 1 usage error, 2 data or schema error, 3 infeasible
// input (memory guard).

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "autospmv/autotune.hpp"
#include "autospmv/common.hpp"
#include "autospmv/csv.hpp"
#include "autospmv/dataset_csv.hpp"
#include "autospmv/numeric_text.hpp"
#include "autospmv/overhead_model.hpp"
#include "autospmv/overheads.hpp"
#include "autospmv/report.hpp"
#include "autospmv/sweep.hpp"
#include "autospmv/synthetic.hpp"

namespace fs = std::filesystem;
using namespace autospmv;

namespace {

enum Exit { kOk = 0, kUsage = 1, kData = 2, kInfeasible = 3 };

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InfeasibleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct TimingFlags {
  double min_total_ms = 200.0;
  std::size_t max_reps = 200000;
  int warmup = 3;

  void attach(CLI::App* app) {
    app->add_option("--min-total-ms", min_total_ms, "Timed wall time per measurement")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    app->add_option("--max-reps", max_reps, "Upper bound on timed runs")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    app->add_option("--warmup", warmup, "Untimed runs before timing")
        ->check(CLI::NonNegativeNumber)
        ->capture_default_str();
  }
  TimingParams params() const { return {Seconds{min_total_ms / 1000.0}, max_reps, warmup}; }
};

struct GuardFlags {
  std::size_t max_slots = std::size_t{1} << 31;

  void attach(CLI::App* app) {
    app->add_option("--max-slots", max_slots, "Memory guard: stored value slots per conversion")
        ->check(CLI::PositiveNumber);
  }
  FormatOptions formats() const {
    FormatOptions f;
    f.limits.max_slots = max_slots;
    return f;
  }
};

void write_text(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path);
  out << text;
  if (!out) throw DataError("write failed: " + path);
}

nlohmann::json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path);
  try {
    nlohmann::json j;
    in >> j;
    return j;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(path + ": " + e.what());
  }
}

std::vector<NamedMatrix> load_inputs(const std::vector<std::string>& paths) {
  std::vector<NamedMatrix> out;
  for (const auto& p : paths) {
    if (fs::is_directory(p)) {
      for (auto& m : load_matrix_dir(p)) out.push_back(std::move(m));
    } else {
      out.push_back(load_matrix_file(p));
    }
  }
  if (out.empty()) throw DataError("no matrices found");
  return out;
}

Format format_arg(const std::string& name) {
  const auto f = parse_format(name);
  if (!f) throw UsageError("unknown format '" + name + "' (csr, ell, bell, sell)");
  return *f;
}

OverheadModel load_overhead(const std::string& path) {
  try {
    return OverheadModel::load(path);
  } catch (const std::invalid_argument& e) {
    throw DataError(e.what());
  } catch (const std::runtime_error& e) {
    throw DataError(e.what());
  }
}

// --- features ---------------------------------------------------------------

struct FeaturesCmd {
  std::string matrix;
  bool json = false;
  std::uint64_t seed = 0;

  void attach(CLI::App& app) {
    auto* c = app.add_subcommand("features", "Print the eight sparsity features of a matrix");
    c->add_option("matrix", matrix, "Matrix Market file")->required();
    c->add_flag("--json", json, "JSON object instead of CSV");
    c->add_option("--seed", seed, "Unused; accepted for uniformity");
    c->callback([this] { run(); });
  }

  void run() const {
    const auto m = load_matrix_file(matrix);
    const auto f = extract_features(m.matrix);
    const auto values = f.to_array();
    if (json) {
      nlohmann::json j;
      j["matrix_id"] = m.id;
      for (std::size_t i = 0; i < values.size(); ++i) {
        j[std::string(SparsityFeatures::kNames[i])] = values[i];
      }
      std::cout << j.dump(1) << '\n';
      return;
    }
    std::vector<std::string> header{"matrix_id"}, row{m.id};
    for (std::size_t i = 0; i < values.size(); ++i) {
      header.emplace_back(SparsityFeatures::kNames[i]);
      row.push_back(format_double(values[i]));
    }
    std::cout << csv::join(header) << '\n' << csv::join(row) << '\n';
  }
};

// --- sweep ------------------------------------------------------------------

struct SweepCmd {
  std::vector<std::string> matrices;
  std::string space_file;
  std::string out;
  bool resume = false;
  bool verify = false;
  int rounds = 1;
  std::uint64_t seed = 0;
  TimingFlags timing;
  GuardFlags guard;

  void attach(CLI::App& app) {
    auto* c = app.add_subcommand("sweep", "Time every (matrix, config point) pair");
    c->add_option("--matrices", matrices, "Directory of .mtx files or individual files")
        ->required();
    c->add_option("--space", space_file, "Config space JSON (default: 4 formats x 3 x 2)");
    c->add_option("--out", out, "Dataset CSV; a .meta.json sidecar is written next to it")
        ->required();
    c->add_flag("--resume", resume, "Reuse records already present in --out");
    c->add_flag("--verify", verify, "Check every kernel against the COO reference first");
    c->add_option("--rounds", rounds, "Interleaved timing rounds per matrix; median is kept")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    c->add_option("--seed", seed, "Unused; accepted for uniformity");
    timing.attach(c);
    guard.attach(c);
    c->callback([this] { run(); });
  }

  void run() const {
    const auto space = space_file.empty() ? default_cpu_space() : ConfigSpace::load(space_file);
    if (!space.executable()) {
      throw UsageError("sweeps need format, worker_count and rows_per_chunk dimensions only");
    }
    const auto mats = load_inputs(matrices);
    std::optional<SweepDataset> previous;
    if (resume && fs::exists(out)) previous = import_csv(out);

    SweepOptions opts;
    opts.timing = timing.params();
    opts.formats = guard.formats();
    opts.verify = verify;
    opts.rounds = rounds;
    opts.checkpoint = fs::path(out);
    std::size_t done = 0;
    const std::size_t total = mats.size() * space.point_count();
    opts.on_record = [&](const MeasurementRecord& r) {
      ++done;
      std::cerr << "[" << done << "/" << total << "] " << r.matrix_id << " "
                << csv::join(r.config)
                << (r.feasible ? " " + format_double(r.latency_seconds) + " s" : " infeasible")
                << '\n';
    };
    const auto ds = run_sweep(mats, space, opts, previous ? &*previous : nullptr);
    export_csv(ds, out);
    std::cerr << "wrote " << ds.records.size() << " records to " << out << '\n';
  }
};

// --- train ------------------------------------------------------------------

struct TrainCmd {
  std::string dataset;
  std::string objective = "latency_seconds";
  std::string direction;
  std::string learner = "decision_tree";
  int trials = 20;
  double train_fraction = 0.8;
  std::uint64_t seed = 0;
  std::string out;
  int workers = 1;
  int latency_trees = 100;
  bool no_latency = false;

  void attach(CLI::App& app) {
    auto* c = app.add_subcommand("train", "Label a dataset and train the per-dimension models");
    c->add_option("--dataset", dataset, "Dataset CSV")->required();
    c->add_option("--objective", objective, "Objective column")->capture_default_str();
    c->add_option("--direction", direction, "min or max (default by column)")
        ->check(CLI::IsMember({"min", "max"}));
    c->add_option("--learner", learner, "Classifier family")
        ->check(CLI::IsMember({"decision_tree", "random_forest", "nearest_centroid"}))
        ->capture_default_str();
    c->add_option("--trials", trials, "Random-search trials per dimension")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    c->add_option("--train-fraction", train_fraction, "Share of matrices used for training")
        ->check(CLI::Range(0.01, 0.99))
        ->capture_default_str();
    c->add_option("--seed", seed, "Seed for the split, search and forests")->capture_default_str();
    c->add_option("--out", out, "Model bundle directory")->required();
    c->add_option("--workers", workers, "Training threads")->check(CLI::PositiveNumber);
    c->add_option("--latency-trees", latency_trees, "Trees in the latency forest")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    c->add_flag("--no-latency", no_latency, "Skip the latency regressor");
    c->callback([this] { run(); });
  }

  void run() const {
    const auto ds = import_csv(dataset);
    if (!ds.has_column(objective)) throw DataError(dataset + " has no column '" + objective + "'");
    const auto obj = direction.empty() ? make_objective(objective)
                                       : make_objective(objective, direction);
    TrainOptions opts;
    opts.classifier = *parse_learner(learner);
    opts.trials = trials;
    opts.train_fraction = train_fraction;
    opts.seed = seed;
    opts.worker_count = workers;
    opts.latency_trees = latency_trees;
    opts.latency_regressor = !no_latency;
    const auto bundle = train_pipeline(ds, obj, opts);
    bundle.save(out);

    nlohmann::json summary;
    summary["bundle"] = out;
    summary["train_count"] = bundle.train_ids.size();
    summary["holdout_count"] = bundle.holdout_ids.size();
    for (const auto& c : bundle.classifiers) {
      summary["holdout_accuracy"][c.dimension] = c.report.accuracy;
    }
    if (bundle.latency && bundle.latency->report) {
      summary["latency_r2_log_space"] = bundle.latency->report->r2;
    }
    std::cout << summary.dump(1) << '\n';
  }
};

// --- recommend --------------------------------------------------------------

struct RecommendCmd {
  std::string models;
  std::vector<std::string> matrices;
  std::string out;
  bool verify = false;
  std::uint64_t seed = 0;
  TimingFlags timing;

  void attach(CLI::App& app) {
    auto* c = app.add_subcommand("recommend", "Compile-time mode: predict tuning parameters");
    c->add_option("--models", models, "Model bundle directory")->required();
    c->add_option("matrices", matrices, "Matrix Market files or directories")->required();
    c->add_option("--out", out, "Write JSON here instead of stdout");
    c->add_flag("--verify", verify, "Time the recommended against the default config");
    c->add_option("--seed", seed, "Unused; accepted for uniformity");
    timing.attach(c);
    c->callback([this] { run(); });
  }

  void run() const {
    const auto bundle = ModelBundle::load(models);
    CompileTimeOptions opts;
    opts.verify = verify;
    opts.timing = timing.params();
    nlohmann::json all = nlohmann::json::array();
    const auto mats = load_inputs(matrices);
    for (const auto& m : mats) all.push_back(compile_time_optimize(m, bundle, opts).to_json());
    write_text(out, (all.size() == 1 ? all[0] : all).dump(1) + "\n");
  }
};

// --- decide -----------------------------------------------------------------

struct DecideCmd {
  std::string models;
  std::string overhead;
  std::string matrix;
  std::uint64_t iterations = 0;
  bool dry_run = false;
  std::uint64_t seed = 0;
  GuardFlags guard;

  void attach(CLI::App& app) {
    auto* c = app.add_subcommand("decide", "Run-time mode: convert only when it pays off");
    c->add_option("--models", models, "Model bundle directory")->required();
    c->add_option("--overhead", overhead, "Overhead model JSON")->required();
    c->add_option("--iterations", iterations, "Expected SpMV calls on this matrix")
        ->required()
        ->check(CLI::PositiveNumber);
    c->add_option("matrix", matrix, "Matrix Market file")->required();
    c->add_flag("--dry-run", dry_run, "Decide without converting");
    c->add_option("--seed", seed, "Unused; accepted for uniformity");
    guard.attach(c);
    c->callback([this] { run(); });
  }

  void run() const {
    const auto bundle = ModelBundle::load(models);
    const auto om = load_overhead(overhead);
    RuntimePredictors p;
    try {
      p = make_predictors(bundle, om);
    } catch (const std::invalid_argument& e) {
      throw DataError(e.what());
    }
    RuntimeOptions opts;
    opts.formats = guard.formats();
    opts.perform_conversion = !dry_run;
    const auto d = run_time_optimize(load_matrix_file(matrix), p, iterations, opts);
    std::cout << d.to_json().dump(1) << '\n';
  }
};

// --- convert ----------------------------------------------------------------

struct ConvertCmd {
  std::string matrix;
  std::string format;
  bool check = false;
  std::uint64_t seed = 0;
  GuardFlags guard;

  void attach(CLI::App& app) {
    auto* c = app.add_subcommand("convert", "Convert a matrix and report the stored layout");
    c->add_option("matrix", matrix, "Matrix Market file")->required();
    c->add_option("--format", format, "csr, ell, bell or sell")->required();
    c->add_flag("--check", check, "Verify the layout reconstructs the input exactly");
    c->add_option("--seed", seed, "Unused; accepted for uniformity");
    guard.attach(c);
    c->callback([this] { run(); });
  }

  void run() const {
    const auto fmt = format_arg(format);
    const auto m = load_matrix_file(matrix);
    const auto opts = guard.formats();
    if (!conversion_feasible(m.matrix, fmt, opts)) {
      throw InfeasibleError(format + " needs " +
                            std::to_string(required_slots(m.matrix, fmt, opts)) +
                            " slots, above the limit of " + std::to_string(opts.limits.max_slots));
    }
    const auto t0 = std::chrono::steady_clock::now();
    const auto a = convert(m.matrix, fmt, opts);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    nlohmann::json j;
    j["matrix_id"] = m.id;
    j["format"] = format;
    j["rows"] = rows_of(a);
    j["cols"] = cols_of(a);
    j["nnz"] = nnz_of(a);
    j["footprint_bytes"] = format_footprint(a);
    j["measured"] = {{"conversion_seconds", secs}};
    if (check) j["reconstructs_input"] = reconstruct_dense(a) == to_dense(m.matrix);
    std::cout << j.dump(1) << '\n';
  }
};

// --- overheads --------------------------------------------------------------

struct OverheadsCmd {
  std::vector<std::string> matrices;
  std::string observations;
  std::string models;
  std::string model_out;
  std::vector<std::string> formats{"csr", "ell", "bell", "sell"};
  int trees = 100;
  std::uint64_t seed = 0;
  TimingFlags timing;
  GuardFlags guard;

  void attach(CLI::App& app) {
    auto* c = app.add_subcommand(
        "overheads", "Measure f/c/o/p overheads and/or train the overhead model");
    c->add_option("--matrices", matrices, "Matrices to measure");
    c->add_option("--observations", observations,
                  "Observation CSV: written when measuring, read otherwise")
        ->required();
    c->add_option("--models", models, "Bundle whose format classifier is timed for p_latency");
    c->add_option("--model-out", model_out, "Train the overhead model and write it here");
    c->add_option("--formats", formats, "Target formats")->delimiter(',');
    c->add_option("--trees", trees, "Trees per overhead forest")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    c->add_option("--seed", seed, "Seed for the split and forests")->capture_default_str();
    timing.attach(c);
    guard.attach(c);
    c->callback([this] { run(); });
  }

  void run() const {
    if (matrices.empty() && model_out.empty()) {
      throw UsageError("give --matrices to measure, --model-out to train, or both");
    }
    std::vector<OverheadObservation> obs;
    if (!matrices.empty()) {
      OverheadMeasureOptions opts;
      opts.timing = timing.params();
      opts.formats = guard.formats();
      opts.targets.clear();
      for (const auto& f : formats) opts.targets.push_back(format_arg(f));
      std::optional<ModelBundle> bundle;
      if (!models.empty()) {
        bundle = ModelBundle::load(models);
        const auto& fmt = bundle->classifier(kFormatDim);
        opts.format_probe = [&fmt](const SparsityFeatures& f) {
          const auto a = f.to_array();
          volatile auto label = fmt.model.predict(std::vector<double>(a.begin(), a.end()));
          (void)label;
        };
      }
      obs = measure_overheads(load_inputs(matrices), opts);
      save_overheads(observations, obs);
      std::cerr << "wrote " << obs.size() << " observations to " << observations << '\n';
    } else {
      obs = load_overheads(observations);
    }
    if (model_out.empty()) return;

    OverheadModelOptions mo;
    mo.n_estimators = trees;
    mo.seed = seed;
    OverheadModel m;
    try {
      m = OverheadModel::train(obs, mo);
    } catch (const std::invalid_argument& e) {
      throw DataError(e.what());
    }
    m.save(model_out);
    std::cout << m.report_json().dump(1) << '\n';
  }
};

// --- report -----------------------------------------------------------------

struct ReportCmd {
  std::string dataset;
  std::string recommendations;
  std::string objective;
  std::string direction;
  std::string use = "config";
  bool csv_out = false;
  std::string out;
  std::uint64_t seed = 0;

  void attach(CLI::App& app) {
    auto* c = app.add_subcommand("report", "Improvement of recommended over default configs");
    c->add_option("--dataset", dataset, "Dataset CSV holding both configs per matrix")
        ->required();
    c->add_option("--recommendations", recommendations, "Output of recommend")->required();
    c->add_option("--objective", objective, "Column to compare (default: the recommendation's)");
    c->add_option("--direction", direction, "min or max")->check(CLI::IsMember({"min", "max"}));
    c->add_option("--use", use, "config (applied, csr format) or predicted")
        ->check(CLI::IsMember({"config", "predicted"}))
        ->capture_default_str();
    c->add_flag("--csv", csv_out, "CSV instead of a text table");
    c->add_option("--out", out, "Write here instead of stdout");
    c->add_option("--seed", seed, "Unused; accepted for uniformity");
    c->callback([this] { run(); });
  }

  void run() const {
    const auto ds = import_csv(dataset);
    auto j = read_json_file(recommendations);
    if (j.is_object()) j = nlohmann::json::array({j});
    std::vector<Recommendation> recs;
    for (const auto& r : j) recs.push_back(Recommendation::from_json(r));
    if (recs.empty()) throw DataError(recommendations + " holds no recommendations");

    Objective obj = recs.front().objective;
    if (!objective.empty()) {
      obj = direction.empty() ? make_objective(objective) : make_objective(objective, direction);
    } else if (!direction.empty()) {
      obj = make_objective(obj.column, direction);
    }
    if (!ds.has_column(obj.column)) throw DataError(dataset + " has no column '" + obj.column + "'");

    std::vector<std::pair<std::string, ConfigPoint>> chosen;
    for (const auto& r : recs) {
      std::vector<std::string> ds_dims;
      for (const auto& d : ds.space.dims()) ds_dims.push_back(d.name);
      if (r.dimensions != ds_dims) {
        throw DataError("recommendation for " + r.matrix_id +
                        " uses other config dimensions than the dataset");
      }
      chosen.emplace_back(r.matrix_id, use == "config" ? r.config : r.predicted);
    }
    const auto rep = build_report(ds, obj, chosen);
    write_text(out, csv_out ? rep.to_csv() : rep.to_text());
  }
};

// --- generate ---------------------------------------------------------------

struct GenerateCmd {
  std::string out;
  std::size_t count = 20;
  int min_rows = 200;
  int max_rows = 20000;
  std::uint64_t seed = 0;

  void attach(CLI::App& app) {
    auto* c = app.add_subcommand("generate", "Write a seeded synthetic corpus of .mtx files");
    c->add_option("--out", out, "Output directory")->required();
    c->add_option("--count", count, "Number of matrices")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    c->add_option("--min-rows", min_rows)->check(CLI::PositiveNumber)->capture_default_str();
    c->add_option("--max-rows", max_rows)->check(CLI::PositiveNumber)->capture_default_str();
    c->add_option("--seed", seed, "Corpus seed")->capture_default_str();
    c->callback([this] { run(); });
  }

  void run() const {
    if (min_rows > max_rows) throw UsageError("--min-rows exceeds --max-rows");
    fs::create_directories(out);
    for (const auto& m : synthetic::corpus(count, seed, min_rows, max_rows)) {
      write_matrix_market(fs::path(out) / (m.id + ".mtx"), m.matrix);
    }
    std::cerr << "wrote " << count << " matrices to " << out << '\n';
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sparse matrix-vector autotuner: sweeps, models and recommendations"};
  app.require_subcommand(1);
  FeaturesCmd features;
  SweepCmd sweep;
  TrainCmd train;
  RecommendCmd recommend;
  DecideCmd decide;
  ConvertCmd convert_cmd;
  OverheadsCmd overheads;
  ReportCmd report;
  GenerateCmd generate;
  features.attach(app);
  sweep.attach(app);
  train.attach(app);
  recommend.attach(app);
  decide.attach(app);
  convert_cmd.attach(app);
  overheads.attach(app);
  report.attach(app);
  generate.attach(app);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const InfeasibleError& e) {
    std::cerr << "infeasible: " << e.what() << '\n';
    return kInfeasible;
  } catch (const GuardExceeded& e) {
    std::cerr << "infeasible: " << e.what() << '\n';
    return kInfeasible;
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return kData;
  } catch (const ParseError& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return kData;
  } catch (const DimensionMismatch& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return kData;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return kData;
  }
  return kOk;
}
