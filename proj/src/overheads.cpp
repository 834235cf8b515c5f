#include "autospmv/overheads.hpp"

#include <fstream>

#include "autospmv/common.hpp"
#include "autospmv/csv.hpp"
#include "autospmv/numeric_text.hpp"

namespace autospmv {

std::optional<double> OverheadObservation::total(Format target) const {
  const auto c = conversion(target);
  if (!c) return std::nullopt;
  return f_latency + *c + o_latency + p_latency;
}

std::vector<OverheadObservation> measure_overheads(const std::vector<NamedMatrix>& matrices,
                                                   const OverheadMeasureOptions& opts) {
  std::vector<OverheadObservation> out;
  for (const auto& nm : matrices) {
    OverheadObservation o;
    o.matrix_id = nm.id;
    o.features = extract_features(nm.matrix);
    o.f_latency = time_feature_extraction(nm.matrix, opts.timing);
    for (Format f : opts.targets) {
      if (!conversion_feasible(nm.matrix, f, opts.formats)) continue;
      const auto t = time_kernel(
          [&] {
            auto converted = convert(nm.matrix, f, opts.formats);
            (void)converted;
          },
          opts.timing);
      o.c_latency[static_cast<std::size_t>(f)] = t.mean_seconds;
    }
    if (opts.overhead_probe) {
      o.o_latency = time_kernel([&] { opts.overhead_probe(o.features); }, opts.timing).mean_seconds;
    }
    if (opts.format_probe) {
      o.p_latency = time_kernel([&] { opts.format_probe(o.features); }, opts.timing).mean_seconds;
    }
    out.push_back(std::move(o));
  }
  return out;
}

namespace {

std::vector<std::string> header() {
  std::vector<std::string> h{"matrix_id"};
  for (auto n : SparsityFeatures::kNames) h.emplace_back(n);
  h.emplace_back("f_latency");
  for (Format f : kAllFormats) h.push_back("c_latency_" + std::string(to_string(f)));
  h.emplace_back("o_latency");
  h.emplace_back("p_latency");
  return h;
}

}  // namespace

void write_overheads_csv(std::ostream& out, const std::vector<OverheadObservation>& obs) {
  out << csv::join(header()) << '\n';
  for (const auto& o : obs) {
    std::vector<std::string> f{o.matrix_id};
    for (double v : o.features.to_array()) f.push_back(format_double(v));
    f.push_back(format_double(o.f_latency));
    for (const auto& c : o.c_latency) f.push_back(c ? format_double(*c) : "");
    f.push_back(format_double(o.o_latency));
    f.push_back(format_double(o.p_latency));
    out << csv::join(f) << '\n';
  }
}

std::vector<OverheadObservation> read_overheads_csv(std::istream& in, const std::string& source) {
  csv::Reader reader(in);
  std::vector<std::string> f;
  if (!reader.next(f) || f != header()) {
    throw DataError(source + ":1: not an overhead observation file (unexpected header)");
  }
  const std::size_t width = header().size();
  std::vector<OverheadObservation> out;
  while (reader.next(f)) {
    const auto line = reader.line();
    if (f.size() == 1 && f[0].empty()) continue;
    auto fail = [&](const std::string& msg) {
      return DataError(source + ":" + std::to_string(line) + ": " + msg);
    };
    if (f.size() != width) throw fail("expected " + std::to_string(width) + " fields");
    auto num = [&](std::size_t i) {
      const auto v = parse_double(f[i]);
      if (!v) throw fail("field " + std::to_string(i + 1) + ": '" + f[i] + "' is not a number");
      if (*v < 0) throw fail("field " + std::to_string(i + 1) + " is negative");
      return *v;
    };
    OverheadObservation o;
    o.matrix_id = f[0];
    std::array<double, SparsityFeatures::kCount> feats{};
    for (std::size_t i = 0; i < feats.size(); ++i) feats[i] = num(1 + i);
    o.features = SparsityFeatures::from_array(feats);
    std::size_t c = 1 + SparsityFeatures::kCount;
    o.f_latency = num(c++);
    for (auto& slot : o.c_latency) {
      if (!f[c].empty()) slot = num(c);
      ++c;
    }
    o.o_latency = num(c++);
    o.p_latency = num(c);
    out.push_back(std::move(o));
  }
  return out;
}

void save_overheads(const std::filesystem::path& path, const std::vector<OverheadObservation>& obs) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path.string());
  write_overheads_csv(out, obs);
}

std::vector<OverheadObservation> load_overheads(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  return read_overheads_csv(in, path.string());
}

}  // namespace autospmv
