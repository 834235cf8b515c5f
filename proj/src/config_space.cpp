#include "autospmv/config_space.hpp"

#include <fstream>
#include <set>
#include <stdexcept>

#include "autospmv/common.hpp"
#include "autospmv/numeric_text.hpp"

namespace autospmv {

ConfigSpace::ConfigSpace(std::vector<ConfigDimension> dims) : dims_(std::move(dims)) {
  std::set<std::string> names;
  for (const auto& d : dims_) {
    if (d.name.empty()) throw std::invalid_argument("config dimension without a name");
    if (!names.insert(d.name).second) {
      throw std::invalid_argument("duplicate config dimension '" + d.name + "'");
    }
    if (d.values.empty()) throw std::invalid_argument("dimension '" + d.name + "' has no values");
    std::set<std::string> seen;
    for (const auto& v : d.values) {
      if (!seen.insert(v).second) {
        throw std::invalid_argument("dimension '" + d.name + "' repeats value '" + v + "'");
      }
    }
  }
}

std::size_t ConfigSpace::point_count() const {
  std::size_t n = 1;
  for (const auto& d : dims_) n *= d.values.size();
  return n;
}

std::vector<ConfigPoint> ConfigSpace::enumerate() const {
  std::vector<ConfigPoint> out;
  out.reserve(point_count());
  std::vector<std::size_t> idx(dims_.size(), 0);
  while (true) {
    ConfigPoint p;
    for (std::size_t d = 0; d < dims_.size(); ++d) p.push_back(dims_[d].values[idx[d]]);
    out.push_back(std::move(p));
    std::size_t d = dims_.size();
    while (d > 0) {
      --d;
      if (++idx[d] < dims_[d].values.size()) break;
      idx[d] = 0;
      if (d == 0) return out;
    }
    if (dims_.empty()) return out;
  }
}

std::optional<std::size_t> ConfigSpace::index_of(std::string_view name) const {
  for (std::size_t i = 0; i < dims_.size(); ++i)
    if (dims_[i].name == name) return i;
  return std::nullopt;
}

std::optional<std::size_t> ConfigSpace::value_index(std::size_t dim, std::string_view value) const {
  const auto& vs = dims_.at(dim).values;
  for (std::size_t i = 0; i < vs.size(); ++i)
    if (vs[i] == value) return i;
  return std::nullopt;
}

bool ConfigSpace::contains(const ConfigPoint& p) const {
  if (p.size() != dims_.size()) return false;
  for (std::size_t d = 0; d < p.size(); ++d)
    if (!value_index(d, p[d])) return false;
  return true;
}

std::vector<std::size_t> ConfigSpace::ordinal(const ConfigPoint& p) const {
  if (!contains(p)) throw std::invalid_argument("config point outside the space");
  std::vector<std::size_t> out;
  for (std::size_t d = 0; d < p.size(); ++d) out.push_back(*value_index(d, p[d]));
  return out;
}

bool ConfigSpace::executable() const {
  for (const auto& d : dims_) {
    if (d.name != kFormatDim && d.name != kWorkerDim && d.name != kChunkDim) return false;
  }
  return true;
}

ConfigPoint ConfigSpace::default_point() const {
  ConfigPoint p;
  for (std::size_t d = 0; d < dims_.size(); ++d) {
    const auto& dim = dims_[d];
    if (dim.name == kFormatDim && value_index(d, "csr")) {
      p.emplace_back("csr");
    } else {
      p.push_back(dim.values.front());
    }
  }
  return p;
}

nlohmann::json ConfigSpace::to_json() const {
  nlohmann::json dims = nlohmann::json::array();
  for (const auto& d : dims_) dims.push_back({{"name", d.name}, {"values", d.values}});
  return {{"dimensions", dims}};
}

ConfigSpace ConfigSpace::from_json(const nlohmann::json& j) {
  std::vector<ConfigDimension> dims;
  for (const auto& d : j.at("dimensions")) {
    ConfigDimension dim;
    dim.name = d.at("name").get<std::string>();
    for (const auto& v : d.at("values")) {
      // Numbers are accepted for convenience and kept as their text.
      dim.values.push_back(v.is_string() ? v.get<std::string>() : v.dump());
    }
    dims.push_back(std::move(dim));
  }
  return ConfigSpace(std::move(dims));
}

ConfigSpace ConfigSpace::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open space file " + path.string());
  try {
    return from_json(nlohmann::json::parse(in));
  } catch (const nlohmann::json::exception& e) {
    throw DataError(path.string() + ": " + e.what());
  } catch (const std::invalid_argument& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

ConfigSpace default_cpu_space() {
  return ConfigSpace({{std::string(kFormatDim), {"csr", "ell", "bell", "sell"}},
                      {std::string(kWorkerDim), {"1", "2", "4"}},
                      {std::string(kChunkDim), {"16", "256"}}});
}

ExecutablePoint resolve(const ConfigSpace& space, const ConfigPoint& p) {
  if (p.size() != space.size()) throw std::invalid_argument("config point arity mismatch");
  ExecutablePoint e;
  for (std::size_t d = 0; d < p.size(); ++d) {
    const auto& name = space.dims()[d].name;
    if (name == kFormatDim) {
      const auto f = parse_format(p[d]);
      if (!f) throw std::invalid_argument("unknown format '" + p[d] + "'");
      e.format = *f;
    } else if (name == kWorkerDim || name == kChunkDim) {
      const auto v = parse_int(p[d]);
      if (!v || *v < 1) throw std::invalid_argument(name + " must be a positive integer");
      (name == kWorkerDim ? e.exec.worker_count : e.exec.rows_per_chunk) = static_cast<int>(*v);
    }
  }
  return e;
}

}  // namespace autospmv
