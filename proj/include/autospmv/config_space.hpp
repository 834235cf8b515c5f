#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "autospmv/formats.hpp"
#include "autospmv/kernels.hpp"
#include "json.hpp"

namespace autospmv {

struct ConfigDimension {
  std::string name;
  std::vector<std::string> values;

  friend bool operator==(const ConfigDimension&, const ConfigDimension&) = default;
};

/// One value per dimension, in dimension order.
using ConfigPoint = std::vector<std::string>;

inline constexpr std::string_view kFormatDim = "format";
inline constexpr std::string_view kWorkerDim = "worker_count";
inline constexpr std::string_view kChunkDim = "rows_per_chunk";

class ConfigSpace {
 public:
  ConfigSpace() = default;
  /// Throws std::invalid_argument on duplicate names, empty or repeated values.
  explicit ConfigSpace(std::vector<ConfigDimension> dims);

  const std::vector<ConfigDimension>& dims() const noexcept { return dims_; }
  std::size_t size() const noexcept { return dims_.size(); }
  std::size_t point_count() const;

  /// Cartesian product, last dimension varying fastest.
  std::vector<ConfigPoint> enumerate() const;

  std::optional<std::size_t> index_of(std::string_view name) const;
  std::optional<std::size_t> value_index(std::size_t dim, std::string_view value) const;
  bool contains(const ConfigPoint& p) const;
  /// Declared-order value indices; used for deterministic tie-breaking.
  std::vector<std::size_t> ordinal(const ConfigPoint& p) const;

  /// True when every dimension is format, worker_count or rows_per_chunk.
  bool executable() const;

  /// format=csr when declared (else the first format listed), the first
  /// declared value elsewhere.
  ConfigPoint default_point() const;

  nlohmann::json to_json() const;
  static ConfigSpace from_json(const nlohmann::json& j);
  static ConfigSpace load(const std::filesystem::path& path);

  friend bool operator==(const ConfigSpace&, const ConfigSpace&) = default;

 private:
  std::vector<ConfigDimension> dims_;
};

/// {csr, ell, bell, sell} x worker_count {1, 2, 4} x rows_per_chunk {16, 256}.
ConfigSpace default_cpu_space();

struct ExecutablePoint {
  Format format = Format::csr;
  ExecConfig exec;
};

/// Reads the executable dimensions; absent ones keep their defaults.
/// Throws std::invalid_argument on unparseable values.
ExecutablePoint resolve(const ConfigSpace& space, const ConfigPoint& p);

}  // namespace autospmv
