#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "autospmv/common.hpp"

namespace autospmv {

struct Triplet {
  index_t row = 0;
  index_t col = 0;
  double value = 0.0;

  friend bool operator==(const Triplet&, const Triplet&) = default;
};

/// Canonical coordinate (COO) matrix.
///
/// Entries are sorted by (row, col), contain no duplicate coordinates and no
/// explicit zeros. Every constructor path enforces this, so any
/// TripletMatrix value observed by other modules is canonical.
class TripletMatrix {
 public:
  TripletMatrix() = default;

  /// Sorts the entries and drops stored zeros. Throws std::invalid_argument
  /// on an out-of-range index, a duplicate coordinate or negative dimensions.
  TripletMatrix(index_t n_rows, index_t n_cols, std::vector<Triplet> entries);

  index_t n_rows() const noexcept { return n_rows_; }
  index_t n_cols() const noexcept { return n_cols_; }
  std::size_t nnz() const noexcept { return entries_.size(); }
  std::span<const Triplet> entries() const noexcept { return entries_; }

  /// Per-row stored-entry counts, length n_rows.
  std::vector<std::size_t> row_counts() const;

  friend bool operator==(const TripletMatrix&, const TripletMatrix&) = default;

 private:
  index_t n_rows_ = 0;
  index_t n_cols_ = 0;
  std::vector<Triplet> entries_;
};

/// A matrix paired with the identifier used in datasets and reports.
struct NamedMatrix {
  std::string id;
  TripletMatrix matrix;
};

/// Row-major dense matrix; used only as an oracle.
struct DenseMatrix {
  index_t n_rows = 0;
  index_t n_cols = 0;
  std::vector<double> values;

  double& at(index_t r, index_t c) {
    return values[static_cast<std::size_t>(r) * n_cols + c];
  }
  double at(index_t r, index_t c) const {
    return values[static_cast<std::size_t>(r) * n_cols + c];
  }

  friend bool operator==(const DenseMatrix&, const DenseMatrix&) = default;
};

inline constexpr std::size_t kDefaultDenseGuard = 10'000'000;

/// Allocates an all-zero dense matrix, throwing GuardExceeded when the cell
/// count is above `max_cells`.
DenseMatrix make_dense(index_t n_rows, index_t n_cols,
                       std::size_t max_cells = kDefaultDenseGuard);

DenseMatrix to_dense(const TripletMatrix& m,
                     std::size_t max_cells = kDefaultDenseGuard);

enum class ParseErrc {
  malformed_banner,
  unsupported_variant,
  malformed_size_line,
  malformed_entry,
  index_out_of_bounds,
  entry_count_mismatch,
  duplicate_coordinate,
};

std::string_view to_string(ParseErrc code);

class ParseError : public std::runtime_error {
 public:
  ParseError(ParseErrc code, std::size_t line, const std::string& what);

  ParseErrc code() const noexcept { return code_; }
  /// 1-based line number of the offending input line (0 when at EOF).
  std::size_t line() const noexcept { return line_; }

 private:
  ParseErrc code_;
  std::size_t line_;
};

/// Reads a `%%MatrixMarket matrix coordinate {real|integer|pattern}
/// {general|symmetric}` stream. Symmetric inputs are expanded into both
/// triangles; pattern entries get value 1.0.
TripletMatrix parse_matrix_market(std::istream& in);
TripletMatrix parse_matrix_market(std::string_view text);
TripletMatrix read_matrix_market(const std::filesystem::path& path);

/// Writes `coordinate real general`, 1-based, shortest round-trip values.
void emit_matrix_market(std::ostream& out, const TripletMatrix& m);
std::string emit_matrix_market(const TripletMatrix& m);
void write_matrix_market(const std::filesystem::path& path,
                         const TripletMatrix& m);

}  // namespace autospmv
