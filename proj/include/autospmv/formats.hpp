#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>
#include <variant>
#include <vector>

#include "autospmv/common.hpp"
#include "autospmv/matrix_io.hpp"

namespace autospmv {

enum class Format { csr, ell, bell, sell };

inline constexpr Format kAllFormats[] = {Format::csr, Format::ell, Format::bell,
                                         Format::sell};

std::string_view to_string(Format f);
std::optional<Format> parse_format(std::string_view name);

// Layouts below are row-major. Padding slots always hold column index 0 and
// value 0.0; explicit per-row (or per-block-row) lengths tell them apart.

struct CsrMatrix {
  index_t n_rows = 0;
  index_t n_cols = 0;
  std::vector<index_t> row_ptr;  // n_rows + 1
  std::vector<index_t> col_idx;  // nnz
  std::vector<double> values;    // nnz

  std::size_t nnz() const noexcept { return values.size(); }

  friend bool operator==(const CsrMatrix&, const CsrMatrix&) = default;
};

struct EllMatrix {
  index_t n_rows = 0;
  index_t n_cols = 0;
  index_t max_nnz = 0;
  std::vector<index_t> row_len;  // n_rows
  std::vector<index_t> col_idx;  // n_rows * max_nnz
  std::vector<double> values;    // n_rows * max_nnz

  std::size_t nnz() const noexcept;
  std::size_t slots() const noexcept { return values.size(); }

  friend bool operator==(const EllMatrix&, const EllMatrix&) = default;
};

struct BellMatrix {
  index_t n_rows = 0;
  index_t n_cols = 0;
  index_t block_h = 2;
  index_t block_w = 2;
  index_t n_block_rows = 0;
  index_t max_blocks = 0;
  std::vector<index_t> block_row_len;  // n_block_rows
  std::vector<index_t> block_col_idx;  // n_block_rows * max_blocks
  std::vector<double> data;            // one block_h*block_w block per slot
  std::size_t source_nnz = 0;

  std::size_t nnz() const noexcept { return source_nnz; }
  std::size_t block_slots() const noexcept { return block_col_idx.size(); }

  friend bool operator==(const BellMatrix&, const BellMatrix&) = default;
};

struct SellMatrix {
  index_t n_rows = 0;
  index_t n_cols = 0;
  index_t slice_height = 2;
  std::vector<std::int64_t> slice_ptr;  // n_slices + 1
  std::vector<index_t> slice_width;     // n_slices
  std::vector<index_t> row_len;         // n_rows
  std::vector<index_t> col_idx;
  std::vector<double> values;

  std::size_t n_slices() const noexcept { return slice_width.size(); }
  std::size_t nnz() const noexcept;
  std::size_t slots() const noexcept { return values.size(); }

  friend bool operator==(const SellMatrix&, const SellMatrix&) = default;
};

using FormatMatrix = std::variant<CsrMatrix, EllMatrix, BellMatrix, SellMatrix>;

struct ConversionLimits {
  /// Upper bound on stored value slots (nonzeros plus padding).
  std::size_t max_slots = std::size_t{1} << 31;
};

struct FormatOptions {
  index_t block_h = 2;
  index_t block_w = 2;
  index_t slice_height = 2;
  ConversionLimits limits;
};

CsrMatrix coo_to_csr(const TripletMatrix& m);
EllMatrix coo_to_ell(const TripletMatrix& m, const ConversionLimits& limits = {});
BellMatrix coo_to_bell(const TripletMatrix& m, index_t block_h = 2, index_t block_w = 2,
                       const ConversionLimits& limits = {});
SellMatrix coo_to_sell(const TripletMatrix& m, index_t slice_height = 2,
                       const ConversionLimits& limits = {});

FormatMatrix convert(const TripletMatrix& m, Format f, const FormatOptions& opts = {});

/// Value slots the conversion would allocate, computed from row counts alone.
std::size_t required_slots(const TripletMatrix& m, Format f, const FormatOptions& opts = {});
bool conversion_feasible(const TripletMatrix& m, Format f, const FormatOptions& opts = {});

Format format_of(const FormatMatrix& f);
std::size_t nnz_of(const FormatMatrix& f);
index_t rows_of(const FormatMatrix& f);
index_t cols_of(const FormatMatrix& f);

DenseMatrix reconstruct_dense(const CsrMatrix& a, std::size_t max_cells = kDefaultDenseGuard);
DenseMatrix reconstruct_dense(const EllMatrix& a, std::size_t max_cells = kDefaultDenseGuard);
DenseMatrix reconstruct_dense(const BellMatrix& a, std::size_t max_cells = kDefaultDenseGuard);
DenseMatrix reconstruct_dense(const SellMatrix& a, std::size_t max_cells = kDefaultDenseGuard);
DenseMatrix reconstruct_dense(const FormatMatrix& a, std::size_t max_cells = kDefaultDenseGuard);

/// Bytes held by the layout's arrays: value slots at 8 bytes, index slots at
/// their stored width (4 bytes for index_t, 8 for SELL slice pointers).
std::size_t format_footprint(const CsrMatrix& a);
std::size_t format_footprint(const EllMatrix& a);
std::size_t format_footprint(const BellMatrix& a);
std::size_t format_footprint(const SellMatrix& a);
std::size_t format_footprint(const FormatMatrix& a);

/// Stored value slots that do not hold a source nonzero.
std::size_t padding_slots(const EllMatrix& a);
std::size_t padding_slots(const BellMatrix& a);
std::size_t padding_slots(const SellMatrix& a);

}  // namespace autospmv
