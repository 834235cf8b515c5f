#include "autospmv/serial_kernels.hpp"

#include <algorithm>
#include <string>

namespace autospmv::serial {

namespace {

void check_dims(index_t n_rows, index_t n_cols, std::size_t x_len, std::size_t y_len) {
  if (x_len != static_cast<std::size_t>(n_cols) || y_len != static_cast<std::size_t>(n_rows)) {
    throw DimensionMismatch("serial spmv: operand length mismatch");
  }
}

}  // namespace

void spmv_csr(const CsrMatrix& a, std::span<const double> x, std::span<double> y) {
  check_dims(a.n_rows, a.n_cols, x.size(), y.size());
  for (index_t r = 0; r < a.n_rows; ++r) {
    double sum = 0.0;
    for (index_t k = a.row_ptr[r]; k < a.row_ptr[r + 1]; ++k) {
      sum += a.values[k] * x[a.col_idx[k]];
    }
    y[r] = sum;
  }
}

void spmv_ell(const EllMatrix& a, std::span<const double> x, std::span<double> y) {
  check_dims(a.n_rows, a.n_cols, x.size(), y.size());
  for (index_t r = 0; r < a.n_rows; ++r) {
    double sum = 0.0;
    const std::size_t base = static_cast<std::size_t>(r) * a.max_nnz;
    for (index_t k = 0; k < a.row_len[r]; ++k) sum += a.values[base + k] * x[a.col_idx[base + k]];
    y[r] = sum;
  }
}

void spmv_bell(const BellMatrix& a, std::span<const double> x, std::span<double> y) {
  check_dims(a.n_rows, a.n_cols, x.size(), y.size());
  std::fill(y.begin(), y.end(), 0.0);
  const std::size_t block_size = static_cast<std::size_t>(a.block_h) * a.block_w;
  // Block-row-major walk over occupied blocks only.
  for (index_t br = 0; br < a.n_block_rows; ++br) {
    for (index_t j = 0; j < a.block_row_len[br]; ++j) {
      const std::size_t block = static_cast<std::size_t>(br) * a.max_blocks + j;
      const index_t col0 = a.block_col_idx[block] * a.block_w;
      for (index_t lr = 0; lr < a.block_h; ++lr) {
        const index_t r = br * a.block_h + lr;
        if (r >= a.n_rows) break;
        for (index_t lc = 0; lc < a.block_w && col0 + lc < a.n_cols; ++lc) {
          y[r] += a.data[block * block_size + static_cast<std::size_t>(lr) * a.block_w + lc] *
                  x[col0 + lc];
        }
      }
    }
  }
}

void spmv_sell(const SellMatrix& a, std::span<const double> x, std::span<double> y) {
  check_dims(a.n_rows, a.n_cols, x.size(), y.size());
  for (std::size_t s = 0; s < a.n_slices(); ++s) {
    const index_t first = static_cast<index_t>(s) * a.slice_height;
    const index_t last = std::min(first + a.slice_height, a.n_rows);
    for (index_t r = first; r < last; ++r) {
      const std::size_t base = static_cast<std::size_t>(a.slice_ptr[s]) +
                               static_cast<std::size_t>(r - first) * a.slice_width[s];
      double sum = 0.0;
      for (index_t k = 0; k < a.row_len[r]; ++k) sum += a.values[base + k] * x[a.col_idx[base + k]];
      y[r] = sum;
    }
  }
}

void spmv(const FormatMatrix& a, std::span<const double> x, std::span<double> y) {
  std::visit(
      [&](const auto& m) {
        using M = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<M, CsrMatrix>) {
          spmv_csr(m, x, y);
        } else if constexpr (std::is_same_v<M, EllMatrix>) {
          spmv_ell(m, x, y);
        } else if constexpr (std::is_same_v<M, BellMatrix>) {
          spmv_bell(m, x, y);
        } else {
          spmv_sell(m, x, y);
        }
      },
      a);
}

void spmv_triplets(const TripletMatrix& a, std::span<const double> x, std::span<double> y) {
  check_dims(a.n_rows(), a.n_cols(), x.size(), y.size());
  std::fill(y.begin(), y.end(), 0.0);
  for (const auto& e : a.entries()) y[e.row] += e.value * x[e.col];
}

}  // namespace autospmv::serial
