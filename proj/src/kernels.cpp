#include "autospmv/kernels.hpp"

#include <string>

namespace autospmv {

void validate(const ExecConfig& cfg) {
  if (cfg.worker_count < 1 || cfg.rows_per_chunk < 1) {
    throw std::invalid_argument("ExecConfig: worker_count and rows_per_chunk must be >= 1");
  }
}

namespace {

void check_dims(index_t n_rows, index_t n_cols, std::size_t x_len, std::size_t y_len) {
  if (x_len != static_cast<std::size_t>(n_cols) || y_len != static_cast<std::size_t>(n_rows)) {
    throw DimensionMismatch("spmv: matrix is " + std::to_string(n_rows) + "x" +
                            std::to_string(n_cols) + ", x has " + std::to_string(x_len) +
                            ", y has " + std::to_string(y_len));
  }
}

}  // namespace

void spmv_csr(const CsrMatrix& a, std::span<const double> x, std::span<double> y,
              const ExecConfig& cfg) {
  validate(cfg);
  check_dims(a.n_rows, a.n_cols, x.size(), y.size());
  const index_t* row_ptr = a.row_ptr.data();
  const index_t* col = a.col_idx.data();
  const double* val = a.values.data();
  const double* xv = x.data();
  double* yv = y.data();
  const index_t n = a.n_rows;

#pragma omp parallel for num_threads(cfg.worker_count) if (cfg.worker_count > 1) \
    schedule(static, cfg.rows_per_chunk)
  for (index_t r = 0; r < n; ++r) {
    double sum = 0.0;
    for (index_t k = row_ptr[r]; k < row_ptr[r + 1]; ++k) sum += val[k] * xv[col[k]];
    yv[r] = sum;
  }
}

void spmv_ell(const EllMatrix& a, std::span<const double> x, std::span<double> y,
              const ExecConfig& cfg) {
  validate(cfg);
  check_dims(a.n_rows, a.n_cols, x.size(), y.size());
  const index_t* col = a.col_idx.data();
  const double* val = a.values.data();
  const double* xv = x.data();
  double* yv = y.data();
  const index_t n = a.n_rows;
  const std::size_t width = static_cast<std::size_t>(a.max_nnz);

  // Padding slots are visited too: value 0.0 at column 0 adds nothing.
#pragma omp parallel for num_threads(cfg.worker_count) if (cfg.worker_count > 1) \
    schedule(static, cfg.rows_per_chunk)
  for (index_t r = 0; r < n; ++r) {
    const std::size_t base = static_cast<std::size_t>(r) * width;
    double sum = 0.0;
    for (std::size_t k = 0; k < width; ++k) sum += val[base + k] * xv[col[base + k]];
    yv[r] = sum;
  }
}

void spmv_bell(const BellMatrix& a, std::span<const double> x, std::span<double> y,
               const ExecConfig& cfg) {
  validate(cfg);
  check_dims(a.n_rows, a.n_cols, x.size(), y.size());
  const index_t bh = a.block_h;
  const index_t bw = a.block_w;
  const std::size_t block_size = static_cast<std::size_t>(bh) * bw;
  const std::size_t max_blocks = static_cast<std::size_t>(a.max_blocks);
  const index_t* bcol = a.block_col_idx.data();
  const double* data = a.data.data();
  const double* xv = x.data();
  double* yv = y.data();
  const index_t n = a.n_rows;
  const index_t n_cols = a.n_cols;

#pragma omp parallel for num_threads(cfg.worker_count) if (cfg.worker_count > 1) \
    schedule(static, cfg.rows_per_chunk)
  for (index_t r = 0; r < n; ++r) {
    const std::size_t br = static_cast<std::size_t>(r / bh);
    const std::size_t lr = static_cast<std::size_t>(r % bh);
    double sum = 0.0;
    for (std::size_t j = 0; j < max_blocks; ++j) {
      const std::size_t block = br * max_blocks + j;
      const index_t col0 = bcol[block] * bw;
      const double* row = data + block * block_size + lr * static_cast<std::size_t>(bw);
      // Ragged right edge: block columns past n_cols hold zeros and must not
      // index x.
      const index_t lim = col0 + bw <= n_cols ? bw : n_cols - col0;
      for (index_t lc = 0; lc < lim; ++lc) sum += row[lc] * xv[col0 + lc];
    }
    yv[r] = sum;
  }
}

void spmv_sell(const SellMatrix& a, std::span<const double> x, std::span<double> y,
               const ExecConfig& cfg) {
  validate(cfg);
  check_dims(a.n_rows, a.n_cols, x.size(), y.size());
  const index_t h = a.slice_height;
  const std::int64_t* slice_ptr = a.slice_ptr.data();
  const index_t* width = a.slice_width.data();
  const index_t* col = a.col_idx.data();
  const double* val = a.values.data();
  const double* xv = x.data();
  double* yv = y.data();
  const index_t n = a.n_rows;

#pragma omp parallel for num_threads(cfg.worker_count) if (cfg.worker_count > 1) \
    schedule(static, cfg.rows_per_chunk)
  for (index_t r = 0; r < n; ++r) {
    const index_t s = r / h;
    const std::size_t w = static_cast<std::size_t>(width[s]);
    const std::size_t base = static_cast<std::size_t>(slice_ptr[s]) +
                             static_cast<std::size_t>(r - s * h) * w;
    double sum = 0.0;
    for (std::size_t k = 0; k < w; ++k) sum += val[base + k] * xv[col[base + k]];
    yv[r] = sum;
  }
}

void spmv(const FormatMatrix& a, std::span<const double> x, std::span<double> y,
          const ExecConfig& cfg) {
  std::visit(
      [&](const auto& m) {
        using M = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<M, CsrMatrix>) {
          spmv_csr(m, x, y, cfg);
        } else if constexpr (std::is_same_v<M, EllMatrix>) {
          spmv_ell(m, x, y, cfg);
        } else if constexpr (std::is_same_v<M, BellMatrix>) {
          spmv_bell(m, x, y, cfg);
        } else {
          spmv_sell(m, x, y, cfg);
        }
      },
      a);
}

std::vector<double> spmv(const FormatMatrix& a, std::span<const double> x,
                         const ExecConfig& cfg) {
  std::vector<double> y(static_cast<std::size_t>(rows_of(a)));
  spmv(a, x, y, cfg);
  return y;
}

std::vector<double> spmv_dense(const DenseMatrix& a, std::span<const double> x) {
  if (x.size() != static_cast<std::size_t>(a.n_cols)) {
    throw DimensionMismatch("spmv_dense: x has " + std::to_string(x.size()) +
                            " entries, matrix has " + std::to_string(a.n_cols) + " columns");
  }
  std::vector<double> y(static_cast<std::size_t>(a.n_rows), 0.0);
  for (index_t r = 0; r < a.n_rows; ++r) {
    double sum = 0.0;
    for (index_t c = 0; c < a.n_cols; ++c) sum += a.at(r, c) * x[static_cast<std::size_t>(c)];
    y[static_cast<std::size_t>(r)] = sum;
  }
  return y;
}

}  // namespace autospmv
