#pragma once

#include <span>
#include <vector>

#include "autospmv/formats.hpp"
#include "autospmv/matrix_io.hpp"

namespace autospmv {

/// CPU launch configuration: rows are cut into chunks of `rows_per_chunk`
/// and dealt round-robin to `worker_count` OpenMP threads (static schedule).
struct ExecConfig {
  int worker_count = 1;
  int rows_per_chunk = 64;

  friend bool operator==(const ExecConfig&, const ExecConfig&) = default;
};

void validate(const ExecConfig& cfg);

// Parallel kernels. Each output row is accumulated sequentially in storage
// order, so results are bitwise identical for every ExecConfig and equal to
// the serial reference in serial_kernels.hpp.

void spmv_csr(const CsrMatrix& a, std::span<const double> x, std::span<double> y,
              const ExecConfig& cfg);
void spmv_ell(const EllMatrix& a, std::span<const double> x, std::span<double> y,
              const ExecConfig& cfg);
void spmv_bell(const BellMatrix& a, std::span<const double> x, std::span<double> y,
               const ExecConfig& cfg);
void spmv_sell(const SellMatrix& a, std::span<const double> x, std::span<double> y,
               const ExecConfig& cfg);
void spmv(const FormatMatrix& a, std::span<const double> x, std::span<double> y,
          const ExecConfig& cfg);

std::vector<double> spmv(const FormatMatrix& a, std::span<const double> x,
                         const ExecConfig& cfg);

/// Textbook row-by-row dense product; the oracle for every sparse kernel.
std::vector<double> spmv_dense(const DenseMatrix& a, std::span<const double> x);

}  // namespace autospmv
