#pragma once

#include <span>

#include "autospmv/formats.hpp"

// Single-threaded reference kernels. Kept alongside the OpenMP versions so
// tests can assert bitwise agreement and spmv_bench can report speedups.
namespace autospmv::serial {

void spmv_csr(const CsrMatrix& a, std::span<const double> x, std::span<double> y);
void spmv_ell(const EllMatrix& a, std::span<const double> x, std::span<double> y);
void spmv_bell(const BellMatrix& a, std::span<const double> x, std::span<double> y);
void spmv_sell(const SellMatrix& a, std::span<const double> x, std::span<double> y);
void spmv(const FormatMatrix& a, std::span<const double> x, std::span<double> y);

/// y = A x computed straight from the triplets (row scatter, no format).
void spmv_triplets(const TripletMatrix& a, std::span<const double> x, std::span<double> y);

}  // namespace autospmv::serial
