#include "autospmv/formats.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <string>

namespace autospmv {

std::string_view to_string(Format f) {
  switch (f) {
    case Format::csr: return "csr";
    case Format::ell: return "ell";
    case Format::bell: return "bell";
    case Format::sell: return "sell";
  }
  return "?";
}

std::optional<Format> parse_format(std::string_view name) {
  for (Format f : kAllFormats) {
    if (to_string(f) == name) return f;
  }
  return std::nullopt;
}

std::size_t EllMatrix::nnz() const noexcept {
  return std::accumulate(row_len.begin(), row_len.end(), std::size_t{0});
}

std::size_t SellMatrix::nnz() const noexcept {
  return std::accumulate(row_len.begin(), row_len.end(), std::size_t{0});
}

namespace {

void check_slots(std::size_t slots, const ConversionLimits& limits, std::string_view what) {
  if (slots > limits.max_slots) {
    throw GuardExceeded(std::string(what) + " needs " + std::to_string(slots) +
                        " slots, guard is " + std::to_string(limits.max_slots));
  }
}

std::size_t max_row_count(const std::vector<std::size_t>& counts) {
  return counts.empty() ? 0 : *std::max_element(counts.begin(), counts.end());
}

// Sorted distinct block columns of each block row.
std::vector<std::vector<index_t>> block_columns(const TripletMatrix& m, index_t block_h,
                                                index_t block_w) {
  const index_t n_block_rows = (m.n_rows() + block_h - 1) / block_h;
  std::vector<std::vector<index_t>> cols(static_cast<std::size_t>(n_block_rows));
  for (const auto& e : m.entries()) {
    cols[static_cast<std::size_t>(e.row / block_h)].push_back(e.col / block_w);
  }
  for (auto& c : cols) {
    std::sort(c.begin(), c.end());
    c.erase(std::unique(c.begin(), c.end()), c.end());
  }
  return cols;
}

std::size_t sell_slots(const std::vector<std::size_t>& counts, index_t slice_height) {
  std::size_t slots = 0;
  const auto h = static_cast<std::size_t>(slice_height);
  for (std::size_t begin = 0; begin < counts.size(); begin += h) {
    const std::size_t end = std::min(begin + h, counts.size());
    const std::size_t width = *std::max_element(counts.begin() + begin, counts.begin() + end);
    slots += (end - begin) * width;
  }
  return slots;
}

}  // namespace

CsrMatrix coo_to_csr(const TripletMatrix& m) {
  if (m.nnz() > static_cast<std::size_t>(std::numeric_limits<index_t>::max())) {
    throw GuardExceeded("CSR row pointers cannot address " + std::to_string(m.nnz()) +
                        " nonzeros");
  }
  CsrMatrix a;
  a.n_rows = m.n_rows();
  a.n_cols = m.n_cols();
  a.row_ptr.assign(static_cast<std::size_t>(m.n_rows()) + 1, 0);
  a.col_idx.reserve(m.nnz());
  a.values.reserve(m.nnz());
  for (const auto& e : m.entries()) {
    ++a.row_ptr[static_cast<std::size_t>(e.row) + 1];
    a.col_idx.push_back(e.col);
    a.values.push_back(e.value);
  }
  std::partial_sum(a.row_ptr.begin(), a.row_ptr.end(), a.row_ptr.begin());
  return a;
}

EllMatrix coo_to_ell(const TripletMatrix& m, const ConversionLimits& limits) {
  const auto counts = m.row_counts();
  const std::size_t width = max_row_count(counts);
  const std::size_t slots = counts.size() * width;
  check_slots(slots, limits, "ELL");

  EllMatrix a;
  a.n_rows = m.n_rows();
  a.n_cols = m.n_cols();
  a.max_nnz = static_cast<index_t>(width);
  a.row_len.assign(counts.size(), 0);
  a.col_idx.assign(slots, 0);
  a.values.assign(slots, 0.0);
  for (const auto& e : m.entries()) {
    const auto r = static_cast<std::size_t>(e.row);
    const std::size_t slot = r * width + static_cast<std::size_t>(a.row_len[r]++);
    a.col_idx[slot] = e.col;
    a.values[slot] = e.value;
  }
  return a;
}

BellMatrix coo_to_bell(const TripletMatrix& m, index_t block_h, index_t block_w,
                       const ConversionLimits& limits) {
  if (block_h < 1 || block_w < 1) {
    throw std::invalid_argument("BELL block dimensions must be >= 1");
  }
  const auto cols = block_columns(m, block_h, block_w);
  std::size_t max_blocks = 0;
  for (const auto& c : cols) max_blocks = std::max(max_blocks, c.size());
  const std::size_t block_size = static_cast<std::size_t>(block_h) * block_w;
  const std::size_t block_slots = cols.size() * max_blocks;
  check_slots(block_slots * block_size, limits, "BELL");

  BellMatrix a;
  a.n_rows = m.n_rows();
  a.n_cols = m.n_cols();
  a.block_h = block_h;
  a.block_w = block_w;
  a.n_block_rows = static_cast<index_t>(cols.size());
  a.max_blocks = static_cast<index_t>(max_blocks);
  a.block_row_len.resize(cols.size());
  a.block_col_idx.assign(block_slots, 0);
  a.data.assign(block_slots * block_size, 0.0);
  a.source_nnz = m.nnz();
  for (std::size_t br = 0; br < cols.size(); ++br) {
    a.block_row_len[br] = static_cast<index_t>(cols[br].size());
    std::copy(cols[br].begin(), cols[br].end(), a.block_col_idx.begin() + br * max_blocks);
  }
  for (const auto& e : m.entries()) {
    const auto br = static_cast<std::size_t>(e.row / block_h);
    const auto& row_cols = cols[br];
    const auto pos = static_cast<std::size_t>(
        std::lower_bound(row_cols.begin(), row_cols.end(), e.col / block_w) - row_cols.begin());
    const std::size_t block = br * max_blocks + pos;
    const auto local_r = static_cast<std::size_t>(e.row % block_h);
    const auto local_c = static_cast<std::size_t>(e.col % block_w);
    a.data[block * block_size + local_r * block_w + local_c] = e.value;
  }
  return a;
}

SellMatrix coo_to_sell(const TripletMatrix& m, index_t slice_height,
                       const ConversionLimits& limits) {
  if (slice_height < 1) throw std::invalid_argument("SELL slice height must be >= 1");
  const auto counts = m.row_counts();
  check_slots(sell_slots(counts, slice_height), limits, "SELL");

  SellMatrix a;
  a.n_rows = m.n_rows();
  a.n_cols = m.n_cols();
  a.slice_height = slice_height;
  const auto h = static_cast<std::size_t>(slice_height);
  const std::size_t n_slices = (counts.size() + h - 1) / h;
  a.slice_ptr.assign(n_slices + 1, 0);
  a.slice_width.assign(n_slices, 0);
  for (std::size_t s = 0; s < n_slices; ++s) {
    const std::size_t begin = s * h;
    const std::size_t end = std::min(begin + h, counts.size());
    const std::size_t width = *std::max_element(counts.begin() + begin, counts.begin() + end);
    a.slice_width[s] = static_cast<index_t>(width);
    a.slice_ptr[s + 1] = a.slice_ptr[s] + static_cast<std::int64_t>((end - begin) * width);
  }
  a.row_len.assign(counts.size(), 0);
  a.col_idx.assign(static_cast<std::size_t>(a.slice_ptr.back()), 0);
  a.values.assign(static_cast<std::size_t>(a.slice_ptr.back()), 0.0);
  for (const auto& e : m.entries()) {
    const auto r = static_cast<std::size_t>(e.row);
    const std::size_t s = r / h;
    const std::size_t slot = static_cast<std::size_t>(a.slice_ptr[s]) +
                             (r - s * h) * static_cast<std::size_t>(a.slice_width[s]) +
                             static_cast<std::size_t>(a.row_len[r]++);
    a.col_idx[slot] = e.col;
    a.values[slot] = e.value;
  }
  return a;
}

FormatMatrix convert(const TripletMatrix& m, Format f, const FormatOptions& opts) {
  switch (f) {
    case Format::csr: return coo_to_csr(m);
    case Format::ell: return coo_to_ell(m, opts.limits);
    case Format::bell: return coo_to_bell(m, opts.block_h, opts.block_w, opts.limits);
    case Format::sell: return coo_to_sell(m, opts.slice_height, opts.limits);
  }
  throw std::invalid_argument("unknown format");
}

std::size_t required_slots(const TripletMatrix& m, Format f, const FormatOptions& opts) {
  switch (f) {
    case Format::csr: return m.nnz();
    case Format::ell: {
      const auto counts = m.row_counts();
      return counts.size() * max_row_count(counts);
    }
    case Format::bell: {
      const auto cols = block_columns(m, opts.block_h, opts.block_w);
      std::size_t max_blocks = 0;
      for (const auto& c : cols) max_blocks = std::max(max_blocks, c.size());
      return cols.size() * max_blocks * static_cast<std::size_t>(opts.block_h) *
             static_cast<std::size_t>(opts.block_w);
    }
    case Format::sell: return sell_slots(m.row_counts(), opts.slice_height);
  }
  return 0;
}

bool conversion_feasible(const TripletMatrix& m, Format f, const FormatOptions& opts) {
  if (f == Format::csr) {
    return m.nnz() <= static_cast<std::size_t>(std::numeric_limits<index_t>::max());
  }
  return required_slots(m, f, opts) <= opts.limits.max_slots;
}

Format format_of(const FormatMatrix& f) {
  return static_cast<Format>(f.index());
}

std::size_t nnz_of(const FormatMatrix& f) {
  return std::visit([](const auto& a) { return a.nnz(); }, f);
}

index_t rows_of(const FormatMatrix& f) {
  return std::visit([](const auto& a) { return a.n_rows; }, f);
}

index_t cols_of(const FormatMatrix& f) {
  return std::visit([](const auto& a) { return a.n_cols; }, f);
}

DenseMatrix reconstruct_dense(const CsrMatrix& a, std::size_t max_cells) {
  DenseMatrix d = make_dense(a.n_rows, a.n_cols, max_cells);
  for (index_t r = 0; r < a.n_rows; ++r) {
    for (index_t k = a.row_ptr[r]; k < a.row_ptr[r + 1]; ++k) {
      d.at(r, a.col_idx[k]) = a.values[k];
    }
  }
  return d;
}

DenseMatrix reconstruct_dense(const EllMatrix& a, std::size_t max_cells) {
  DenseMatrix d = make_dense(a.n_rows, a.n_cols, max_cells);
  const auto width = static_cast<std::size_t>(a.max_nnz);
  for (index_t r = 0; r < a.n_rows; ++r) {
    for (index_t k = 0; k < a.row_len[r]; ++k) {
      const std::size_t slot = static_cast<std::size_t>(r) * width + k;
      d.at(r, a.col_idx[slot]) = a.values[slot];
    }
  }
  return d;
}

DenseMatrix reconstruct_dense(const BellMatrix& a, std::size_t max_cells) {
  DenseMatrix d = make_dense(a.n_rows, a.n_cols, max_cells);
  const std::size_t block_size = static_cast<std::size_t>(a.block_h) * a.block_w;
  for (index_t br = 0; br < a.n_block_rows; ++br) {
    for (index_t j = 0; j < a.block_row_len[br]; ++j) {
      const std::size_t block = static_cast<std::size_t>(br) * a.max_blocks + j;
      const index_t col0 = a.block_col_idx[block] * a.block_w;
      for (index_t lr = 0; lr < a.block_h; ++lr) {
        const index_t r = br * a.block_h + lr;
        if (r >= a.n_rows) break;
        for (index_t lc = 0; lc < a.block_w; ++lc) {
          const index_t c = col0 + lc;
          if (c >= a.n_cols) break;
          const double v = a.data[block * block_size + static_cast<std::size_t>(lr) * a.block_w + lc];
          if (v != 0.0) d.at(r, c) = v;
        }
      }
    }
  }
  return d;
}

DenseMatrix reconstruct_dense(const SellMatrix& a, std::size_t max_cells) {
  DenseMatrix d = make_dense(a.n_rows, a.n_cols, max_cells);
  const auto h = static_cast<std::size_t>(a.slice_height);
  for (index_t r = 0; r < a.n_rows; ++r) {
    const std::size_t s = static_cast<std::size_t>(r) / h;
    const std::size_t base = static_cast<std::size_t>(a.slice_ptr[s]) +
                             (static_cast<std::size_t>(r) - s * h) * a.slice_width[s];
    for (index_t k = 0; k < a.row_len[r]; ++k) {
      d.at(r, a.col_idx[base + k]) = a.values[base + k];
    }
  }
  return d;
}

DenseMatrix reconstruct_dense(const FormatMatrix& a, std::size_t max_cells) {
  return std::visit([&](const auto& m) { return reconstruct_dense(m, max_cells); }, a);
}

namespace {
constexpr std::size_t kValueBytes = sizeof(double);
constexpr std::size_t kIndexBytes = sizeof(index_t);
}  // namespace

std::size_t format_footprint(const CsrMatrix& a) {
  return a.values.size() * kValueBytes + a.col_idx.size() * kIndexBytes +
         a.row_ptr.size() * kIndexBytes;
}

std::size_t format_footprint(const EllMatrix& a) {
  return a.values.size() * kValueBytes + a.col_idx.size() * kIndexBytes +
         a.row_len.size() * kIndexBytes;
}

std::size_t format_footprint(const BellMatrix& a) {
  return a.data.size() * kValueBytes + a.block_col_idx.size() * kIndexBytes +
         a.block_row_len.size() * kIndexBytes;
}

std::size_t format_footprint(const SellMatrix& a) {
  return a.values.size() * kValueBytes + a.col_idx.size() * kIndexBytes +
         a.row_len.size() * kIndexBytes + a.slice_width.size() * kIndexBytes +
         a.slice_ptr.size() * sizeof(std::int64_t);
}

std::size_t format_footprint(const FormatMatrix& a) {
  return std::visit([](const auto& m) { return format_footprint(m); }, a);
}

std::size_t padding_slots(const EllMatrix& a) { return a.slots() - a.nnz(); }
std::size_t padding_slots(const BellMatrix& a) { return a.data.size() - a.nnz(); }
std::size_t padding_slots(const SellMatrix& a) { return a.slots() - a.nnz(); }

}  // namespace autospmv
