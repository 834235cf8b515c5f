#include "autospmv/formats.hpp"
#include "autospmv/features.hpp"
#include "autospmv/random.hpp"
#include "autospmv/synthetic.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace autospmv;

namespace {

TripletMatrix identity(index_t n) {
  std::vector<Triplet> e;
  for (index_t i = 0; i < n; ++i) e.push_back({i, i, 1.0});
  return TripletMatrix(n, n, e);
}

// Matrix whose rows hold the given nonzero counts in columns 0..k-1.
TripletMatrix with_row_counts(const std::vector<index_t>& counts, index_t n_cols) {
  std::vector<Triplet> e;
  for (index_t r = 0; r < static_cast<index_t>(counts.size()); ++r)
    for (index_t c = 0; c < counts[r]; ++c) e.push_back({r, c, 1.0 + r + c});
  return TripletMatrix(static_cast<index_t>(counts.size()), n_cols, e);
}

void check_ell_invariants(const EllMatrix& a) {
  index_t widest = 0;
  for (index_t r = 0; r < a.n_rows; ++r) {
    widest = std::max(widest, a.row_len[r]);
    for (index_t k = 0; k < a.max_nnz; ++k) {
      const std::size_t s = static_cast<std::size_t>(r) * a.max_nnz + k;
      if (k >= a.row_len[r]) {
        CHECK(a.values[s] == 0.0);
        CHECK(a.col_idx[s] == 0);
      } else if (k > 0) {
        CHECK(a.col_idx[s - 1] < a.col_idx[s]);
      }
    }
  }
  CHECK(a.max_nnz == widest);
}

void check_sell_invariants(const SellMatrix& a) {
  const std::size_t h = static_cast<std::size_t>(a.slice_height);
  CHECK(a.slice_ptr.front() == 0);
  for (std::size_t s = 0; s < a.n_slices(); ++s) {
    const std::size_t rows = std::min(h, static_cast<std::size_t>(a.n_rows) - s * h);
    CHECK(a.slice_ptr[s + 1] - a.slice_ptr[s] ==
          static_cast<std::int64_t>(rows * static_cast<std::size_t>(a.slice_width[s])));
    index_t widest = 0;
    for (std::size_t i = 0; i < rows; ++i) widest = std::max(widest, a.row_len[s * h + i]);
    CHECK(a.slice_width[s] == widest);
  }
}

}  // namespace

TEST_CASE("CSR of identity and empty") {
  auto a = coo_to_csr(identity(3));
  CHECK(a.row_ptr == std::vector<index_t>{0, 1, 2, 3});
  CHECK(a.col_idx == std::vector<index_t>{0, 1, 2});
  CHECK(a.values == std::vector<double>{1, 1, 1});
  CHECK(coo_to_csr(TripletMatrix(4, 4, {})).row_ptr == std::vector<index_t>{0, 0, 0, 0, 0});
  CHECK(oracle::equals_grid(reconstruct_dense(a), oracle::scatter(identity(3))));
}

TEST_CASE("ELL width and padding") {
  auto a = coo_to_ell(with_row_counts({2, 4, 1}, 5));
  CHECK(a.max_nnz == 4);
  CHECK(a.values.size() == 12);
  CHECK(padding_slots(a) == 5);
  check_ell_invariants(a);

  auto uniform = coo_to_ell(with_row_counts({4, 4, 4, 4}, 6));
  CHECK(padding_slots(uniform) == 0);
  CHECK(uniform.slots() == coo_to_csr(with_row_counts({4, 4, 4, 4}, 6)).values.size());

  CHECK(coo_to_ell(TripletMatrix(3, 3, {})).max_nnz == 0);
}

TEST_CASE("ELL memory guard") {
  Rng rng(1);
  auto m = synthetic::with_dense_row(100, 3, rng);
  CHECK_THROWS_AS(coo_to_ell(m, ConversionLimits{1000}), GuardExceeded);
  CHECK_NOTHROW(coo_to_ell(m, ConversionLimits{10000}));
  CHECK_FALSE(conversion_feasible(m, Format::ell, FormatOptions{2, 2, 2, {1000}}));
  CHECK(required_slots(m, Format::ell) == 100 * 100);
}

TEST_CASE("BELL block layout") {
  TripletMatrix corner(4, 4, {{0, 0, 1}, {0, 1, 2}, {1, 1, 3}});
  auto a = coo_to_bell(corner, 2, 2);
  CHECK(a.max_blocks == 1);
  CHECK(a.block_row_len == std::vector<index_t>{1, 0});
  CHECK(a.data.size() == 2 * 4);  // two block rows x one slot
  CHECK(std::all_of(a.data.begin() + 4, a.data.end(), [](double v) { return v == 0.0; }));

  std::vector<Triplet> dense;
  for (index_t r = 0; r < 4; ++r)
    for (index_t c = 0; c < 4; ++c) dense.push_back({r, c, 1.0 + r * 4 + c});
  auto full = coo_to_bell(TripletMatrix(4, 4, dense), 2, 2);
  CHECK(full.max_blocks == 2);
  CHECK(full.block_row_len == std::vector<index_t>{2, 2});
  CHECK(padding_slots(full) == 0);
  CHECK(std::none_of(full.data.begin(), full.data.end(), [](double v) { return v == 0.0; }));

  CHECK_THROWS_AS(coo_to_bell(corner, 0, 2), std::invalid_argument);
}

TEST_CASE("BELL ragged edges reconstruct exactly") {
  Rng rng(97);
  for (int t = 0; t < 10; ++t) {
    auto m = synthetic::random_sparse(9, 7, 0.3, rng);
    for (index_t bh : {1, 2, 3}) {
      for (index_t bw : {1, 2, 4}) {
        auto a = coo_to_bell(m, bh, bw);
        CHECK(oracle::equals_grid(reconstruct_dense(a), oracle::scatter(m)));
        for (index_t br = 0; br < a.n_block_rows; ++br) {
          for (index_t j = 1; j < a.block_row_len[br]; ++j) {
            const std::size_t s = static_cast<std::size_t>(br) * a.max_blocks + j;
            CHECK(a.block_col_idx[s - 1] < a.block_col_idx[s]);
          }
        }
      }
    }
  }
}

TEST_CASE("SELL slices") {
  auto m = with_row_counts({3, 1, 2, 2}, 4);
  auto a = coo_to_sell(m, 2);
  CHECK(a.slice_width == std::vector<index_t>{3, 2});
  CHECK(padding_slots(a) == 2);
  check_sell_invariants(a);

  auto as_ell = coo_to_sell(m, 4);
  CHECK(padding_slots(as_ell) == padding_slots(coo_to_ell(m)));

  Rng rng(11);
  auto r = synthetic::random_sparse(11, 11, 0.3, rng);
  auto s = coo_to_sell(r, 2);
  check_sell_invariants(s);
  CHECK(oracle::equals_grid(reconstruct_dense(s), oracle::scatter(r)));
  CHECK_THROWS_AS(coo_to_sell(r, 0), std::invalid_argument);
}

TEST_CASE("random 8x8 and 10x10 reconstruct exactly") {
  Rng rng(8);
  for (int t = 0; t < 20; ++t) {
    auto m8 = synthetic::random_sparse(8, 8, 20.0 / 64.0, rng);
    CHECK(oracle::equals_grid(reconstruct_dense(coo_to_csr(m8)), oracle::scatter(m8)));
    auto m10 = synthetic::random_sparse(10, 10, 0.25, rng);
    auto ell = coo_to_ell(m10);
    check_ell_invariants(ell);
    CHECK(oracle::equals_grid(reconstruct_dense(ell), oracle::scatter(m10)));
  }
}

TEST_CASE("property: all four formats reconstruct identically and deterministically") {
  Rng rng(2024);
  for (int t = 0; t < 100; ++t) {
    const auto rows = static_cast<index_t>(1 + rng.uniform_index(30));
    const auto cols = static_cast<index_t>(1 + rng.uniform_index(30));
    auto m = synthetic::random_sparse(rows, cols, rng.uniform(0.0, 0.6), rng);
    const auto grid = oracle::scatter(m);
    for (Format f : kAllFormats) {
      auto a = convert(m, f);
      CHECK(oracle::equals_grid(reconstruct_dense(a), grid));
      CHECK(nnz_of(a) == m.nnz());
      auto b = convert(m, f);
      CHECK(a == b);
    }
    auto ell = coo_to_ell(m);
    auto sell = coo_to_sell(m, 2);
    CHECK(padding_slots(ell) == static_cast<std::size_t>(rows) * ell.max_nnz - m.nnz());
    CHECK(padding_slots(sell) <= padding_slots(ell));
    CHECK(padding_slots(coo_to_sell(m, rows)) == padding_slots(ell));
    if (m.nnz() > 0) {
      const double ratio = extract_features(m).ell_ratio;
      CHECK(ratio == doctest::Approx(1.0 - static_cast<double>(padding_slots(ell)) /
                                               static_cast<double>(ell.slots()))
                         .epsilon(1e-12));
    }
    for (Format f : kAllFormats) CHECK(required_slots(m, f) == std::visit([](const auto& x) {
      using M = std::decay_t<decltype(x)>;
      if constexpr (std::is_same_v<M, BellMatrix>) return x.data.size();
      else return x.values.size();
    }, convert(m, f)));
  }
}

TEST_CASE("footprint") {
  CHECK(format_footprint(coo_to_csr(identity(3))) == 3 * 8 + 3 * 4 + 4 * 4);

  auto uniform = with_row_counts({3, 3, 3}, 5);
  auto ell = coo_to_ell(uniform);
  CHECK(ell.values.size() == coo_to_csr(uniform).values.size());
  CHECK(format_footprint(ell) == 3 * 3 * (8 + 4) + 3 * 4);

  // Direct count: ELL - CSR = 12 * padding - 4 bytes.
  Rng rng(3);
  for (int t = 0; t < 20; ++t) {
    auto m = synthetic::power_law_rows(40, 40, 4.0, 1.5, rng);
    auto e = coo_to_ell(m);
    auto c = coo_to_csr(m);
    const auto direct_ell = e.values.size() * sizeof(double) + e.col_idx.size() * sizeof(index_t) +
                            e.row_len.size() * sizeof(index_t);
    const auto direct_csr = c.values.size() * sizeof(double) + c.col_idx.size() * sizeof(index_t) +
                            c.row_ptr.size() * sizeof(index_t);
    CHECK(format_footprint(e) == direct_ell);
    CHECK(format_footprint(c) == direct_csr);
    CHECK((format_footprint(e) >= format_footprint(c)) == (12 * padding_slots(e) >= 4));
  }
}

TEST_CASE("degenerate shapes") {
  Rng rng(5);
  std::vector<TripletMatrix> cases = {TripletMatrix(0, 0, {}), TripletMatrix(1, 1, {}),
                                      TripletMatrix(1, 7, {{0, 3, 2.0}, {0, 6, -1.0}}),
                                      TripletMatrix(7, 1, {{2, 0, 2.0}, {6, 0, -1.0}}),
                                      synthetic::with_dense_row(12, 5, rng)};
  for (const auto& m : cases) {
    for (Format f : kAllFormats) {
      CHECK(oracle::equals_grid(reconstruct_dense(convert(m, f)), oracle::scatter(m)));
    }
  }
}

TEST_CASE("format names round-trip") {
  for (Format f : kAllFormats) CHECK(parse_format(to_string(f)) == f);
  CHECK_FALSE(parse_format("hyb").has_value());
}
