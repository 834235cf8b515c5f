#include <thread>

#include "autospmv/kernels.hpp"
#include "autospmv/random.hpp"
#include "autospmv/serial_kernels.hpp"
#include "autospmv/synthetic.hpp"
#include "autospmv/timing.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace autospmv;

namespace {

const ExecConfig kConfigs[] = {{1, 1}, {2, 3}, {4, 16}, {3, 64}};

std::vector<double> random_vector(std::size_t n, Rng& rng) {
  std::vector<double> x(n);
  for (auto& v : x) v = rng.uniform(-1.0, 1.0);
  return x;
}

}  // namespace

TEST_CASE("identity and zero products") {
  TripletMatrix id(3, 3, {{0, 0, 1}, {1, 1, 1}, {2, 2, 1}});
  const std::vector<double> x{1, 2, 3};
  for (Format f : kAllFormats) {
    CHECK(spmv(convert(id, f), x, ExecConfig{}) == x);
    CHECK(spmv(convert(TripletMatrix(2, 2, {}), f), std::vector<double>{5, -1}, ExecConfig{2, 1}) ==
          std::vector<double>{0, 0});
  }
}

TEST_CASE("dense oracle kernel") {
  DenseMatrix a{2, 2, {1, 0, 0, 2}};
  CHECK(spmv_dense(a, std::vector<double>{3, 4}) == std::vector<double>{3, 8});
  Rng rng(1);
  auto m = synthetic::random_sparse(9, 5, 0.4, rng);
  CHECK(spmv_dense(to_dense(m), std::vector<double>(5, 0.0)) == std::vector<double>(9, 0.0));
  // Cross-check against triplet scatter-multiply.
  auto x = random_vector(5, rng);
  std::vector<double> y(9);
  serial::spmv_triplets(m, x, y);
  CHECK(oracle::max_rel_error(spmv_dense(to_dense(m), x), y) <= 1e-12);
  CHECK_THROWS_AS(spmv_dense(a, std::vector<double>{1}), DimensionMismatch);
}

TEST_CASE("ELL of uniform matrix times ones gives row sums") {
  Rng rng(2);
  auto m = synthetic::uniform_rows(20, 30, 4, rng);
  std::vector<double> sums(20, 0.0);
  for (const auto& e : m.entries()) sums[e.row] += e.value;
  auto y = spmv(coo_to_ell(m), std::vector<double>(30, 1.0), ExecConfig{2, 4});
  CHECK(oracle::max_rel_error(y, sums) <= 1e-12);
}

TEST_CASE("BELL 2x2 on dense 4x4 and SELL on ragged 33x33") {
  Rng rng(3);
  auto dense = synthetic::random_sparse(4, 4, 1.0, rng);
  auto x4 = random_vector(4, rng);
  CHECK(oracle::max_rel_error(spmv(coo_to_bell(dense, 2, 2), x4, ExecConfig{2, 1}),
                              oracle::dense_product(oracle::scatter(dense), x4)) <= 1e-12);
  auto ragged = synthetic::power_law_rows(33, 33, 5.0, 1.5, rng);
  auto x33 = random_vector(33, rng);
  CHECK(oracle::max_rel_error(spmv(coo_to_sell(ragged, 2), x33, ExecConfig{3, 2}),
                              oracle::dense_product(oracle::scatter(ragged), x33)) <= 1e-12);
}

TEST_CASE("random 64x64: every format and config matches the oracle, bitwise across configs") {
  Rng rng(64);
  for (int t = 0; t < 10; ++t) {
    auto m = synthetic::random_sparse(64, 64, rng.uniform(0.01, 0.5), rng);
    auto x = random_vector(64, rng);
    const auto ref = spmv_dense(to_dense(m), x);
    for (Format f : kAllFormats) {
      auto a = convert(m, f);
      std::vector<double> serial_y(64);
      serial::spmv(a, x, serial_y);
      for (const auto& cfg : kConfigs) {
        auto y = spmv(a, x, cfg);
        CHECK(oracle::max_rel_error(y, ref) <= 1e-12);
        CHECK(y == serial_y);
      }
    }
  }
}

TEST_CASE("degenerate shapes under every format and config") {
  Rng rng(4);
  std::vector<TripletMatrix> cases = {TripletMatrix(0, 0, {}), TripletMatrix(3, 4, {}),
                                      synthetic::random_sparse(1, 17, 0.5, rng),
                                      synthetic::random_sparse(17, 1, 0.5, rng),
                                      TripletMatrix(5, 5, {{4, 4, 2.0}}),
                                      synthetic::with_dense_row(15, 0, rng)};
  for (const auto& m : cases) {
    auto x = random_vector(static_cast<std::size_t>(m.n_cols()), rng);
    std::vector<double> ref(static_cast<std::size_t>(m.n_rows()));
    serial::spmv_triplets(m, x, ref);
    for (Format f : kAllFormats) {
      for (const auto& cfg : kConfigs) {
        CHECK(oracle::max_rel_error(spmv(convert(m, f), x, cfg), ref) <= 1e-12);
      }
    }
  }
}

TEST_CASE("kernel argument errors") {
  auto a = coo_to_csr(TripletMatrix(2, 3, {{0, 0, 1.0}}));
  std::vector<double> y(2);
  CHECK_THROWS_AS(spmv_csr(a, std::vector<double>(2), y, ExecConfig{}), DimensionMismatch);
  CHECK_THROWS_AS(spmv_csr(a, std::vector<double>(3), y, ExecConfig{0, 1}), std::invalid_argument);
  CHECK_THROWS_AS(spmv_csr(a, std::vector<double>(3), y, ExecConfig{1, 0}), std::invalid_argument);
}

TEST_CASE("time_kernel repetition control") {
  int calls = 0;
  auto one = time_kernel([&] { ++calls; }, TimingParams{Seconds{10.0}, 1, 3});
  CHECK(one.repetitions == 1);
  CHECK(calls == 4);  // three warmups + one timed

  auto t = time_kernel([] { std::this_thread::sleep_for(std::chrono::milliseconds(1)); },
                       TimingParams{Seconds{0.010}, 200000, 3});
  CHECK(t.total_seconds >= 0.010);
  CHECK(t.repetitions <= 10);
  CHECK(t.mean_seconds >= 0.9e-3);
  // Idle-machine expectations; scheduler jitter may stretch each sleep.
  WARN(t.repetitions >= 10);
  WARN(t.mean_seconds <= 1.5e-3);

  auto again = time_kernel([] { std::this_thread::sleep_for(std::chrono::milliseconds(1)); },
                           TimingParams{Seconds{0.010}, 200000, 3});
  WARN(again.mean_seconds == doctest::Approx(t.mean_seconds).epsilon(0.2));
  CHECK(t.mean_seconds * static_cast<double>(t.repetitions) ==
        doctest::Approx(t.total_seconds).epsilon(1e-9));
  CHECK_THROWS_AS(time_kernel([] {}, TimingParams{Seconds{0.0}, 1, 0}), std::invalid_argument);
}

TEST_CASE("mflops convention") {
  KernelTiming t{1e-3, 1, 1e-3};
  CHECK(mflops(1'000'000, t) == doctest::Approx(2000.0));
  CHECK(mflops(0, t) == 0.0);
  CHECK_THROWS_AS(mflops(10, KernelTiming{0.0, 1, 0.0}), std::invalid_argument);

  // Independent flop count: one multiply and one add per stored nonzero.
  Rng rng(9);
  auto m = synthetic::random_sparse(50, 50, 0.2, rng);
  std::size_t flops = 0;
  for (const auto& e : m.entries()) flops += e.value != 0.0 ? 2 : 0;
  KernelTiming half{0.5e-6 * static_cast<double>(flops), 1, 0};
  CHECK(mflops(m.nnz(), half) == doctest::Approx(2.0));
}
