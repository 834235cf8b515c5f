// Serial reference kernels vs the OpenMP kernels, per format and matrix
// family. Speedup is serial time over parallel time at the same format.

#include <cstdio>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "autospmv/formats.hpp"
#include "autospmv/kernels.hpp"
#include "autospmv/random.hpp"
#include "autospmv/serial_kernels.hpp"
#include "autospmv/synthetic.hpp"
#include "autospmv/timing.hpp"

using namespace autospmv;

int main(int argc, char** argv) {
  CLI::App app{"SpMV kernel benchmark: serial reference vs OpenMP"};
  int rows = 100000;
  int per_row = 16;
  std::vector<int> workers{1, 2, 4};
  int chunk = 64;
  double min_ms = 200;
  std::uint64_t seed = 1;
  app.add_option("--rows", rows, "Rows (and columns) per matrix")->check(CLI::PositiveNumber);
  app.add_option("--per-row", per_row, "Average nonzeros per row")->check(CLI::PositiveNumber);
  app.add_option("--workers", workers, "OpenMP worker counts")->delimiter(',');
  app.add_option("--chunk", chunk, "Rows per scheduling chunk")->check(CLI::PositiveNumber);
  app.add_option("--min-total-ms", min_ms, "Timed wall time per kernel")->check(CLI::PositiveNumber);
  app.add_option("--seed", seed, "Matrix generator seed");
  CLI11_PARSE(app, argc, argv);

  Rng rng(seed);
  const auto n = static_cast<index_t>(rows);
  const auto k = static_cast<index_t>(per_row);
  const std::vector<NamedMatrix> matrices{
      {"uniform", synthetic::uniform_rows(n, n, k, rng)},
      {"banded", synthetic::banded(n, k / 2, rng)},
      {"power_law", synthetic::power_law_rows(n, n, per_row, 1.5, rng)},
      {"block", synthetic::block_structured(n, 4, std::max<index_t>(1, k / 4), rng)},
  };
  const TimingParams timing{Seconds{min_ms / 1000.0}, 200000, 3};

  std::printf("%-10s %-5s %10s %-9s %12s %8s\n", "matrix", "fmt", "nnz", "kernel", "seconds",
              "speedup");
  for (const auto& nm : matrices) {
    const std::vector<double> x(static_cast<std::size_t>(nm.matrix.n_cols()), 1.0);
    std::vector<double> y(static_cast<std::size_t>(nm.matrix.n_rows()));
    for (Format f : kAllFormats) {
      if (!conversion_feasible(nm.matrix, f)) {
        std::printf("%-10s %-5s %10zu %-9s %12s %8s\n", nm.id.c_str(),
                    std::string(to_string(f)).c_str(), nm.matrix.nnz(), "-", "infeasible", "");
        continue;
      }
      const auto a = convert(nm.matrix, f);
      const double serial_s = time_kernel([&] { serial::spmv(a, x, y); }, timing).mean_seconds;
      std::printf("%-10s %-5s %10zu %-9s %12.4e %8s\n", nm.id.c_str(),
                  std::string(to_string(f)).c_str(), nm.matrix.nnz(), "serial", serial_s, "1.00");
      for (int w : workers) {
        const ExecConfig cfg{w, chunk};
        const double par_s = time_kernel([&] { spmv(a, x, y, cfg); }, timing).mean_seconds;
        const std::string label = "omp x" + std::to_string(w);
        std::printf("%-10s %-5s %10zu %-9s %12.4e %8.2f\n", nm.id.c_str(),
                    std::string(to_string(f)).c_str(), nm.matrix.nnz(), label.c_str(), par_s,
                    serial_s / par_s);
      }
    }
  }
  return 0;
}
