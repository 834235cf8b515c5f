#include "autospmv/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <unordered_set>

namespace autospmv::synthetic {

namespace {

double draw_value(Rng& rng) {
  const double magnitude = rng.uniform(0.5, 1.5);
  return rng.uniform01() < 0.5 ? -magnitude : magnitude;
}

// Floyd's sampling of k distinct values from [0, n), returned sorted.
std::vector<index_t> distinct_columns(index_t n, index_t k, Rng& rng) {
  k = std::min(k, n);
  std::unordered_set<index_t> chosen;
  chosen.reserve(static_cast<std::size_t>(k) * 2);
  std::vector<index_t> out;
  out.reserve(static_cast<std::size_t>(k));
  for (index_t j = n - k; j < n; ++j) {
    auto t = static_cast<index_t>(rng.uniform_index(static_cast<std::uint64_t>(j) + 1));
    if (!chosen.insert(t).second) {
      chosen.insert(j);
      t = j;
    }
    out.push_back(t);
  }
  std::sort(out.begin(), out.end());
  return out;
}

TripletMatrix rows_with_lengths(index_t n_rows, index_t n_cols,
                                const std::vector<index_t>& lengths, Rng& rng) {
  std::vector<Triplet> entries;
  for (index_t r = 0; r < n_rows; ++r) {
    for (index_t c : distinct_columns(n_cols, lengths[r], rng)) {
      entries.push_back({r, c, draw_value(rng)});
    }
  }
  return TripletMatrix(n_rows, n_cols, std::move(entries));
}

}  // namespace

TripletMatrix random_sparse(index_t n_rows, index_t n_cols, double density, Rng& rng) {
  std::vector<Triplet> entries;
  for (index_t r = 0; r < n_rows; ++r) {
    for (index_t c = 0; c < n_cols; ++c) {
      if (rng.uniform01() < density) entries.push_back({r, c, draw_value(rng)});
    }
  }
  return TripletMatrix(n_rows, n_cols, std::move(entries));
}

TripletMatrix uniform_rows(index_t n_rows, index_t n_cols, index_t per_row, Rng& rng) {
  return rows_with_lengths(n_rows, n_cols,
                           std::vector<index_t>(static_cast<std::size_t>(n_rows), per_row), rng);
}

TripletMatrix banded(index_t n, index_t half_bandwidth, Rng& rng) {
  std::vector<Triplet> entries;
  for (index_t r = 0; r < n; ++r) {
    const index_t lo = std::max<index_t>(0, r - half_bandwidth);
    const index_t hi = std::min<index_t>(n - 1, r + half_bandwidth);
    for (index_t c = lo; c <= hi; ++c) entries.push_back({r, c, draw_value(rng)});
  }
  return TripletMatrix(n, n, std::move(entries));
}

TripletMatrix power_law_rows(index_t n_rows, index_t n_cols, double avg_per_row, double alpha,
                             Rng& rng) {
  // Pareto(x_m, alpha) has mean x_m * alpha / (alpha - 1).
  const double x_m = avg_per_row * (alpha - 1.0) / alpha;
  std::vector<index_t> lengths(static_cast<std::size_t>(n_rows));
  for (auto& len : lengths) {
    double u = rng.uniform01();
    while (u <= 0.0) u = rng.uniform01();
    const double v = x_m / std::pow(u, 1.0 / alpha);
    len = static_cast<index_t>(std::clamp(std::round(v), 1.0, static_cast<double>(n_cols)));
  }
  return rows_with_lengths(n_rows, n_cols, lengths, rng);
}

TripletMatrix block_structured(index_t n, index_t block, index_t blocks_per_row, Rng& rng) {
  const index_t n_blocks = (n + block - 1) / block;
  std::vector<Triplet> entries;
  for (index_t br = 0; br < n_blocks; ++br) {
    for (index_t bc : distinct_columns(n_blocks, blocks_per_row, rng)) {
      for (index_t i = 0; i < block; ++i) {
        for (index_t j = 0; j < block; ++j) {
          const index_t r = br * block + i;
          const index_t c = bc * block + j;
          if (r < n && c < n) entries.push_back({r, c, draw_value(rng)});
        }
      }
    }
  }
  return TripletMatrix(n, n, std::move(entries));
}

TripletMatrix with_dense_row(index_t n, index_t dense_row, Rng& rng) {
  std::vector<Triplet> entries;
  for (index_t r = 0; r < n; ++r) {
    if (r == dense_row) {
      for (index_t c = 0; c < n; ++c) entries.push_back({r, c, draw_value(rng)});
    } else {
      entries.push_back({r, r, draw_value(rng)});
    }
  }
  return TripletMatrix(n, n, std::move(entries));
}

std::string_view to_string(Family f) {
  switch (f) {
    case Family::uniform: return "uniform";
    case Family::banded: return "banded";
    case Family::power_law: return "powerlaw";
    case Family::block: return "block";
    case Family::random: return "ragged";
  }
  return "?";
}

namespace {

TripletMatrix make_family(Family family, index_t n, Rng& rng) {
  switch (family) {
    case Family::uniform:
      return uniform_rows(n, n, static_cast<index_t>(3 + rng.uniform_index(22)), rng);
    case Family::banded:
      return banded(n, static_cast<index_t>(1 + rng.uniform_index(8)), rng);
    case Family::power_law:
      return power_law_rows(n, n, rng.uniform(4.0, 16.0), rng.uniform(1.3, 2.2), rng);
    case Family::block: {
      const index_t block = rng.uniform01() < 0.5 ? 2 : 4;
      return block_structured(n, block, static_cast<index_t>(2 + rng.uniform_index(5)), rng);
    }
    case Family::random: {
      const auto avg = static_cast<index_t>(4 + rng.uniform_index(12));
      std::vector<index_t> lengths(static_cast<std::size_t>(n));
      for (auto& len : lengths) {
        len = static_cast<index_t>(1 + rng.uniform_index(static_cast<std::uint64_t>(2 * avg)));
      }
      return rows_with_lengths(n, n, lengths, rng);
    }
  }
  return {};
}

constexpr Family kFamilies[] = {Family::uniform, Family::power_law, Family::banded,
                                Family::random, Family::block};

}  // namespace

std::vector<NamedMatrix> corpus(std::size_t count, std::uint64_t seed, index_t min_rows,
                                index_t max_rows) {
  std::vector<NamedMatrix> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    Rng rng(mix_seed(seed, i));
    const double t = count > 1 ? static_cast<double>(i) / static_cast<double>(count - 1) : 0.0;
    // Interleave sizes so every family spans the whole size range.
    const double frac = std::fmod(t * 7.0, 1.0);
    const auto n = static_cast<index_t>(std::round(
        static_cast<double>(min_rows) *
        std::pow(static_cast<double>(max_rows) / static_cast<double>(min_rows), frac)));
    const Family family = kFamilies[i % std::size(kFamilies)];
    char id[64];
    std::snprintf(id, sizeof(id), "syn%03zu_%s_%d", i, std::string(to_string(family)).c_str(), n);
    out.push_back({id, make_family(family, n, rng)});
  }
  return out;
}

std::vector<NamedMatrix> size_ladder(Family family, std::size_t steps, index_t first_rows,
                                     double growth, std::uint64_t seed) {
  std::vector<NamedMatrix> out;
  double n = first_rows;
  for (std::size_t i = 0; i < steps; ++i, n *= growth) {
    // Same per-row parameters at every step; only size changes.
    Rng params(seed);
    Rng rng(mix_seed(seed, i));
    const auto rows = static_cast<index_t>(std::round(n));
    TripletMatrix m;
    switch (family) {
      case Family::uniform: m = uniform_rows(rows, rows, 8, rng); break;
      case Family::banded: m = banded(rows, 4, rng); break;
      case Family::power_law: m = power_law_rows(rows, rows, 8.0, 1.8, rng); break;
      case Family::block: m = block_structured(rows, 2, 4, rng); break;
      case Family::random: m = make_family(Family::random, rows, params); break;
    }
    char id[64];
    std::snprintf(id, sizeof(id), "ladder%02zu_%s_%d", i, std::string(to_string(family)).c_str(),
                  rows);
    out.push_back({id, std::move(m)});
  }
  return out;
}

}  // namespace autospmv::synthetic
