#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

#include "autospmv/matrix_io.hpp"
#include "autospmv/random.hpp"

// Seeded matrix generators for tests, sweeps and the benchmark. Stored values
// are drawn from +-[0.5, 1.5) so no explicit zero is ever produced.
namespace autospmv::synthetic {

/// Each cell independently nonzero with probability `density`.
TripletMatrix random_sparse(index_t n_rows, index_t n_cols, double density, Rng& rng);

/// Every row holds exactly `per_row` nonzeros at random distinct columns.
TripletMatrix uniform_rows(index_t n_rows, index_t n_cols, index_t per_row, Rng& rng);

/// Band of half-width `half_bandwidth` around the diagonal.
TripletMatrix banded(index_t n, index_t half_bandwidth, Rng& rng);

/// Heavy-tailed row lengths: Pareto with shape `alpha` scaled to mean
/// `avg_per_row`, each clamped to [1, n_cols].
TripletMatrix power_law_rows(index_t n_rows, index_t n_cols, double avg_per_row,
                             double alpha, Rng& rng);

/// Dense `block` x `block` tiles; each block row holds `blocks_per_row`
/// tiles at random block columns.
TripletMatrix block_structured(index_t n, index_t block, index_t blocks_per_row, Rng& rng);

/// Identity plus one fully dense row at `dense_row`.
TripletMatrix with_dense_row(index_t n, index_t dense_row, Rng& rng);

enum class Family { uniform, banded, power_law, block, random };

std::string_view to_string(Family f);

/// Mixed regular/irregular corpus; sizes log-spaced in [min_rows, max_rows].
std::vector<NamedMatrix> corpus(std::size_t count, std::uint64_t seed, index_t min_rows,
                                index_t max_rows);

/// One family at geometrically growing sizes (for overhead trends).
std::vector<NamedMatrix> size_ladder(Family family, std::size_t steps, index_t first_rows,
                                     double growth, std::uint64_t seed);

}  // namespace autospmv::synthetic
