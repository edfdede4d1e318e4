#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace aerosynth {

/// Largest-remainder (Hamilton) apportionment of `total` in proportion to the
/// nonnegative integer `weights`. The result sums to `total` exactly; ties on the
/// remainder go to the lower index. All-zero weights yield all zeros.
std::vector<std::int64_t> largest_remainder(std::span<const std::int64_t> weights,
                                            std::int64_t total);

/// Integer table whose row sums are `row_totals` and column sums are
/// `col_totals`, each cell being the floor or ceiling of row_i * col_j / total.
/// Both marginals must sum to the same total.
std::vector<std::vector<std::int64_t>> controlled_round(std::span<const std::int64_t> row_totals,
                                                        std::span<const std::int64_t> col_totals);

}  // namespace aerosynth
