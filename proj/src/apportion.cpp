#include "aerosynth/apportion.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace aerosynth {

std::vector<std::int64_t> largest_remainder(std::span<const std::int64_t> weights,
                                            std::int64_t total) {
  std::vector<std::int64_t> out(weights.size(), 0);
  const std::int64_t sum = std::accumulate(weights.begin(), weights.end(), std::int64_t{0});
  if (sum == 0 || total == 0) {
    return out;
  }
  std::vector<std::int64_t> remainder(weights.size());
  std::int64_t assigned = 0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    // Exact: quota = weights[i] * total / sum as quotient and remainder.
    const std::int64_t num = weights[i] * total;
    out[i] = num / sum;
    remainder[i] = num % sum;
    assigned += out[i];
  }
  std::vector<std::size_t> order(weights.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return remainder[a] > remainder[b]; });
  for (std::size_t k = 0; assigned < total; ++k) {
    ++out[order[k]];
    ++assigned;
  }
  return out;
}

namespace {

/// Tiny augmenting-path flow for the rounding-up assignment.
class RoundingFlow {
 public:
  RoundingFlow(std::vector<std::int64_t> row_need, std::vector<std::int64_t> col_need,
               std::vector<std::vector<std::int64_t>> remainder)
      : row_need_(std::move(row_need)),
        col_need_(std::move(col_need)),
        remainder_(std::move(remainder)),
        up_(row_need_.size(), std::vector<bool>(col_need_.size(), false)) {}

  std::vector<std::vector<bool>> solve() {
    // Greedy pass in order of decreasing remainder.
    struct Cell {
      std::int64_t rem;
      std::size_t i, j;
    };
    std::vector<Cell> cells;
    for (std::size_t i = 0; i < row_need_.size(); ++i) {
      for (std::size_t j = 0; j < col_need_.size(); ++j) {
        if (remainder_[i][j] > 0) {
          cells.push_back({remainder_[i][j], i, j});
        }
      }
    }
    std::stable_sort(cells.begin(), cells.end(),
                     [](const Cell& a, const Cell& b) { return a.rem > b.rem; });
    for (const auto& c : cells) {
      if (row_need_[c.i] > 0 && col_need_[c.j] > 0) {
        up_[c.i][c.j] = true;
        --row_need_[c.i];
        --col_need_[c.j];
      }
    }
    // Augment until every row is satisfied.
    for (std::size_t i = 0; i < row_need_.size(); ++i) {
      while (row_need_[i] > 0) {
        std::vector<bool> seen_rows(row_need_.size(), false);
        if (!augment(i, seen_rows)) {
          throw std::logic_error("controlled_round: no feasible rounding");
        }
        --row_need_[i];
      }
    }
    return up_;
  }

 private:
  // Finds an alternating path from row i to a column with spare need.
  bool augment(std::size_t i, std::vector<bool>& seen_rows) {
    seen_rows[i] = true;
    for (std::size_t j = 0; j < col_need_.size(); ++j) {
      if (remainder_[i][j] == 0 || up_[i][j]) {
        continue;
      }
      if (col_need_[j] > 0) {
        up_[i][j] = true;
        --col_need_[j];
        return true;
      }
      // Column j is full: try moving one of its rounded-up cells to another column.
      for (std::size_t k = 0; k < row_need_.size(); ++k) {
        if (k != i && up_[k][j] && !seen_rows[k]) {
          up_[k][j] = false;
          if (augment(k, seen_rows)) {
            up_[i][j] = true;
            return true;
          }
          up_[k][j] = true;
        }
      }
    }
    return false;
  }

  std::vector<std::int64_t> row_need_;
  std::vector<std::int64_t> col_need_;
  std::vector<std::vector<std::int64_t>> remainder_;
  std::vector<std::vector<bool>> up_;
};

}  // namespace

std::vector<std::vector<std::int64_t>> controlled_round(std::span<const std::int64_t> rows,
                                                        std::span<const std::int64_t> cols) {
  const std::int64_t total = std::accumulate(rows.begin(), rows.end(), std::int64_t{0});
  if (total != std::accumulate(cols.begin(), cols.end(), std::int64_t{0})) {
    throw std::invalid_argument("controlled_round: marginals disagree");
  }
  std::vector<std::vector<std::int64_t>> cell(rows.size(), std::vector<std::int64_t>(cols.size(), 0));
  if (total == 0) {
    return cell;
  }
  std::vector<std::vector<std::int64_t>> rem(rows.size(), std::vector<std::int64_t>(cols.size(), 0));
  std::vector<std::int64_t> row_need(rows.begin(), rows.end());
  std::vector<std::int64_t> col_need(cols.begin(), cols.end());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < cols.size(); ++j) {
      const std::int64_t num = rows[i] * cols[j];
      cell[i][j] = num / total;
      rem[i][j] = num % total;
      row_need[i] -= cell[i][j];
      col_need[j] -= cell[i][j];
    }
  }
  const auto up = RoundingFlow(row_need, col_need, rem).solve();
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < cols.size(); ++j) {
      cell[i][j] += up[i][j] ? 1 : 0;
    }
  }
  return cell;
}

}  // namespace aerosynth
