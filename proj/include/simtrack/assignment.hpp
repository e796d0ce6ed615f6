#pragma once

#include <algorithm>
#include <cstddef>
#include <limits>
#include <span>
#include <utility>
#include <vector>

#include "simtrack/error.hpp"

namespace simtrack {

/// Munkres' assignment procedure (star / prime / cover) on a square cost
/// matrix, minimizing total cost. `cost` is row-major n x n. Returns the
/// column assigned to each row.
inline std::vector<int> hungarian_min_cost(std::span<const double> cost, std::size_t n) {
  if (cost.size() != n * n) throw ValidationError("cost matrix is not square");
  if (n == 0) return {};
  std::vector<double> c(cost.begin(), cost.end());
  auto at = [&](std::size_t i, std::size_t j) -> double& { return c[i * n + j]; };

  for (std::size_t i = 0; i < n; ++i) {
    const double m = *std::min_element(c.begin() + static_cast<std::ptrdiff_t>(i * n),
                                       c.begin() + static_cast<std::ptrdiff_t>((i + 1) * n));
    for (std::size_t j = 0; j < n; ++j) at(i, j) -= m;
  }
  for (std::size_t j = 0; j < n; ++j) {
    double m = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) m = std::min(m, at(i, j));
    for (std::size_t i = 0; i < n; ++i) at(i, j) -= m;
  }

  constexpr int kNone = -1;
  std::vector<int> star_in_row(n, kNone), star_in_col(n, kNone), prime_in_row(n, kNone);
  std::vector<char> row_covered(n, 0), col_covered(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (at(i, j) == 0.0 && star_in_row[i] == kNone && star_in_col[j] == kNone) {
        star_in_row[i] = static_cast<int>(j);
        star_in_col[j] = static_cast<int>(i);
      }
    }
  }

  std::vector<std::pair<int, int>> path;
  while (true) {
    std::size_t covered = 0;
    for (std::size_t j = 0; j < n; ++j) {
      col_covered[j] = star_in_col[j] != kNone ? 1 : 0;
      covered += static_cast<std::size_t>(col_covered[j]);
    }
    if (covered == n) break;
    std::fill(row_covered.begin(), row_covered.end(), 0);
    std::fill(prime_in_row.begin(), prime_in_row.end(), kNone);

    while (true) {
      int zr = kNone, zc = kNone;
      for (std::size_t i = 0; i < n && zr == kNone; ++i) {
        if (row_covered[i]) continue;
        for (std::size_t j = 0; j < n; ++j) {
          if (!col_covered[j] && at(i, j) == 0.0) {
            zr = static_cast<int>(i);
            zc = static_cast<int>(j);
            break;
          }
        }
      }
      if (zr == kNone) {
        // No uncovered zero: shift by the smallest uncovered entry.
        double m = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < n; ++i) {
          if (row_covered[i]) continue;
          for (std::size_t j = 0; j < n; ++j) {
            if (!col_covered[j]) m = std::min(m, at(i, j));
          }
        }
        for (std::size_t i = 0; i < n; ++i) {
          for (std::size_t j = 0; j < n; ++j) {
            if (row_covered[i]) at(i, j) += m;
            if (!col_covered[j]) at(i, j) -= m;
          }
        }
        continue;
      }
      const auto r = static_cast<std::size_t>(zr);
      prime_in_row[r] = zc;
      if (star_in_row[r] != kNone) {
        row_covered[r] = 1;
        col_covered[static_cast<std::size_t>(star_in_row[r])] = 0;
        continue;
      }
      // Augment along the alternating primed / starred path.
      path.assign(1, {zr, zc});
      while (true) {
        const int row = star_in_col[static_cast<std::size_t>(path.back().second)];
        if (row == kNone) break;
        path.emplace_back(row, path.back().second);
        path.emplace_back(row, prime_in_row[static_cast<std::size_t>(row)]);
      }
      for (std::size_t k = 0; k < path.size(); k += 2) {
        const auto [pr, pc] = path[k];
        star_in_row[static_cast<std::size_t>(pr)] = pc;
        star_in_col[static_cast<std::size_t>(pc)] = pr;
      }
      break;
    }
  }
  return star_in_row;
}

/// Rectangular assignment over a rows x cols weight grid where only cells
/// with `allowed[i * cols + j]` may be used. Among all matchings of maximum
/// cardinality it returns one of maximum total weight. Result maps each row
/// to a column or -1.
inline std::vector<int> max_weight_assignment(std::size_t rows, std::size_t cols,
                                              std::span<const double> weight,
                                              std::span<const char> allowed) {
  if (weight.size() != rows * cols || allowed.size() != rows * cols) {
    throw ValidationError("assignment grid size mismatch");
  }
  std::vector<int> result(rows, -1);
  const std::size_t n = std::max(rows, cols);
  if (rows == 0 || cols == 0) return result;

  double w_max = -std::numeric_limits<double>::infinity();
  double w_min = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < weight.size(); ++k) {
    if (!allowed[k]) continue;
    w_max = std::max(w_max, weight[k]);
    w_min = std::min(w_min, weight[k]);
  }
  if (w_max < w_min) return result;  // nothing allowed

  // Allowed cells cost w_max - w in [0, range]. Any other cell costs more
  // than a full set of allowed cells could, so the optimum first maximizes
  // how many allowed cells it uses.
  const double range = w_max - w_min;
  const double blocked = static_cast<double>(n) * range + 1.0;
  std::vector<double> cost(n * n, blocked);
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < cols; ++j) {
      if (allowed[i * cols + j]) cost[i * n + j] = w_max - weight[i * cols + j];
    }
  }
  const auto col_of_row = hungarian_min_cost(cost, n);
  for (std::size_t i = 0; i < rows; ++i) {
    const int j = col_of_row[i];
    if (j >= 0 && static_cast<std::size_t>(j) < cols && allowed[i * cols + static_cast<std::size_t>(j)]) {
      result[i] = j;
    }
  }
  return result;
}

}  // namespace simtrack
