#pragma once

// Minimum-cost perfect assignment on a square matrix (shortest augmenting
// path with potentials, O(n^3)).

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <vector>

namespace nfvchain {

// Marks a pair that must not be selected.
inline constexpr double kInadmissible = std::numeric_limits<double>::infinity();

using CostMatrix = std::vector<std::vector<double>>;

struct Assignment {
  std::vector<std::size_t> column;  // column[row]
  double total = 0.0;
};

class NoAssignmentError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Value substituted for inadmissible entries: large enough that any
// assignment using one costs more than every admissible assignment.
inline double big_value(const CostMatrix& a) {
  double largest = 0.0;
  for (const auto& row : a)
    for (double v : row)
      if (std::isfinite(v)) largest = std::max(largest, std::abs(v));
  return 1e9 * (largest + 1.0);
}

inline Assignment hungarian(const CostMatrix& a) {
  const std::size_t n = a.size();
  for (const auto& row : a)
    if (row.size() != n) throw std::invalid_argument("hungarian: matrix must be square");
  for (std::size_t r = 0; r < n; ++r) {
    if (std::none_of(a[r].begin(), a[r].end(), [](double v) { return std::isfinite(v); }))
      throw NoAssignmentError("hungarian: row " + std::to_string(r) + " has no admissible column");
    for (double v : a[r])
      if (std::isnan(v) || v == -kInadmissible)
        throw std::invalid_argument("hungarian: entries must be finite or inadmissible");
  }
  if (n == 0) return {};

  const double big = big_value(a);
  auto cost = [&](std::size_t r, std::size_t c) {
    return std::isfinite(a[r][c]) ? a[r][c] : big;
  };

  // 1-based potentials; p[c] is the row matched to column c.
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<std::size_t> p(n + 1, 0), way(n + 1, 0);
  for (std::size_t r = 1; r <= n; ++r) {
    p[0] = r;
    std::size_t c0 = 0;
    std::vector<double> minv(n + 1, inf);
    std::vector<bool> used(n + 1, false);
    do {
      used[c0] = true;
      const std::size_t r0 = p[c0];
      double delta = inf;
      std::size_t c1 = 0;
      for (std::size_t c = 1; c <= n; ++c) {
        if (used[c]) continue;
        const double cur = cost(r0 - 1, c - 1) - u[r0] - v[c];
        if (cur < minv[c]) {
          minv[c] = cur;
          way[c] = c0;
        }
        if (minv[c] < delta) {
          delta = minv[c];
          c1 = c;
        }
      }
      for (std::size_t c = 0; c <= n; ++c) {
        if (used[c]) {
          u[p[c]] += delta;
          v[c] -= delta;
        } else {
          minv[c] -= delta;
        }
      }
      c0 = c1;
    } while (p[c0] != 0);
    do {
      const std::size_t c1 = way[c0];
      p[c0] = p[c1];
      c0 = c1;
    } while (c0 != 0);
  }

  Assignment out;
  out.column.assign(n, 0);
  for (std::size_t c = 1; c <= n; ++c) out.column[p[c] - 1] = c - 1;
  // Sum the original entries so the total is exact for integer input.
  for (std::size_t r = 0; r < n; ++r) {
    const double e = a[r][out.column[r]];
    if (!std::isfinite(e)) throw NoAssignmentError("hungarian: no admissible perfect assignment");
    out.total += e;
  }
  return out;
}

}  // namespace nfvchain
