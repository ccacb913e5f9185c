#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <stdexcept>
#include <vector>

#include <boost/math/distributions/students_t.hpp>

namespace nfvchain::stats {

inline double mean(const std::vector<double>& v) {
  if (v.empty()) return std::nan("");
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

// Ranks starting at 1, ties get the average rank.
inline std::vector<double> ranks(const std::vector<double>& v) {
  std::vector<std::size_t> idx(v.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  std::vector<double> r(v.size());
  for (std::size_t k = 0; k < idx.size();) {
    std::size_t e = k;
    while (e + 1 < idx.size() && v[idx[e + 1]] == v[idx[k]]) ++e;
    const double avg = 0.5 * static_cast<double>(k + e) + 1.0;
    for (std::size_t t = k; t <= e; ++t) r[idx[t]] = avg;
    k = e + 1;
  }
  return r;
}

inline double pearson(const std::vector<double>& x, const std::vector<double>& y) {
  const double mx = mean(x), my = mean(y);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    sxy += (x[k] - mx) * (y[k] - my);
    sxx += (x[k] - mx) * (x[k] - mx);
    syy += (y[k] - my) * (y[k] - my);
  }
  if (sxx == 0.0 || syy == 0.0) return 0.0;
  return sxy / std::sqrt(sxx * syy);
}

inline double spearman(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("spearman: need two equal-length samples");
  return pearson(ranks(x), ranks(y));
}

enum class Direction { increasing, decreasing };

// One-sided p-value for a monotone trend of y in x.  Exact over all
// permutations of y for n <= 10, Student-t approximation above.
inline double spearman_p_value(const std::vector<double>& x, const std::vector<double>& y, Direction dir) {
  const double rho = spearman(x, y);
  const std::size_t n = x.size();
  const double sign = dir == Direction::increasing ? 1.0 : -1.0;
  if (n <= 10) {
    const std::vector<double> rx = ranks(x);
    std::vector<double> ry = ranks(y);
    std::sort(ry.begin(), ry.end());
    std::size_t hits = 0, total = 0;
    do {
      ++total;
      if (sign * pearson(rx, ry) >= sign * rho - 1e-12) ++hits;
    } while (std::next_permutation(ry.begin(), ry.end()));
    return static_cast<double>(hits) / static_cast<double>(total);
  }
  if (std::abs(rho) >= 1.0) return sign * rho > 0 ? 0.0 : 1.0;
  const double df = static_cast<double>(n) - 2.0;
  const double t = rho * std::sqrt(df / (1.0 - rho * rho));
  boost::math::students_t dist(df);
  return boost::math::cdf(boost::math::complement(dist, sign * t));
}

}  // namespace nfvchain::stats
