#pragma once

// Covering numbers of finite samples: greedy eps-nets for the upper bound and
// greedy 2 eps-separated packings for the lower bound.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <vector>

#include "geobary/error.hpp"
#include "geobary/linalg.hpp"
#include "geobary/regression.hpp"

namespace geobary {

inline constexpr std::size_t kMaxCoverageLimit = 4096;

struct CoveringResult {
  int cover = 0;           // size of the best eps-net found (upper bound)
  int farthest_first = 0;
  int max_coverage = 0;    // 0 when skipped
  int packing = 0;         // 2 eps-separated subset (lower bound)
  double eps = 0.0;

  /// packing <= N(eps) <= cover.
  bool sandwich_holds() const { return 1 <= packing && packing <= cover; }
};

namespace detail {

template <class Point, class Dist>
int farthest_first_net(const std::vector<Point>& pts, double eps, Dist dist) {
  const std::size_t n = pts.size();
  std::vector<double> gap(n, std::numeric_limits<double>::infinity());
  std::size_t next = 0;
  int centers = 0;
  while (true) {
    ++centers;
    double far = -1.0;
    std::size_t arg = 0;
    for (std::size_t i = 0; i < n; ++i) {
      gap[i] = std::min(gap[i], dist(pts[next], pts[i]));
      if (gap[i] > far) {
        far = gap[i];
        arg = i;
      }
    }
    if (far <= eps) return centers;
    next = arg;
  }
}

// Picks the center covering most uncovered points until all are covered.
template <class Point, class Dist>
int max_coverage_net(const std::vector<Point>& pts, double eps, Dist dist) {
  const std::size_t n = pts.size();
  std::vector<std::vector<std::size_t>> ball(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (dist(pts[i], pts[j]) <= eps) ball[i].push_back(j);
  std::vector<char> covered(n, 0);
  std::size_t left = n;
  int centers = 0;
  while (left > 0) {
    std::size_t best = 0, gain = 0;
    for (std::size_t i = 0; i < n; ++i) {
      std::size_t g = 0;
      for (std::size_t j : ball[i]) g += covered[j] == 0;
      if (g > gain) {
        gain = g;
        best = i;
      }
    }
    for (std::size_t j : ball[best])
      if (!covered[j]) {
        covered[j] = 1;
        --left;
      }
    ++centers;
  }
  return centers;
}

template <class Point, class Dist>
int greedy_packing(const std::vector<Point>& pts, double sep, Dist dist) {
  std::vector<std::size_t> chosen;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    bool ok = true;
    for (std::size_t c : chosen)
      if (dist(pts[c], pts[i]) <= sep) {
        ok = false;
        break;
      }
    if (ok) chosen.push_back(i);
  }
  return static_cast<int>(chosen.size());
}

}  // namespace detail

/// Balls are closed: x is covered by c when dist(c, x) <= eps. Centers are
/// taken from the sample itself.
template <class Point, class Dist>
CoveringResult covering_number(const std::vector<Point>& pts, double eps, Dist dist) {
  require(!pts.empty(), Errc::empty_set, "covering number of an empty set");
  require(eps > 0.0, Errc::invalid_inputs, "eps must be positive");
  CoveringResult r;
  r.eps = eps;
  r.farthest_first = detail::farthest_first_net(pts, eps, dist);
  r.cover = r.farthest_first;
  if (pts.size() <= kMaxCoverageLimit) {
    r.max_coverage = detail::max_coverage_net(pts, eps, dist);
    r.cover = std::min(r.cover, r.max_coverage);
  }
  r.packing = detail::greedy_packing(pts, 2.0 * eps, dist);
  return r;
}

inline CoveringResult covering_number(const std::vector<Vector>& pts, double eps) {
  return covering_number(pts, eps, [](const Vector& a, const Vector& b) { return (a - b).norm(); });
}

struct CoveringSweep {
  std::vector<CoveringResult> results;
  /// Least-squares slope of log cover against log(1/eps).
  LinearFit fit;
};

/// `count` geometrically spaced radii from eps_hi down to eps_lo.
template <class Point, class Dist>
CoveringSweep covering_sweep(const std::vector<Point>& pts, double eps_hi, double eps_lo, int count, Dist dist) {
  require(count >= 2 && eps_lo > 0.0 && eps_hi > eps_lo, Errc::invalid_inputs, "bad eps sweep");
  CoveringSweep s;
  std::vector<double> lx, ly;
  for (int k = 0; k < count; ++k) {
    const double eps = eps_hi * std::pow(eps_lo / eps_hi, static_cast<double>(k) / (count - 1));
    s.results.push_back(covering_number(pts, eps, dist));
    lx.push_back(std::log(1.0 / eps));
    ly.push_back(std::log(static_cast<double>(s.results.back().cover)));
  }
  s.fit = least_squares(lx, ly);
  return s;
}

inline CoveringSweep covering_sweep(const std::vector<Vector>& pts, double eps_hi, double eps_lo, int count) {
  return covering_sweep(pts, eps_hi, eps_lo, count, [](const Vector& a, const Vector& b) { return (a - b).norm(); });
}

/// Regular n x n grid on [0, 1]^2, endpoints included.
inline std::vector<Vector> unit_square_grid(int n) {
  require(n >= 2, Errc::invalid_inputs, "grid needs at least 2 points per side");
  std::vector<Vector> pts;
  pts.reserve(static_cast<std::size_t>(n) * static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      Vector v(2);
      v << static_cast<double>(i) / (n - 1), static_cast<double>(j) / (n - 1);
      pts.push_back(v);
    }
  return pts;
}

}  // namespace geobary
