#pragma once

// (k, beta)-convexity of V along sampled paths: t -> V(g(t)) - k L^{2/beta} t^2
// must be convex, L the length d(g(0), g(1)).

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>
#include <vector>

#include "geobary/analysis/variance.hpp"

namespace geobary {

inline constexpr int kStencilPoints = 11;
inline constexpr double kConvexityTol = 1e-8;

struct KConvexityReport {
  int paths = 0;
  int violations = 0;
  /// Most negative second difference seen.
  double worst = std::numeric_limits<double>::infinity();
};

template <class Point>
using PathEnds = std::pair<Point, Point>;

/// Second differences of the corrected profile on the 11-point stencil
/// t = 0, 0.1, ..., 1; each one below -kConvexityTol max(1, |V|) counts as a
/// violation. Grid measures use the linear mixture path.
template <MetricSpace S>
KConvexityReport kconvexity_probe(const S& space, const FunctionalSpec& spec,
                                  const DiscreteMeasure<typename S::point_type>& P,
                                  const std::vector<PathEnds<typename S::point_type>>& paths, double k,
                                  double beta) {
  require(beta > 0.0 && beta <= 1.0, Errc::invalid_inputs, "beta must lie in (0, 1]");
  KConvexityReport rep;
  for (const auto& [a, b] : paths) {
    if (!detail::path_available(space, a, b)) continue;
    ++rep.paths;
    const double L = space.distance(a, b);
    const double scale = k * std::pow(L, 2.0 / beta);
    double h[kStencilPoints];
    double vmax = 0.0;
    for (int j = 0; j < kStencilPoints; ++j) {
      const double t = static_cast<double>(j) / (kStencilPoints - 1);
      const auto x = j == 0 ? a : (j == kStencilPoints - 1 ? b : detail::path_point(space, a, b, t));
      const double v = barycenter_objective(space, spec, P, x).value;
      vmax = std::max(vmax, std::abs(v));
      h[j] = v - scale * t * t;
    }
    for (int j = 1; j + 1 < kStencilPoints; ++j) {
      const double sd = h[j - 1] - 2.0 * h[j] + h[j + 1];
      rep.worst = std::min(rep.worst, sd);
      if (!(sd >= -kConvexityTol * std::max(1.0, vmax))) ++rep.violations;
    }
  }
  return rep;
}

/// Uniformly drawn endpoint pairs.
template <MetricSpace S>
std::vector<PathEnds<typename S::point_type>> random_paths(const S& space, int count, std::uint64_t seed) {
  Rng rng = make_rng(derive_seed(seed, 0x9a7b5));
  std::vector<PathEnds<typename S::point_type>> out;
  for (int i = 0; i < count; ++i) {
    auto a = space.sample(rng);
    auto b = space.sample(rng);
    out.emplace_back(std::move(a), std::move(b));
  }
  return out;
}

/// k/(4 m4) with beta = 1/2 for an f-divergence to a reference measure with
/// fourth moment m4, where k = inf f''/2 over the ratio range.
inline double fdiv_kconvexity_constant(FKind f, double ratio_lo, double ratio_hi, double m4) {
  require(m4 > 0.0, Errc::invalid_inputs, "fourth moment must be positive");
  return 0.5 * f_strong_convexity(f, ratio_lo, ratio_hi) / (4.0 * m4);
}

}  // namespace geobary
