#pragma once

// Empirical variance inequalities d(x, x*)^2 <= K3 (V(x) - V(x*))^beta, where
// V(x) = sum_i w_i F(x, y_i).

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <type_traits>
#include <vector>

#include "geobary/barycenter.hpp"
#include "geobary/regression.hpp"

namespace geobary {

inline constexpr double kUsableExcess = 1e-10;
inline constexpr double kViRelTol = 1e-6;
inline constexpr double kViAbsTol = 1e-9;
inline constexpr double kMinBeta = 1e-3;
inline constexpr double kBetaTieTol = 1e-9;

struct ViProbe {
  double d2 = 0.0;
  double excess = 0.0;  // +inf when V(x) is infinite
};

struct VarianceFit {
  double K3_hat = 0.0;
  double beta_hat = 1.0;
  std::vector<ViProbe> probes;
  /// Largest d2 - K3_hat excess^beta_hat over all probes, floored at 0.
  double max_violation = 0.0;
  int violations = 0;
  int usable = 0;
  double min_excess = 0.0;
  double slope = 0.0;  // least squares, unclamped
  double intercept = 0.0;
};

namespace detail {

/// Point at parameter t on the path a -> b: the geodesic where the space has
/// one, the linear mixture of weights on grid measures.
template <MetricSpace S>
typename S::point_type path_point(const S& space, const typename S::point_type& a,
                                  const typename S::point_type& b, double t) {
  if constexpr (GeodesicSpace<S>) {
    return space.interpolate(a, b, t);
  } else {
    static_assert(std::is_same_v<S, GridWasserstein>, "no path family for this space");
    return GridWasserstein::mix(a, b, t);
  }
}

template <MetricSpace S>
bool path_available(const S& space, const typename S::point_type& a, const typename S::point_type& b) {
  if constexpr (GeodesicSpace<S>)
    return space.geodesic_unique(a, b) || space.has_selection();
  else
    return true;
}

inline bool violates(double d2, double excess, double K3, double beta) {
  const double bound = excess > 0.0 ? K3 * std::pow(excess, beta) : 0.0;
  return d2 > bound * (1.0 + kViRelTol) + kViAbsTol;
}

}  // namespace detail

/// Atoms of P, the points at t = 0.25, 0.5, 0.75, 1 on the paths from x* to
/// each atom, then `random` seeded draws from the space.
template <MetricSpace S>
std::vector<typename S::point_type> vi_probes(const S& space, const DiscreteMeasure<typename S::point_type>& P,
                                              const typename S::point_type& x_star, int random = 64,
                                              std::uint64_t seed = 0) {
  std::vector<typename S::point_type> out(P.atoms().begin(), P.atoms().end());
  for (const auto& y : P.atoms()) {
    if (!detail::path_available(space, x_star, y)) continue;
    for (double t : {0.25, 0.5, 0.75, 1.0}) out.push_back(detail::path_point(space, x_star, y, t));
  }
  Rng rng = make_rng(derive_seed(seed, 0x9b0be5));
  for (int i = 0; i < random; ++i) out.push_back(space.sample(rng));
  return out;
}

/// (d(x, x*)^2, V(x) - V(x*)) for every probe.
template <MetricSpace S>
std::vector<ViProbe> vi_evaluate(const S& space, const FunctionalSpec& spec,
                                 const DiscreteMeasure<typename S::point_type>& P,
                                 const typename S::point_type& x_star,
                                 const std::vector<typename S::point_type>& probes) {
  const FunctionalValue v0 = barycenter_objective(space, spec, P, x_star);
  require(!v0.infinite, Errc::invalid_inputs, "objective is infinite at x_star");
  std::vector<ViProbe> out;
  out.reserve(probes.size());
  for (const auto& x : probes) {
    const double d = space.distance(x, x_star);
    const FunctionalValue v = barycenter_objective(space, spec, P, x);
    out.push_back({d * d, v.infinite ? std::numeric_limits<double>::infinity() : v.value - v0.value});
  }
  return out;
}

/// Fit on the probes with excess above kUsableExcess, in log-log
/// coordinates. beta_hat in [kMinBeta, 1] is the slope of the covering line
/// lying lowest on average over the probes, and K3_hat is the smallest
/// constant covering every usable probe with that slope. The ordinary least
/// squares slope and intercept are reported alongside.
inline VarianceFit fit_variance_probes(std::vector<ViProbe> probes) {
  require(!probes.empty(), Errc::degenerate_probes, "no probes");
  VarianceFit fit;
  fit.min_excess = std::numeric_limits<double>::infinity();
  std::vector<double> lx, ly;
  for (const auto& p : probes) {
    fit.min_excess = std::min(fit.min_excess, p.excess);
    if (p.excess > kUsableExcess && std::isfinite(p.excess) && p.d2 > 0.0) {
      lx.push_back(std::log(p.excess));
      ly.push_back(std::log(p.d2));
    }
  }
  fit.usable = static_cast<int>(lx.size());
  require(fit.usable >= 3, Errc::degenerate_probes,
          "need at least 3 probes with positive excess, got " + std::to_string(fit.usable));

  double mx = 0;
  for (double v : lx) mx += v / static_cast<double>(lx.size());
  bool spread = false;
  for (double v : lx) spread = spread || v != lx.front();
  if (spread) {
    const LinearFit ls = least_squares(lx, ly);
    fit.slope = ls.slope;
    fit.intercept = ls.intercept;
  } else {
    fit.slope = 1.0;
    fit.intercept = ly.front() - lx.front();
  }

  // Covering line log K + beta log e: for fixed beta the smallest log K is
  // cover(beta); gap(beta) is its mean height above the probes, convex in beta.
  auto cover = [&](double beta) {
    double logk = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < lx.size(); ++i) logk = std::max(logk, ly[i] - beta * lx[i]);
    return logk;
  };
  auto gap = [&](double beta) { return cover(beta) + beta * mx; };
  double lo = kMinBeta, hi = 1.0;
  const double r = (std::sqrt(5.0) - 1.0) / 2.0;
  for (int it = 0; it < 200 && hi - lo > 1e-14; ++it) {
    const double b1 = hi - r * (hi - lo), b2 = lo + r * (hi - lo);
    if (gap(b1) < gap(b2))
      hi = b2;
    else
      lo = b1;
  }
  double beta = 0.5 * (lo + hi);
  // Excess values near kUsableExcess carry relative roundoff far above
  // machine precision, so ties within kBetaTieTol go to the endpoints.
  const double best = gap(beta), slack = kBetaTieTol * std::max(1.0, std::abs(best));
  if (gap(1.0) <= best + slack)
    beta = 1.0;
  else if (gap(kMinBeta) <= best + slack)
    beta = kMinBeta;
  fit.beta_hat = beta;
  const double logk = cover(beta);
  fit.K3_hat = std::exp(logk);

  for (const auto& p : probes) {
    if (!std::isfinite(p.excess)) continue;
    const double bound = p.excess > 0.0 ? fit.K3_hat * std::pow(p.excess, fit.beta_hat) : 0.0;
    fit.max_violation = std::max(fit.max_violation, p.d2 - bound);
    if (detail::violates(p.d2, p.excess, fit.K3_hat, fit.beta_hat)) ++fit.violations;
  }
  fit.probes = std::move(probes);
  return fit;
}

template <MetricSpace S>
VarianceFit fit_variance_inequality(const S& space, const FunctionalSpec& spec,
                                    const DiscreteMeasure<typename S::point_type>& P,
                                    const typename S::point_type& x_star,
                                    const std::vector<typename S::point_type>& probes) {
  return fit_variance_probes(vi_evaluate(space, spec, P, x_star, probes));
}

/// Probes breaking d2 <= K3 excess^beta (relative slack kViRelTol plus
/// kViAbsTol).
inline int count_vi_violations(const std::vector<ViProbe>& probes, double K3, double beta) {
  int v = 0;
  for (const auto& p : probes)
    if (std::isfinite(p.excess) && detail::violates(p.d2, p.excess, K3, beta)) ++v;
  return v;
}

}  // namespace geobary
