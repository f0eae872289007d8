#pragma once

// Curvature-corrected Hilbert identity on spaces of nonnegative curvature:
// d(x, x*)^2 int k dP = int (d(x, y)^2 - d(x*, y)^2) dP with
// k = 1 - (|log x - log y|^2 - d(x, y)^2) / d(x, x*)^2, logs taken at x*.

#include <algorithm>
#include <cmath>
#include <vector>

#include "geobary/metric_core.hpp"
#include "geobary/measure.hpp"

namespace geobary {

inline constexpr double kPcRangeTol = 1e-9;

inline bool is_pc_space(SpaceKind k) {
  switch (k) {
    case SpaceKind::euclidean:
    case SpaceKind::sphere:
    case SpaceKind::gaussian:
    case SpaceKind::wasserstein1d:
      return true;
    default:
      return false;
  }
}

struct PcIdentityReport {
  double max_abs_error = 0.0;
  /// int k dP per probe, NaN for probes equal to x*.
  std::vector<double> k_values;
  std::vector<double> errors;
  /// Probes with int k dP outside [-kPcRangeTol, 1 + kPcRangeTol].
  int out_of_range = 0;
  int skipped = 0;
};

namespace detail {

template <LogMapSpace S>
void require_pc(const S& space) {
  require(is_pc_space(space.kind()), Errc::not_pc_space, "space is not known to have nonnegative curvature");
}

template <LogMapSpace S>
double pc_k(const S& space, const TangentVector<S>& lx, const TangentVector<S>& ly, double dxy) {
  const double dx2 = lx.magnitude * lx.magnitude;
  const double t = tangent_distance(space, lx, ly);
  return 1.0 - (t * t - dxy * dxy) / dx2;
}

}  // namespace detail

/// k^x_{x*}(y) for a single triple; x must differ from x*.
template <LogMapSpace S>
double pc_k_value(const S& space, const typename S::point_type& x_star, const typename S::point_type& x,
                  const typename S::point_type& y) {
  detail::require_pc(space);
  const auto lx = log_map(space, x_star, x);
  require(lx.magnitude > 0.0, Errc::invalid_inputs, "x coincides with x_star");
  return detail::pc_k(space, lx, log_map(space, x_star, y), space.distance(x, y));
}

template <LogMapSpace S>
PcIdentityReport pc_identity_check(const S& space, const DiscreteMeasure<typename S::point_type>& P,
                                   const typename S::point_type& x_star,
                                   const std::vector<typename S::point_type>& probes) {
  detail::require_pc(space);
  std::vector<TangentVector<S>> ly;
  ly.reserve(P.size());
  for (const auto& y : P.atoms()) ly.push_back(log_map(space, x_star, y));

  PcIdentityReport rep;
  for (const auto& x : probes) {
    const auto lx = log_map(space, x_star, x);
    const double dx = space.distance(x, x_star);
    if (lx.magnitude == 0.0 || dx <= kGeomTol) {
      rep.k_values.push_back(std::nan(""));
      rep.errors.push_back(0.0);
      ++rep.skipped;
      continue;
    }
    double kint = 0.0, rhs = 0.0;
    for (std::size_t i = 0; i < P.size(); ++i) {
      const double dxy = space.distance(x, P.atom(i));
      const double dsy = ly[i].magnitude;
      kint += P.weight(i) * detail::pc_k(space, lx, ly[i], dxy);
      rhs += P.weight(i) * (dxy * dxy - dsy * dsy);
    }
    const double err = std::abs(dx * dx * kint - rhs);
    rep.k_values.push_back(kint);
    rep.errors.push_back(err);
    rep.max_abs_error = std::max(rep.max_abs_error, err);
    if (kint < -kPcRangeTol || kint > 1.0 + kPcRangeTol) ++rep.out_of_range;
  }
  return rep;
}

}  // namespace geobary
