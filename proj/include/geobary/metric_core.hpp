#pragma once

// Space-agnostic geometry: the metric/geodesic/log-map interface every space
// implements, comparison angles in the model planes, tangent-cone inner
// products and randomized curvature diagnostics.

#include <algorithm>
#include <cmath>
#include <concepts>
#include <cstdint>
#include <limits>
#include <numbers>
#include <string>
#include <utility>

#include "geobary/error.hpp"
#include "geobary/random.hpp"

namespace geobary {

enum class SpaceKind { euclidean, sphere, spider, gaussian, wasserstein1d, grid_wasserstein };

inline constexpr double kGeomTol = 1e-9;

template <class S>
struct TangentVector;

template <class S>
concept MetricSpace = requires(const S& s, const typename S::point_type& p, Rng& rng) {
  typename S::point_type;
  { s.kind() } -> std::same_as<SpaceKind>;
  { s.distance(p, p) } -> std::convertible_to<double>;
  { s.sample(rng) } -> std::same_as<typename S::point_type>;
  s.validate(p);
};

/// Spaces with constant-speed geodesics. `geodesic_unique` is false on the cut
/// locus; `has_selection` tells whether interpolate/log_map then fall back to a
/// deterministic choice instead of throwing.
template <class S>
concept GeodesicSpace = MetricSpace<S> && requires(const S& s, const typename S::point_type& p) {
  { s.interpolate(p, p, 0.5) } -> std::same_as<typename S::point_type>;
  { s.geodesic_unique(p, p) } -> std::same_as<bool>;
  { s.has_selection() } -> std::same_as<bool>;
};

template <class S>
concept LogMapSpace = GeodesicSpace<S> && requires(const S& s, const typename S::point_type& p,
                                                   const typename S::direction_type& d) {
  { s.log_map(p, p) } -> std::same_as<TangentVector<S>>;
  { s.cos_angle(p, d, d) } -> std::convertible_to<double>;
};

/// Element (direction, magnitude) of the tangent cone at `base`. A zero
/// magnitude is the cone tip and its direction is irrelevant.
template <class S>
struct TangentVector {
  typename S::point_type base;
  typename S::direction_type direction;
  double magnitude = 0.0;
};

/// Constant-speed geodesic between two endpoints, parametrised on [0, 1].
template <GeodesicSpace S>
class GeodesicView {
 public:
  using point_type = typename S::point_type;

  GeodesicView(S space, point_type a, point_type b, bool selected)
      : space_(std::move(space)), a_(std::move(a)), b_(std::move(b)), selected_(selected) {
    length_ = space_.distance(a_, b_);
  }

  point_type eval(double t) const {
    if (t == 0.0) return a_;
    if (t == 1.0) return b_;
    return space_.interpolate(a_, b_, t);
  }
  const point_type& front() const noexcept { return a_; }
  const point_type& back() const noexcept { return b_; }
  double length() const noexcept { return length_; }
  /// True when the endpoints are joined by several geodesics and the space's
  /// selection rule picked this one.
  bool selected() const noexcept { return selected_; }

 private:
  S space_;
  point_type a_, b_;
  double length_ = 0.0;
  bool selected_ = false;
};

template <MetricSpace S>
double distance(const S& space, const typename S::point_type& a, const typename S::point_type& b) {
  return space.distance(a, b);
}

template <GeodesicSpace S>
GeodesicView<S> geodesic(const S& space, const typename S::point_type& a,
                         const typename S::point_type& b) {
  space.validate(a);
  space.validate(b);
  const bool unique = space.geodesic_unique(a, b);
  if (!unique && !space.has_selection())
    fail(Errc::non_unique_geodesic, "endpoints are joined by more than one geodesic");
  return GeodesicView<S>(space, a, b, !unique);
}

template <LogMapSpace S>
TangentVector<S> log_map(const S& space, const typename S::point_type& p,
                         const typename S::point_type& x) {
  if (!space.geodesic_unique(p, x) && !space.has_selection())
    fail(Errc::cut_locus_ambiguity, "point lies in the cut locus and no selection is configured");
  return space.log_map(p, x);
}

template <LogMapSpace S>
double tangent_cos(const S& space, const TangentVector<S>& u, const TangentVector<S>& v) {
  require(space.distance(u.base, v.base) <= kGeomTol, Errc::base_mismatch,
          "tangent vectors live at different base points");
  if (u.magnitude == 0.0 || v.magnitude == 0.0) return 1.0;
  return std::clamp(static_cast<double>(space.cos_angle(u.base, u.direction, v.direction)), -1.0, 1.0);
}

/// Cone inner product s t cos(angle).
template <LogMapSpace S>
double tangent_inner(const S& space, const TangentVector<S>& u, const TangentVector<S>& v) {
  if (u.magnitude == 0.0 || v.magnitude == 0.0) {
    require(space.distance(u.base, v.base) <= kGeomTol, Errc::base_mismatch,
            "tangent vectors live at different base points");
    return 0.0;
  }
  return u.magnitude * v.magnitude * tangent_cos(space, u, v);
}

/// Cone distance ||u - v||_p.
template <LogMapSpace S>
double tangent_distance(const S& space, const TangentVector<S>& u, const TangentVector<S>& v) {
  const double sq = u.magnitude * u.magnitude + v.magnitude * v.magnitude -
                    2.0 * tangent_inner(space, u, v);
  return std::sqrt(std::max(sq, 0.0));
}

// ---------------------------------------------------------------------------
// Comparison angles

/// Half the perimeter bound of the model plane of curvature kappa.
inline double model_diameter(double kappa) {
  return kappa > 0.0 ? std::numbers::pi / std::sqrt(kappa)
                     : std::numeric_limits<double>::infinity();
}

namespace detail {

// Angle opposite side c in a Euclidean triangle with sides a, b adjacent to it.
// Kahan's needle-safe half-angle form.
inline double euclidean_angle(double a, double b, double c) {
  if (a < b) std::swap(a, b);
  double mu = 0.0;
  if (b >= c)
    mu = c - (a - b);
  else
    mu = b - (a - c);
  const double num = std::max(((a - b) + c) * mu, 0.0);
  const double den = std::max((a + (b + c)) * ((a - c) + b), 0.0);
  return 2.0 * std::atan2(std::sqrt(num), std::sqrt(den));
}

inline double model_sin(double kappa, double r) {
  if (kappa > 0.0) return std::sin(r * std::sqrt(kappa)) / std::sqrt(kappa);
  return std::sinh(r * std::sqrt(-kappa)) / std::sqrt(-kappa);
}

inline double model_cos(double kappa, double r) {
  if (kappa > 0.0) return std::cos(r * std::sqrt(kappa));
  return std::cosh(r * std::sqrt(-kappa));
}

}  // namespace detail

/// Angle at p of the comparison triangle with |px| = a, |py| = b, |xy| = c in
/// the model plane of curvature kappa.
inline double comparison_angle_from_sides(double kappa, double a, double b, double c) {
  require(a > 0.0 && b > 0.0, Errc::degenerate_triangle, "vertex coincides with an endpoint");
  require(a + b + c < 2.0 * model_diameter(kappa), Errc::perimeter_too_large,
          "perimeter exceeds the model-plane bound");
  if (kappa == 0.0) return detail::euclidean_angle(a, b, c);
  const double num = detail::model_cos(kappa, c) - detail::model_cos(kappa, a) * detail::model_cos(kappa, b);
  const double den = kappa * detail::model_sin(kappa, a) * detail::model_sin(kappa, b);
  return std::acos(std::clamp(num / den, -1.0, 1.0));
}

template <MetricSpace S>
double comparison_angle(double kappa, const S& space, const typename S::point_type& p,
                        const typename S::point_type& x, const typename S::point_type& y) {
  return comparison_angle_from_sides(kappa, space.distance(p, x), space.distance(p, y),
                                     space.distance(x, y));
}

// ---------------------------------------------------------------------------
// Curvature diagnostics

enum class CurvatureTarget { npc, pc };

struct CurvatureReport {
  int samples = 0;
  int violations = 0;
  /// Smallest signed slack seen (negative means a breach).
  double worst_margin = std::numeric_limits<double>::infinity();
  int triangle_checks = 0;
  int quadruple_checks = 0;
};

inline constexpr double kCurvatureTol = 1e-8;

/// Randomized test of the sign of the curvature. Triangle test: compares
/// d(p, g(t))^2 with (1-t)d(p,x)^2 + t d(p,y)^2 - t(1-t)d(x,y)^2 along the
/// geodesic g from x to y. For PC the angle-sum test over quadruples
/// (three comparison angles at p sum to at most 2 pi) also runs, and is the
/// only test for spaces without geodesics.
template <MetricSpace S>
CurvatureReport check_curvature_sign(const S& space, CurvatureTarget target, int samples,
                                     std::uint64_t seed) {
  require(samples >= 1, Errc::invalid_inputs, "samples must be positive");
  constexpr bool has_geodesics = GeodesicSpace<S>;
  if (target == CurvatureTarget::npc && !has_geodesics)
    fail(Errc::unsupported_target, "NPC check needs geodesics in this space");

  CurvatureReport rep;
  rep.samples = samples;
  auto record = [&](double margin, double scale) {
    rep.worst_margin = std::min(rep.worst_margin, margin);
    if (margin < -kCurvatureTol * std::max(1.0, scale)) ++rep.violations;
  };

  for (int i = 0; i < samples; ++i) {
    Rng rng = make_rng(derive_seed(seed, static_cast<std::uint64_t>(i)));
    const auto p = space.sample(rng);
    const auto x = space.sample(rng);
    const auto y = space.sample(rng);
    const double t = uniform01(rng);
    const auto z = space.sample(rng);

    if constexpr (has_geodesics) {
      if (space.geodesic_unique(x, y)) {
        const double dpx = space.distance(p, x), dpy = space.distance(p, y),
                     dxy = space.distance(x, y);
        const double dpg = space.distance(p, space.interpolate(x, y, t));
        const double lhs = dpg * dpg;
        const double rhs = (1 - t) * dpx * dpx + t * dpy * dpy - t * (1 - t) * dxy * dxy;
        const double margin = target == CurvatureTarget::npc ? rhs - lhs : lhs - rhs;
        record(margin, std::max({dpx * dpx, dpy * dpy, dxy * dxy}));
        ++rep.triangle_checks;
      }
    }
    if (target == CurvatureTarget::pc) {
      const double dpx = space.distance(p, x), dpy = space.distance(p, y), dpz = space.distance(p, z);
      const double dxy = space.distance(x, y), dyz = space.distance(y, z), dzx = space.distance(z, x);
      if (std::min({dpx, dpy, dpz, dxy, dyz, dzx}) < kGeomTol) continue;
      const double sum = comparison_angle_from_sides(0.0, dpx, dpy, dxy) +
                         comparison_angle_from_sides(0.0, dpy, dpz, dyz) +
                         comparison_angle_from_sides(0.0, dpz, dpx, dzx);
      record(2.0 * std::numbers::pi - sum, 1.0);
      ++rep.quadruple_checks;
    }
  }
  return rep;
}

}  // namespace geobary
