#pragma once

#include <cmath>
#include <limits>
#include <string>

#include "geobary/metric_core.hpp"

namespace geobary {

struct SpiderPoint {
  int ray = 0;
  double radius = 0.0;
};

/// Metric tree made of `rays` half-lines (optionally of finite length) glued
/// at a common origin. A CAT(0) space.
///
/// Tangent directions: at the origin, the index of a ray; elsewhere
/// kInward (towards the origin) or kOutward. Distinct directions are at
/// angle pi.
class SpiderTree {
 public:
  using point_type = SpiderPoint;
  using direction_type = int;

  static constexpr int kInward = -1;
  static constexpr int kOutward = -2;

  explicit SpiderTree(int rays, double ray_length = std::numeric_limits<double>::infinity(),
                      double sample_radius = 2.0)
      : rays_(rays), length_(ray_length), sample_radius_(std::min(sample_radius, ray_length)) {
    require(rays >= 1, Errc::invalid_inputs, "spider needs at least one ray");
    require(ray_length > 0.0, Errc::invalid_inputs, "ray length must be positive");
  }

  SpaceKind kind() const noexcept { return SpaceKind::spider; }
  int dim() const noexcept { return rays_; }
  int rays() const noexcept { return rays_; }
  double ray_length() const noexcept { return length_; }

  void validate(const SpiderPoint& x) const {
    require(x.ray >= 0 && x.ray < rays_, Errc::space_mismatch, "ray index out of range");
    require(x.radius >= 0.0 && x.radius <= length_, Errc::invalid_point, "radius out of range");
  }

  static bool at_origin(const SpiderPoint& x) noexcept { return x.radius == 0.0; }
  static bool same_ray(const SpiderPoint& a, const SpiderPoint& b) noexcept {
    return a.ray == b.ray || at_origin(a) || at_origin(b);
  }

  double distance(const SpiderPoint& a, const SpiderPoint& b) const {
    validate(a);
    validate(b);
    if (same_ray(a, b)) return std::abs(a.radius - b.radius);
    return a.radius + b.radius;
  }

  bool geodesic_unique(const SpiderPoint&, const SpiderPoint&) const noexcept { return true; }
  bool has_selection() const noexcept { return false; }

  SpiderPoint interpolate(const SpiderPoint& a, const SpiderPoint& b, double t) const {
    if (same_ray(a, b)) {
      const int ray = at_origin(a) ? b.ray : a.ray;
      return {ray, (1.0 - t) * a.radius + t * b.radius};
    }
    const double s = t * (a.radius + b.radius);
    if (s <= a.radius) return {a.ray, a.radius - s};
    return {b.ray, s - a.radius};
  }

  TangentVector<SpiderTree> log_map(const SpiderPoint& p, const SpiderPoint& x) const {
    const double d = distance(p, x);
    if (d == 0.0) return {p, 0, 0.0};
    if (at_origin(p)) return {p, x.ray, d};
    const bool outward = (x.ray == p.ray && !at_origin(x) && x.radius > p.radius);
    return {p, outward ? kOutward : kInward, d};
  }

  double cos_angle(const SpiderPoint&, int u, int v) const { return u == v ? 1.0 : -1.0; }

  /// Point at parameter `factor` along a geodesic from p through x, continued
  /// past x. Past the origin the walk continues on the first ray that is
  /// not p's ray.
  SpiderPoint extend(const SpiderPoint& p, const SpiderPoint& x, double factor) const {
    const double d = distance(p, x);
    const double total = factor * d;
    if (d == 0.0) return p;
    const TangentVector<SpiderTree> u = log_map(p, x);
    if (at_origin(p)) return {u.direction, std::min(total, length_)};
    if (u.direction == kOutward) return {p.ray, std::min(p.radius + total, length_)};
    if (total <= p.radius) return {p.ray, p.radius - total};
    const int ray = (!at_origin(x) && x.ray != p.ray) ? x.ray : other_ray(p.ray);
    return {ray, std::min(total - p.radius, length_)};
  }

  /// Largest lambda such that the geodesic p -> x extended by 1 + lambda is
  /// still a shortest path; infinite on unbounded rays.
  double extension_limit(const SpiderPoint& p, const SpiderPoint& x) const {
    const double d = distance(p, x);
    if (d == 0.0 || !std::isfinite(length_)) return std::numeric_limits<double>::infinity();
    const TangentVector<SpiderTree> u = log_map(p, x);
    double room = 0.0;
    if (at_origin(p) || u.direction == kOutward || (!at_origin(x) && x.ray != p.ray))
      room = length_ - x.radius;  // continue outward along x's ray
    else if (rays_ > 1)
      room = x.radius + length_;  // through the origin into another ray
    else
      room = x.radius;
    return room / d;
  }

  SpiderPoint sample(Rng& rng) const {
    const int ray = std::uniform_int_distribution<int>(0, rays_ - 1)(rng);
    return {ray, sample_radius_ * uniform01(rng)};
  }

 private:
  int other_ray(int r) const { return rays_ > 1 ? (r == 0 ? 1 : 0) : r; }

  int rays_;
  double length_;
  double sample_radius_;
};

}  // namespace geobary
