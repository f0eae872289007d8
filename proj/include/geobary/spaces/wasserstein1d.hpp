#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "geobary/linalg.hpp"
#include "geobary/metric_core.hpp"

namespace geobary {

/// W2 on the real line, each measure stored as its quantile function sampled
/// at the K midpoint levels (i + 1/2) / K. The representation is an isometric
/// copy of a convex cone in (R^K, ||.||^2 / K), so the space is flat.
class Wasserstein1D {
 public:
  using point_type = Vector;
  using direction_type = Vector;

  explicit Wasserstein1D(int levels) : k_(levels) {
    require(levels >= 1, Errc::invalid_inputs, "quantile grid needs at least one level");
  }

  SpaceKind kind() const noexcept { return SpaceKind::wasserstein1d; }
  int dim() const noexcept { return k_; }
  int levels() const noexcept { return k_; }

  static Vector dirac(int levels, double x) { return Vector::Constant(levels, x); }

  void validate(const Vector& q) const {
    require(q.size() == k_, Errc::grid_mismatch, "quantile grid has the wrong size");
    for (int i = 1; i < k_; ++i)
      require(q[i] >= q[i - 1], Errc::invalid_point, "quantile grid is not nondecreasing");
  }

  double distance(const Vector& a, const Vector& b) const {
    check_dims(a, b);
    return (a - b).norm() / std::sqrt(static_cast<double>(k_));
  }

  bool geodesic_unique(const Vector&, const Vector&) const noexcept { return true; }
  bool has_selection() const noexcept { return false; }

  Vector interpolate(const Vector& a, const Vector& b, double t) const {
    check_dims(a, b);
    return (1.0 - t) * a + t * b;
  }

  TangentVector<Wasserstein1D> log_map(const Vector& p, const Vector& x) const {
    check_dims(p, x);
    const double r = distance(p, x);
    if (r == 0.0) return {p, Vector::Zero(k_), 0.0};
    return {p, (x - p) / r, r};
  }

  double cos_angle(const Vector&, const Vector& u, const Vector& v) const {
    return u.dot(v) / static_cast<double>(k_);
  }

  Vector extend(const Vector& p, const Vector& x, double factor) const {
    return p + factor * (x - p);
  }

  /// The extended quantile function must stay nondecreasing.
  double extension_limit(const Vector& p, const Vector& x) const {
    check_dims(p, x);
    double lam = std::numeric_limits<double>::infinity();
    for (int i = 1; i < k_; ++i) {
      const double dx = x[i] - x[i - 1];  // slope of the endpoint
      const double dp = p[i] - p[i - 1];
      // (1 + l) dx - l dp >= 0  <=>  l (dp - dx) <= dx
      if (dp > dx) lam = std::min(lam, dx / (dp - dx));
    }
    return lam;
  }

  Vector sample(Rng& rng) const {
    Vector q(k_);
    const double loc = standard_normal(rng);
    for (int i = 0; i < k_; ++i) q[i] = loc + standard_normal(rng);
    std::sort(q.data(), q.data() + k_);
    return q;
  }

 private:
  void check_dims(const Vector& a, const Vector& b) const {
    require(a.size() == k_ && b.size() == k_, Errc::grid_mismatch,
            "quantile grids differ from K = " + std::to_string(k_));
  }

  int k_;
};

}  // namespace geobary
