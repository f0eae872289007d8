#pragma once

#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "geobary/linalg.hpp"
#include "geobary/metric_core.hpp"

namespace geobary {

enum class CutLocusPolicy { strict, canonical };

/// Unit sphere S^{n-1} in R^n with the angular metric. Curvature 1, hence PC.
///
/// Antipodal pairs are joined by infinitely many geodesics. Under the
/// canonical policy the selected one leaves p towards the first standard basis
/// vector not parallel to p, orthogonalised against p.
class Sphere {
 public:
  using point_type = Vector;
  using direction_type = Vector;

  static constexpr double kUnitTol = 1e-12;
  static constexpr double kAntipodalTol = 1e-12;

  explicit Sphere(int ambient_dim, CutLocusPolicy policy = CutLocusPolicy::canonical)
      : n_(ambient_dim), policy_(policy) {
    require(ambient_dim >= 2, Errc::invalid_inputs, "sphere needs ambient dimension >= 2");
  }

  SpaceKind kind() const noexcept { return SpaceKind::sphere; }
  int dim() const noexcept { return n_; }
  CutLocusPolicy policy() const noexcept { return policy_; }

  void validate(const Vector& x) const {
    require(x.size() == n_, Errc::space_mismatch, "point has the wrong dimension");
    require(std::abs(x.norm() - 1.0) <= kUnitTol, Errc::invalid_point, "point is not a unit vector");
  }

  /// Point from colatitude/longitude (S^2 only).
  static Vector from_spherical(double colatitude, double longitude) {
    Vector v(3);
    v << std::sin(colatitude) * std::cos(longitude), std::sin(colatitude) * std::sin(longitude),
        std::cos(colatitude);
    return v;
  }

  double distance(const Vector& a, const Vector& b) const {
    check_dims(a, b);
    return 2.0 * std::atan2((a - b).norm(), (a + b).norm());
  }

  bool geodesic_unique(const Vector& a, const Vector& b) const {
    check_dims(a, b);
    return (a + b).norm() > kAntipodalTol;
  }
  bool has_selection() const noexcept { return policy_ == CutLocusPolicy::canonical; }

  Vector interpolate(const Vector& a, const Vector& b, double t) const {
    const TangentVector<Sphere> u = log_map(a, b);
    return exp_map(a, u.direction, t * u.magnitude);
  }

  /// exp_p(r * dir) for a unit tangent direction at p.
  Vector exp_map(const Vector& p, const Vector& dir, double r) const {
    if (r == 0.0) return p;
    Vector x = std::cos(r) * p + std::sin(r) * dir;
    return x / x.norm();
  }

  TangentVector<Sphere> log_map(const Vector& p, const Vector& x) const {
    check_dims(p, x);
    const double theta = distance(p, x);
    if (theta == 0.0) return {p, Vector::Zero(n_), 0.0};
    if (!geodesic_unique(p, x)) {
      require(has_selection(), Errc::cut_locus_ambiguity, "antipodal point without a selection rule");
      return {p, canonical_direction(p), theta};
    }
    Vector v = x - p.dot(x) * p;
    const double vn = v.norm();
    if (vn == 0.0) return {p, canonical_direction(p), theta};
    return {p, v / vn, theta};
  }

  double cos_angle(const Vector&, const Vector& u, const Vector& v) const { return u.dot(v); }

  /// Tangent gradient bookkeeping helper: project an ambient vector onto T_p.
  static Vector project_tangent(const Vector& p, const Vector& v) { return v - p.dot(v) * p; }

  Vector extend(const Vector& p, const Vector& x, double factor) const {
    const TangentVector<Sphere> u = log_map(p, x);
    return exp_map(p, u.direction, factor * u.magnitude);
  }

  /// A great-circle arc stays minimizing up to length pi.
  double extension_limit(const Vector& p, const Vector& x) const {
    require(geodesic_unique(p, x), Errc::non_unique_geodesic, "antipodal endpoints");
    const double d = distance(p, x);
    if (d == 0.0) return std::numeric_limits<double>::infinity();
    return std::numbers::pi / d - 1.0;
  }

  Vector sample(Rng& rng) const {
    Vector v(n_);
    do {
      for (int i = 0; i < n_; ++i) v[i] = standard_normal(rng);
    } while (v.norm() < 1e-8);
    return v / v.norm();
  }

  Vector canonical_direction(const Vector& p) const {
    for (int i = 0; i < n_; ++i) {
      Vector e = Vector::Unit(n_, i);
      Vector v = e - p.dot(e) * p;
      if (v.norm() > 1e-6) return v / v.norm();
    }
    fail(Errc::invalid_point, "no canonical direction");
  }

 private:
  void check_dims(const Vector& a, const Vector& b) const {
    require(a.size() == n_ && b.size() == n_, Errc::space_mismatch,
            "points do not belong to S^" + std::to_string(n_ - 1));
  }

  int n_;
  CutLocusPolicy policy_;
};

}  // namespace geobary
