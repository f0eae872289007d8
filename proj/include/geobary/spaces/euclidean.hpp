#pragma once

#include <cmath>
#include <limits>
#include <string>

#include "geobary/linalg.hpp"
#include "geobary/metric_core.hpp"

namespace geobary {

/// R^d with the Euclidean norm. Flat: both NPC and PC.
class Euclidean {
 public:
  using point_type = Vector;
  using direction_type = Vector;

  explicit Euclidean(int dim) : dim_(dim) {
    require(dim >= 1, Errc::invalid_inputs, "dimension must be at least 1");
  }

  SpaceKind kind() const noexcept { return SpaceKind::euclidean; }
  int dim() const noexcept { return dim_; }

  void validate(const Vector& x) const {
    require(x.size() == dim_, Errc::space_mismatch, "point has the wrong dimension");
    require(x.allFinite(), Errc::invalid_point, "non-finite coordinate");
  }

  double distance(const Vector& a, const Vector& b) const {
    check_dims(a, b);
    return (a - b).norm();
  }

  bool geodesic_unique(const Vector&, const Vector&) const noexcept { return true; }
  bool has_selection() const noexcept { return false; }

  Vector interpolate(const Vector& a, const Vector& b, double t) const {
    check_dims(a, b);
    return (1.0 - t) * a + t * b;
  }

  TangentVector<Euclidean> log_map(const Vector& p, const Vector& x) const {
    check_dims(p, x);
    const Vector v = x - p;
    const double r = v.norm();
    if (r == 0.0) return {p, Vector::Zero(dim_), 0.0};
    return {p, v / r, r};
  }

  double cos_angle(const Vector&, const Vector& u, const Vector& v) const { return u.dot(v); }

  /// Point at parameter `factor` on the ray from p through x (factor 1 gives x).
  Vector extend(const Vector& p, const Vector& x, double factor) const {
    return p + factor * (x - p);
  }

  /// Largest lambda for which the geodesic p -> x extends by 1 + lambda.
  double extension_limit(const Vector&, const Vector&) const {
    return std::numeric_limits<double>::infinity();
  }

  Vector sample(Rng& rng) const {
    Vector v(dim_);
    for (int i = 0; i < dim_; ++i) v[i] = standard_normal(rng);
    return v;
  }

 private:
  void check_dims(const Vector& a, const Vector& b) const {
    require(a.size() == dim_ && b.size() == dim_, Errc::space_mismatch,
            "points do not belong to R^" + std::to_string(dim_));
  }

  int dim_;
};

}  // namespace geobary
