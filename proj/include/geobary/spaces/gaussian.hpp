#pragma once

// Gaussian location-scatter family under the 2-Wasserstein (Bures) metric.

#include <cmath>
#include <limits>
#include <string>

#include "geobary/linalg.hpp"
#include "geobary/metric_core.hpp"

namespace geobary {

struct GaussianPoint {
  Vector mean;
  Matrix cov;
};

/// Affine map x -> shift + linear * (x - m0) + m0 pushing one Gaussian onto
/// another; `linear` is symmetric positive definite.
struct AffineMap {
  Vector shift;
  Matrix linear;
};

/// Tangent direction at a base Gaussian N(m*, S*): the displacement field
/// x -> shift + linear (x - m*), normalised in L^2(N(m*, S*)).
struct GaussianDirection {
  Vector shift;
  Matrix linear;
};

namespace detail {

inline double gaussian_tangent_inner(const Matrix& base_cov, const Vector& s1, const Matrix& a1,
                                     const Vector& s2, const Matrix& a2) {
  return s1.dot(s2) + (a1 * base_cov * a2).trace();
}

}  // namespace detail

/// Linear part of the optimal transport map between centered Gaussians:
/// S0^{-1/2} (S0^{1/2} S1 S0^{1/2})^{1/2} S0^{-1/2}.
inline Matrix bures_map_matrix(const Matrix& cov0, const Matrix& cov1) {
  const Matrix r0 = sqrtm_psd(cov0);
  const Matrix r0inv = inv_sqrtm_spd(cov0);
  return symmetrize(r0inv * sqrtm_psd(r0 * cov1 * r0) * r0inv);
}

inline AffineMap bures_map(const GaussianPoint& a, const GaussianPoint& b) {
  require(a.mean.size() == b.mean.size(), Errc::space_mismatch, "Gaussians of different dimension");
  check_spd(a.cov, "source covariance");
  check_spd(b.cov, "target covariance");
  return {b.mean - a.mean, bures_map_matrix(a.cov, b.cov)};
}

/// Push a Gaussian through an affine map whose linear part acts around the
/// source mean.
inline GaussianPoint push_forward(const GaussianPoint& a, const AffineMap& t) {
  return {a.mean + t.shift, symmetrize(t.linear * a.cov * t.linear.transpose())};
}

/// W2 between Gaussians. The covariance term
/// tr(S0 + S1 - 2 (S0^{1/2} S1 S0^{1/2})^{1/2}) is evaluated in its Procrustes
/// form min_U ||S0^{1/2} - S1^{1/2} U||_F^2, which is the same quantity
/// written as a sum of squares (no cancellation near coincidence).
inline double bures_distance_squared(const GaussianPoint& a, const GaussianPoint& b) {
  require(a.mean.size() == b.mean.size() && a.cov.rows() == b.cov.rows(), Errc::space_mismatch,
          "Gaussians of different dimension");
  const Matrix r0 = sqrtm_psd(a.cov);
  const Matrix r1 = sqrtm_psd(b.cov);
  Eigen::JacobiSVD<Matrix> svd(r0.transpose() * r1, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Matrix u = svd.matrixV() * svd.matrixU().transpose();
  return (a.mean - b.mean).squaredNorm() + (r0 - r1 * u).squaredNorm();
}

inline double bures_distance(const GaussianPoint& a, const GaussianPoint& b) {
  return std::sqrt(bures_distance_squared(a, b));
}

class GaussianBures {
 public:
  using point_type = GaussianPoint;
  using direction_type = GaussianDirection;

  explicit GaussianBures(int dim) : d_(dim) {
    require(dim >= 1, Errc::invalid_inputs, "dimension must be at least 1");
  }

  SpaceKind kind() const noexcept { return SpaceKind::gaussian; }
  int dim() const noexcept { return d_; }

  static GaussianPoint make(Vector mean, Matrix cov) { return {std::move(mean), std::move(cov)}; }

  void validate(const GaussianPoint& x) const {
    require(x.mean.size() == d_ && x.cov.rows() == d_ && x.cov.cols() == d_, Errc::space_mismatch,
            "Gaussian has the wrong dimension");
    check_spd(x.cov, "covariance");
  }

  double distance(const GaussianPoint& a, const GaussianPoint& b) const {
    check_dims(a, b);
    return bures_distance(a, b);
  }

  bool geodesic_unique(const GaussianPoint&, const GaussianPoint&) const noexcept { return true; }
  bool has_selection() const noexcept { return false; }

  /// McCann interpolation ((1-t) id + t T)_# a.
  GaussianPoint interpolate(const GaussianPoint& a, const GaussianPoint& b, double t) const {
    check_dims(a, b);
    const Matrix m = bures_map_matrix(a.cov, b.cov);
    const Matrix lt = (1.0 - t) * Matrix::Identity(d_, d_) + t * m;
    return {(1.0 - t) * a.mean + t * b.mean, symmetrize(lt * a.cov * lt)};
  }

  TangentVector<GaussianBures> log_map(const GaussianPoint& p, const GaussianPoint& x) const {
    check_dims(p, x);
    const Vector s = x.mean - p.mean;
    const Matrix a = bures_map_matrix(p.cov, x.cov) - Matrix::Identity(d_, d_);
    const double r2 = detail::gaussian_tangent_inner(p.cov, s, a, s, a);
    const double r = std::sqrt(std::max(r2, 0.0));
    if (r == 0.0) return {p, {Vector::Zero(d_), Matrix::Zero(d_, d_)}, 0.0};
    return {p, {s / r, a / r}, r};
  }

  double cos_angle(const GaussianPoint& base, const GaussianDirection& u,
                   const GaussianDirection& v) const {
    return detail::gaussian_tangent_inner(base.cov, u.shift, u.linear, v.shift, v.linear);
  }

  /// Endpoint of the McCann interpolation continued to parameter `factor`.
  /// Only a Gaussian while (1 - factor) I + factor T stays positive definite.
  GaussianPoint extend(const GaussianPoint& p, const GaussianPoint& x, double factor) const {
    return interpolate(p, x, factor);
  }

  /// Largest lambda keeping the extended map (1 + lambda) T - lambda I
  /// monotone: s / (1 - s) for the smallest eigenvalue s of T when s < 1.
  double extension_limit(const GaussianPoint& p, const GaussianPoint& x) const {
    check_dims(p, x);
    const double s = min_eigenvalue(bures_map_matrix(p.cov, x.cov));
    if (s >= 1.0) return std::numeric_limits<double>::infinity();
    return s / (1.0 - s);
  }

  /// Standard normal mean; covariance from a symmetrised Gaussian matrix with
  /// eigenvalue magnitudes floored at 0.1.
  GaussianPoint sample(Rng& rng) const {
    Vector m(d_);
    Matrix g(d_, d_);
    for (int i = 0; i < d_; ++i) m[i] = standard_normal(rng);
    for (int i = 0; i < d_; ++i)
      for (int j = 0; j < d_; ++j) g(i, j) = standard_normal(rng);
    const Matrix cov = spectral_apply(symmetrize(g), [](double x) { return std::max(std::abs(x), 0.1); });
    return {m, cov};
  }

 private:
  void check_dims(const GaussianPoint& a, const GaussianPoint& b) const {
    require(a.mean.size() == d_ && b.mean.size() == d_ && a.cov.rows() == d_ && b.cov.rows() == d_,
            Errc::space_mismatch, "Gaussians do not belong to dimension " + std::to_string(d_));
  }

  int d_;
};

}  // namespace geobary
