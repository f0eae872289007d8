#pragma once

// Extendable geodesics from a barycenter and the variance inequality with
// K3 = (1 + lambda) / lambda they imply.

#include <cmath>
#include <limits>
#include <vector>

#include <Eigen/Cholesky>

#include "geobary/analysis/variance.hpp"
#include "geobary/barycenter.hpp"

namespace geobary {

/// Largest lambda for which the geodesic x_star -> y prolonged to parameter
/// 1 + lambda is still minimising (sphere, spider) or still a transport map
/// (Gaussians).
template <GeodesicSpace S>
double extension_limit(const S& space, const typename S::point_type& x_star, const typename S::point_type& y) {
  space.validate(x_star);
  space.validate(y);
  require(space.geodesic_unique(x_star, y), Errc::non_unique_geodesic, "geodesic to y is not unique");
  return space.extension_limit(x_star, y);
}

/// Direct check of the Gaussian rule: bisection on the largest lambda with
/// (1 + lambda) T - lambda I positive definite, T the optimal map matrix.
inline double bures_extension_limit_bisection(const GaussianPoint& p, const GaussianPoint& x,
                                              double tol = 1e-12) {
  const Matrix T = bures_map_matrix(p.cov, x.cov);
  const Matrix I = Matrix::Identity(T.rows(), T.cols());
  auto monotone = [&](double lam) {
    Eigen::LLT<Matrix> llt((1.0 + lam) * T - lam * I);
    return llt.info() == Eigen::Success;
  };
  double lo = 0.0, hi = 1.0;
  while (monotone(hi)) {
    lo = hi;
    hi *= 2.0;
    if (hi > 1e12) return std::numeric_limits<double>::infinity();
  }
  while (hi - lo > tol * std::max(1.0, lo)) {
    const double mid = 0.5 * (lo + hi);
    (monotone(mid) ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

template <MetricSpace S>
struct ExtensionReport {
  double lambda = 0.0;
  double K3 = 0.0;
  /// Smallest extension limit over the atoms of P with positive weight.
  double min_limit = 0.0;
  DiscreteMeasure<typename S::point_type> P_lambda;
  BarycenterResult<S> solved;
  /// F_lambda(x_star) minus the best objective found for P_lambda.
  double hypothesis_gap = 0.0;
  bool hypothesis_two = false;
  std::vector<ViProbe> probes;
  int violations = 0;
  /// Largest d2 / excess over probes with positive excess.
  double max_ratio = 0.0;

  bool passed() const { return hypothesis_two && violations == 0; }
};

/// Pushes P forward along the extended geodesics from x_star, re-solves, and
/// checks that x_star is still a barycenter within `tol` (hypothesis two).
/// The variance inequality with K3 = (1 + lambda) / lambda is then checked at
/// every probe. A failed hypothesis is reported in the result, not thrown.
template <GeodesicSpace S>
ExtensionReport<S> extension_vi_check(const S& space, const DiscreteMeasure<typename S::point_type>& P,
                                      const typename S::point_type& x_star, double lambda,
                                      const std::vector<typename S::point_type>& probes, double tol = 1e-8,
                                      const SolverOptions& opt = {}) {
  require(lambda > 0.0 && std::isfinite(lambda), Errc::invalid_inputs, "lambda must be positive");
  ExtensionReport<S> rep;
  rep.lambda = lambda;
  rep.K3 = (1.0 + lambda) / lambda;
  rep.min_limit = std::numeric_limits<double>::infinity();
  std::vector<typename S::point_type> ext;
  for (std::size_t i = 0; i < P.size(); ++i) {
    const auto& y = P.atom(i);
    const double lim = extension_limit(space, x_star, y);
    if (P.weight(i) > 0.0) rep.min_limit = std::min(rep.min_limit, lim);
    require(P.weight(i) == 0.0 || lim >= lambda * (1.0 - 1e-12), Errc::invalid_inputs,
            "an atom does not admit extension by lambda = " + std::to_string(lambda));
    ext.push_back(space.extend(x_star, y, 1.0 + lambda));
  }
  rep.P_lambda = DiscreteMeasure<typename S::point_type>(std::move(ext), P.weights());
  rep.solved = solve_barycenter(space, rep.P_lambda, opt);
  rep.hypothesis_gap = frechet_objective(space, rep.P_lambda, x_star) - rep.solved.objective;
  rep.hypothesis_two = rep.hypothesis_gap <= tol;

  rep.probes = vi_evaluate(space, FunctionalSpec::squared_distance(), P, x_star, probes);
  rep.violations = count_vi_violations(rep.probes, rep.K3, 1.0);
  for (const auto& p : rep.probes)
    if (p.excess > kUsableExcess) rep.max_ratio = std::max(rep.max_ratio, p.d2 / p.excess);
  return rep;
}

}  // namespace geobary
