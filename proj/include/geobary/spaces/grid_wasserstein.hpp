#pragma once

#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "geobary/linalg.hpp"
#include "geobary/metric_core.hpp"
#include "geobary/spaces/transport.hpp"

namespace geobary {

/// Probability vectors over a fixed set of distinct atoms in R^d, with the
/// exact 2-Wasserstein distance. A metric subspace of P_2(R^d), so it inherits
/// the quadruple comparison (PC) but has no geodesics of its own; the only
/// path offered is the linear (mixture) interpolation.
class GridWasserstein {
 public:
  using point_type = Vector;  // weights

  explicit GridWasserstein(std::vector<Vector> atoms, int exact_cap = kDefaultExactCap)
      : atoms_(std::move(atoms)), cap_(exact_cap) {
    require(!atoms_.empty(), Errc::invalid_inputs, "grid has no atoms");
    const auto d = atoms_.front().size();
    const auto n = static_cast<int>(atoms_.size());
    for (const auto& x : atoms_)
      require(x.size() == d, Errc::invalid_inputs, "grid atoms of mixed dimension");
    cost_ = Matrix::Zero(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        cost_(i, j) = (atoms_[static_cast<std::size_t>(i)] - atoms_[static_cast<std::size_t>(j)]).squaredNorm();
        if (i != j) require(cost_(i, j) > 0.0, Errc::invalid_inputs, "grid atoms are not distinct");
      }
  }

  /// Atoms on the real line.
  static GridWasserstein line(const std::vector<double>& xs, int exact_cap = kDefaultExactCap) {
    std::vector<Vector> atoms;
    for (double x : xs) atoms.push_back(Vector::Constant(1, x));
    return GridWasserstein(std::move(atoms), exact_cap);
  }

  /// n evenly spaced atoms at the cell midpoints (i + 1/2) / n of [0, 1].
  static GridWasserstein unit_interval(int n, int exact_cap = kDefaultExactCap) {
    std::vector<double> xs;
    for (int i = 0; i < n; ++i) xs.push_back((i + 0.5) / n);
    return line(xs, exact_cap);
  }

  SpaceKind kind() const noexcept { return SpaceKind::grid_wasserstein; }
  int dim() const noexcept { return static_cast<int>(atoms_.size()); }
  int size() const noexcept { return static_cast<int>(atoms_.size()); }
  const std::vector<Vector>& atoms() const noexcept { return atoms_; }
  const Matrix& cost() const noexcept { return cost_; }
  int exact_cap() const noexcept { return cap_; }

  double diameter() const { return std::sqrt(cost_.maxCoeff()); }

  void validate(const Vector& w) const {
    require(w.size() == size(), Errc::grid_mismatch, "weight vector does not match the grid");
    require(w.minCoeff() >= 0.0, Errc::invalid_point, "negative weight");
    require(std::abs(w.sum() - 1.0) <= 1e-12, Errc::invalid_point, "weights do not sum to one");
  }

  TransportResult transport(const Vector& mu, const Vector& nu) const {
    require(mu.size() == size() && nu.size() == size(), Errc::grid_mismatch,
            "measures do not live on this grid");
    return solve_transport(mu, nu, cost_, cap_);
  }

  double distance(const Vector& mu, const Vector& nu) const {
    return std::sqrt(std::max(transport(mu, nu).cost, 0.0));
  }

  Vector dirac(int i) const { return Vector::Unit(size(), i); }

  static Vector mix(const Vector& a, const Vector& b, double t) { return (1.0 - t) * a + t * b; }

  /// Flat Dirichlet draw.
  Vector sample(Rng& rng) const {
    Vector w(size());
    for (int i = 0; i < size(); ++i)
      w[i] = std::exponential_distribution<double>(1.0)(rng) + 1e-300;
    return w / w.sum();
  }

 private:
  std::vector<Vector> atoms_;
  Matrix cost_;
  int cap_;
};

/// Exact squared W2 between grid measures with its optimal plan.
inline TransportResult grid_w2(const GridWasserstein& grid, const Vector& mu, const Vector& nu) {
  return grid.transport(mu, nu);
}

}  // namespace geobary
