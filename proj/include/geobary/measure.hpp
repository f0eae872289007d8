#pragma once

#include <cmath>
#include <cstddef>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "geobary/error.hpp"

namespace geobary {

inline constexpr double kSimplexTol = 1e-12;

/// Finitely supported probability measure: atoms with nonnegative weights
/// summing to one.
template <class Point>
class DiscreteMeasure {
 public:
  DiscreteMeasure() = default;

  DiscreteMeasure(std::vector<Point> atoms, std::vector<double> weights)
      : atoms_(std::move(atoms)), weights_(std::move(weights)) {
    require(!atoms_.empty(), Errc::invalid_inputs, "measure has no atoms");
    require(atoms_.size() == weights_.size(), Errc::invalid_inputs,
            "atom and weight counts differ");
    double total = 0.0;
    for (double w : weights_) {
      require(w >= 0.0 && std::isfinite(w), Errc::invalid_inputs, "negative or non-finite weight");
      total += w;
    }
    require(std::abs(total - 1.0) <= 1e-9, Errc::invalid_inputs,
            "weights sum to " + std::to_string(total));
  }

  static DiscreteMeasure uniform(std::vector<Point> atoms) {
    const std::size_t n = atoms.size();
    require(n > 0, Errc::invalid_inputs, "measure has no atoms");
    return DiscreteMeasure(std::move(atoms), std::vector<double>(n, 1.0 / static_cast<double>(n)));
  }

  static DiscreteMeasure dirac(Point x) { return DiscreteMeasure({std::move(x)}, {1.0}); }

  std::size_t size() const noexcept { return atoms_.size(); }
  const std::vector<Point>& atoms() const noexcept { return atoms_; }
  const std::vector<double>& weights() const noexcept { return weights_; }
  const Point& atom(std::size_t i) const { return atoms_[i]; }
  double weight(std::size_t i) const { return weights_[i]; }

 private:
  std::vector<Point> atoms_;
  std::vector<double> weights_;
};

}  // namespace geobary
