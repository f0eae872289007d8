#pragma once

// Smooth grid densities used by the f-divergence checks: on the midpoints
// (i + 1/2) / N of [0, 1] with reference mass 1/N,
//   g(x) = 1 + sum_k a_k cos(2 pi k x)
// has total mass exactly one, values in [1 - sum|a_k|, 1 + sum|a_k|] and
// Lipschitz constant sum 2 pi k |a_k|.

#include <cmath>
#include <numbers>
#include <vector>

#include "geobary/linalg.hpp"
#include "geobary/random.hpp"

namespace geobary::support {

struct CosineDensity {
  std::vector<double> coeffs;  // a_1, a_2, ...

  double operator()(double x) const {
    double g = 1.0;
    for (std::size_t k = 0; k < coeffs.size(); ++k)
      g += coeffs[k] * std::cos(2.0 * std::numbers::pi * static_cast<double>(k + 1) * x);
    return g;
  }
  double amplitude() const {
    double s = 0.0;
    for (double a : coeffs) s += std::abs(a);
    return s;
  }
  double lipschitz() const {
    double s = 0.0;
    for (std::size_t k = 0; k < coeffs.size(); ++k)
      s += 2.0 * std::numbers::pi * static_cast<double>(k + 1) * std::abs(coeffs[k]);
    return s;
  }
  /// Grid weights g(x_i) / N.
  Vector weights(int n) const {
    Vector w(n);
    for (int i = 0; i < n; ++i) w[i] = (*this)((i + 0.5) / n) / n;
    return w / w.sum();
  }
};

/// Random density with `modes` cosine terms and sum |a_k| <= max_amplitude.
inline CosineDensity random_cosine_density(Rng& rng, int modes, double max_amplitude) {
  CosineDensity d;
  double total = 0.0;
  for (int k = 0; k < modes; ++k) {
    d.coeffs.push_back(2.0 * uniform01(rng) - 1.0);
    total += std::abs(d.coeffs.back());
  }
  const double scale = max_amplitude * uniform01(rng) / std::max(total, 1e-12);
  for (double& a : d.coeffs) a *= scale;
  return d;
}

}  // namespace geobary::support
