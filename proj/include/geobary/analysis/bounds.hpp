#pragma once

// Closed-form rate bounds for the empirical barycenter.

#include <algorithm>
#include <cmath>

#include "geobary/error.hpp"

namespace geobary {

struct BoundInputs {
  double K1 = 1, K2 = 1, K3 = 1;
  double alpha = 1, beta = 1;
  double C = 1, D = 1;
  double n = 1, t = 1;
};

struct Theorem1Constants {
  double c1 = 0, c2 = 0, c3 = 0;
};

inline void validate(const BoundInputs& in) {
  for (double v : {in.K1, in.K2, in.K3, in.C, in.D})
    require(v > 0.0 && std::isfinite(v), Errc::invalid_inputs, "constants must be positive and finite");
  require(in.alpha > 0.0 && in.alpha <= 1.0, Errc::invalid_inputs, "alpha must lie in (0, 1]");
  require(in.beta > 0.0 && in.beta <= 1.0, Errc::invalid_inputs, "beta must lie in (0, 1]");
  require(in.n >= 1.0, Errc::invalid_inputs, "n must be at least 1");
  require(in.t > 0.0 && std::isfinite(in.t), Errc::invalid_inputs, "t must be positive");
}

inline Theorem1Constants theorem1_constants(const BoundInputs& in) {
  validate(in);
  const double k3a = std::pow(in.K3, in.alpha / 2.0);
  return {96.0 * std::pow(in.C, in.alpha / 2.0) * in.K2 * k3a / std::sqrt(in.alpha),
          std::sqrt(2.0) * in.K2 * k3a, 16.0 * in.K1 / 3.0};
}

/// Excess-risk bound holding with probability at least 1 - 2 exp(-t) under
/// the doubling condition:
///   max{(3 c1)^{2e} (D/n)^e, (3 c2)^{2e} (t/n)^e},  e = 1 / (2 - alpha beta).
/// The third term 3 c3 t / n is omitted, so K1 only enters
/// theorem1_constants.
inline double bound_theorem1(const BoundInputs& in) {
  const Theorem1Constants c = theorem1_constants(in);
  const double e = 1.0 / (2.0 - in.alpha * in.beta);
  const double a = std::pow(3.0 * c.c1, 2.0 * e) * std::pow(in.D / in.n, e);
  const double b = std::pow(3.0 * c.c2, 2.0 * e) * std::pow(in.t / in.n, e);
  return std::max(a, b);
}

inline constexpr double kRegimeTol = 1e-12;

enum class RateRegime { low_dimension, critical, high_dimension };

inline RateRegime rate_regime(double D, double alpha) {
  const double gap = D - 2.0 * alpha;
  if (std::abs(gap) <= kRegimeTol * std::max(1.0, 2.0 * alpha)) return RateRegime::critical;
  return gap < 0.0 ? RateRegime::low_dimension : RateRegime::high_dimension;
}

/// v_n under polynomial metric entropy log N(eps) <= (C/eps)^D:
///   n^{-2/(4 - (2 alpha - D) beta)}  if D < 2 alpha,
///   log(n) / sqrt(n)                  if D = 2 alpha,
///   n^{-alpha/D}                      if D > 2 alpha.
inline double bound_theorem2_rate(double D, double alpha, double n, double beta = 1.0) {
  require(D > 0.0 && std::isfinite(D), Errc::invalid_inputs, "D must be positive");
  require(alpha > 0.0 && alpha <= 1.0, Errc::invalid_inputs, "alpha must lie in (0, 1]");
  require(beta > 0.0 && beta <= 1.0, Errc::invalid_inputs, "beta must lie in (0, 1]");
  require(n >= 2.0, Errc::invalid_inputs, "n must be at least 2");
  switch (rate_regime(D, alpha)) {
    case RateRegime::low_dimension:
      return std::pow(n, -2.0 / (4.0 - (2.0 * alpha - D) * beta));
    case RateRegime::critical:
      return std::log(n) / std::sqrt(n);
    case RateRegime::high_dimension:
      break;
  }
  return std::pow(n, -alpha / D);
}

}  // namespace geobary
