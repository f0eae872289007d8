#pragma once

// Objective functionals F(x, y) and calculators for their regularity
// constants: the uniform bound K1, the Hoelder constant (K2, alpha) and the
// convexity constants behind the variance inequality.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <numbers>
#include <optional>
#include <string>
#include <type_traits>
#include <utility>
#include <vector>

#include "geobary/linalg.hpp"
#include "geobary/metric_core.hpp"
#include "geobary/sinkhorn.hpp"
#include "geobary/spaces/grid_wasserstein.hpp"

namespace geobary {

// ---------------------------------------------------------------------------
// f-divergences

enum class FKind { kl, chi_squared, total_variation };

inline std::string fkind_name(FKind k) {
  switch (k) {
    case FKind::kl: return "kl";
    case FKind::chi_squared: return "chi2";
    case FKind::total_variation: return "tv";
  }
  return "?";
}

/// f(x) for x >= 0, normalised so that f(1) = 0.
inline double f_value(FKind k, double x) {
  switch (k) {
    case FKind::kl: return x > 0.0 ? x * std::log(x) : 0.0;
    case FKind::chi_squared: return (x - 1.0) * (x - 1.0);
    case FKind::total_variation: return 0.5 * std::abs(x - 1.0);
  }
  return 0.0;
}

/// f'(x); the total-variation kink at 1 takes the value 0.
inline double f_prime(FKind k, double x) {
  switch (k) {
    case FKind::kl: return x > 0.0 ? std::log(x) + 1.0 : -std::numeric_limits<double>::infinity();
    case FKind::chi_squared: return 2.0 * (x - 1.0);
    case FKind::total_variation: return x > 1.0 ? 0.5 : (x < 1.0 ? -0.5 : 0.0);
  }
  return 0.0;
}

/// Lipschitz constant of f' on [lo, hi]; infinite when f' is discontinuous.
inline double f_prime_lipschitz(FKind k, double lo, double hi) {
  require(0.0 < lo && lo <= hi, Errc::invalid_bounds, "need 0 < lo <= hi");
  switch (k) {
    case FKind::kl: return 1.0 / lo;
    case FKind::chi_squared: return 2.0;
    case FKind::total_variation:
      return (lo < 1.0 && hi > 1.0) ? std::numeric_limits<double>::infinity() : 0.0;
  }
  return 0.0;
}

/// Largest k with f'' >= k everywhere on [lo, hi] (strong convexity of f).
inline double f_strong_convexity(FKind k, double lo, double hi) {
  require(0.0 < lo && lo <= hi, Errc::invalid_bounds, "need 0 < lo <= hi");
  switch (k) {
    case FKind::kl: return 1.0 / hi;
    case FKind::chi_squared: return 2.0;
    case FKind::total_variation: return 0.0;
  }
  return 0.0;
}

/// A functional value that may be +infinity (an f-divergence without absolute
/// continuity). Infinity is a flag, never a float overflow.
struct FunctionalValue {
  double value = 0.0;
  bool infinite = false;

  static FunctionalValue inf() { return {std::numeric_limits<double>::infinity(), true}; }
};

/// D_f(mu | nu) = sum_i f(mu_i / nu_i) nu_i over a common grid.
inline FunctionalValue f_divergence(FKind k, const Vector& mu, const Vector& nu) {
  require(mu.size() == nu.size(), Errc::grid_mismatch, "measures on different grids");
  double s = 0.0;
  for (Eigen::Index i = 0; i < mu.size(); ++i) {
    if (nu[i] > 0.0) {
      s += f_value(k, mu[i] / nu[i]) * nu[i];
    } else if (mu[i] > 0.0) {
      return FunctionalValue::inf();
    }
  }
  return {s, false};
}

// ---------------------------------------------------------------------------
// Interaction potentials

/// g(x, y) with declared constants: Lipschitz constant in the first argument
/// and the uniform bound, both as functions of the ground diameter, and the
/// (k, beta) geodesic convexity in the first argument.
struct InteractionPotential {
  std::string id;
  std::function<double(const Vector&, const Vector&)> g;
  std::function<double(double)> lipschitz;
  std::function<double(double)> bound;
  double k = 0.0;
  double beta = 1.0;
};

class PotentialRegistry {
 public:
  /// Registry holding `sqdist` (g = |x - y|^2) and `linear_attraction` (g = |x - y|).
  static PotentialRegistry with_defaults() {
    PotentialRegistry r;
    r.add({"sqdist", [](const Vector& x, const Vector& y) { return (x - y).squaredNorm(); },
           [](double diam) { return 2.0 * diam; }, [](double diam) { return diam * diam; }, 1.0, 1.0});
    r.add({"linear_attraction", [](const Vector& x, const Vector& y) { return (x - y).norm(); },
           [](double) { return 1.0; }, [](double diam) { return diam; }, 0.0, 1.0});
    return r;
  }

  void add(InteractionPotential p) {
    require(!p.id.empty() && p.g && p.lipschitz && p.bound, Errc::invalid_inputs,
            "potential needs an id, g and declared constants");
    require(p.k >= 0.0 && p.beta > 0.0 && p.beta <= 1.0, Errc::invalid_inputs,
            "convexity constants out of range");
    entries_[p.id] = std::move(p);
  }

  const InteractionPotential& find(const std::string& id) const {
    const auto it = entries_.find(id);
    if (it == entries_.end()) fail(Errc::unknown_potential, "no potential registered as '" + id + "'");
    return it->second;
  }

  bool contains(const std::string& id) const { return entries_.count(id) != 0; }

 private:
  std::map<std::string, InteractionPotential> entries_;
};

/// Matrix G_ij = g(a_i, a_j) over the grid atoms.
inline Matrix potential_matrix(const InteractionPotential& pot, const GridWasserstein& grid) {
  const int n = grid.size();
  Matrix m(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      m(i, j) = pot.g(grid.atoms()[static_cast<std::size_t>(i)], grid.atoms()[static_cast<std::size_t>(j)]);
  return m;
}

inline double interaction_energy(const InteractionPotential& pot, const GridWasserstein& grid,
                                 const Vector& mu, const Vector& nu) {
  return mu.dot(potential_matrix(pot, grid) * nu);
}

// ---------------------------------------------------------------------------
// Functional selection and evaluation

enum class FunctionalKind { squared_distance, f_divergence, interaction, sinkhorn };

struct FunctionalSpec {
  FunctionalKind kind = FunctionalKind::squared_distance;
  FKind f = FKind::kl;
  std::optional<InteractionPotential> potential;
  double gamma = 1.0;
  SinkhornOptions sinkhorn_options;

  static FunctionalSpec squared_distance() { return {}; }

  static FunctionalSpec divergence(FKind f) {
    FunctionalSpec s;
    s.kind = FunctionalKind::f_divergence;
    s.f = f;
    return s;
  }

  static FunctionalSpec interaction(const std::string& id,
                                    const PotentialRegistry& reg = PotentialRegistry::with_defaults()) {
    FunctionalSpec s;
    s.kind = FunctionalKind::interaction;
    s.potential = reg.find(id);
    return s;
  }

  static FunctionalSpec sinkhorn(double gamma) {
    require(gamma > 0.0, Errc::invalid_inputs, "Sinkhorn needs gamma > 0");
    FunctionalSpec s;
    s.kind = FunctionalKind::sinkhorn;
    s.gamma = gamma;
    return s;
  }
};

/// F(x, y). Squared distance works in every space; the other functionals
/// need grid measures.
template <MetricSpace S>
FunctionalValue eval_functional(const FunctionalSpec& spec, const S& space,
                                const typename S::point_type& x, const typename S::point_type& y) {
  if (spec.kind == FunctionalKind::squared_distance) {
    const double d = space.distance(x, y);
    return {d * d, false};
  }
  if constexpr (std::is_same_v<S, GridWasserstein>) {
    switch (spec.kind) {
      case FunctionalKind::f_divergence:
        return f_divergence(spec.f, x, y);
      case FunctionalKind::interaction:
        require(spec.potential.has_value(), Errc::unknown_potential, "spec carries no potential");
        return {interaction_energy(*spec.potential, space, x, y), false};
      case FunctionalKind::sinkhorn:
        return {sinkhorn_value(space, x, y, spec.gamma, spec.sinkhorn_options).value, false};
      default:
        break;
    }
  }
  fail(Errc::incompatible_space, "functional requires grid measures");
}

// ---------------------------------------------------------------------------
// Regularity constants

struct RegularityReport {
  double K1 = 0.0;
  double K2 = 0.0;
  double alpha = 1.0;
  std::string source;
};

/// Constants for D_f(., nu) over densities in [c_minus, c_plus] that are
/// Lambda-Lipschitz, with f' L-Lipschitz: K2 = 2 L Lambda c+ / c-^2,
/// alpha = 1, and K1 = sup |f| over the density ratios [c-/c+, c+/c-].
inline RegularityReport fdiv_regularity(FKind k, double c_minus, double c_plus, double L,
                                        double Lambda) {
  require(c_minus > 0.0 && c_minus <= c_plus && std::isfinite(c_plus), Errc::invalid_bounds,
          "density bounds must satisfy 0 < c- <= c+ < inf");
  require(L > 0.0 && Lambda > 0.0, Errc::invalid_bounds, "Lipschitz constants must be positive");
  const double lo = c_minus / c_plus, hi = c_plus / c_minus;
  double sup = std::max(std::abs(f_value(k, lo)), std::abs(f_value(k, hi)));
  constexpr int kSteps = 10000;
  for (int i = 0; i <= kSteps; ++i)
    sup = std::max(sup, std::abs(f_value(k, lo + (hi - lo) * i / kSteps)));
  if (k == FKind::kl && lo < 1.0 / std::numbers::e && hi > 1.0 / std::numbers::e)
    sup = std::max(sup, 1.0 / std::numbers::e);
  return {sup, 2.0 * L * Lambda * c_plus / (c_minus * c_minus), 1.0, "f-divergence Lipschitz bound"};
}

inline RegularityReport interaction_regularity(const InteractionPotential& pot, double diameter) {
  require(diameter > 0.0, Errc::invalid_inputs, "ground diameter must be positive");
  return {pot.bound(diameter), pot.lipschitz(diameter), 1.0, "interaction Lipschitz bound"};
}

inline RegularityReport interaction_regularity(const std::string& id, double diameter,
                                               const PotentialRegistry& reg = PotentialRegistry::with_defaults()) {
  return interaction_regularity(reg.find(id), diameter);
}

/// Slope constant for the divergence's geodesic convexity: the largest c with
/// h(u) - h(u + eps) >= c eps for h(s) = e^s f(e^-s), searched on a grid of
/// (u, eps). Empty when h is not convex on the grid or no positive c exists.
inline std::optional<double> dfA3_constants(FKind k) {
  auto h = [k](double s) { return std::exp(s) * f_value(k, std::exp(-s)); };
  std::vector<double> us;
  for (int e = -30; e <= 13; ++e) {
    const double m = std::pow(10.0, e / 10.0);
    us.push_back(m);
    us.push_back(-m);
  }
  us.push_back(0.0);
  std::sort(us.begin(), us.end());
  std::vector<double> epss;
  for (int e = -40; e <= 10; ++e) epss.push_back(std::pow(10.0, e / 10.0));

  // Convexity via second differences on a uniform stencil around each u.
  for (double u : us) {
    const double step = 1e-2;
    const double second = h(u - step) - 2.0 * h(u) + h(u + step);
    if (second < -1e-9 * std::max(1.0, std::abs(h(u)))) return std::nullopt;
  }
  double c = std::numeric_limits<double>::infinity();
  for (double u : us)
    for (double eps : epss) c = std::min(c, (h(u) - h(u + eps)) / eps);
  if (!(c > 1e-12)) return std::nullopt;
  return c;
}

/// Ohta's modulus for a space of curvature <= 1 and diameter below pi/2:
/// 4 diam tan(pi/2 - diam).
inline double ohta_kconvexity_constant(double diameter) {
  require(diameter > 0.0 && diameter < std::numbers::pi / 2, Errc::invalid_inputs,
          "diameter must lie in (0, pi/2)");
  return 4.0 * diameter * std::tan(std::numbers::pi / 2 - diameter);
}

}  // namespace geobary
