#pragma once

// Minimisers of x -> sum_i w_i F(x, y_i) for finitely supported P, one solver
// per (space, functional) pair.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <random>
#include <string>
#include <type_traits>
#include <utility>
#include <vector>

#include "geobary/functionals.hpp"
#include "geobary/linalg.hpp"
#include "geobary/measure.hpp"
#include "geobary/metric_core.hpp"
#include "geobary/sinkhorn.hpp"
#include "geobary/spaces/euclidean.hpp"
#include "geobary/spaces/gaussian.hpp"
#include "geobary/spaces/grid_wasserstein.hpp"
#include "geobary/spaces/sphere.hpp"
#include "geobary/spaces/spider.hpp"
#include "geobary/spaces/wasserstein1d.hpp"

namespace geobary {

enum class BaryStatus { converged, iteration_cap, multi_minimizer };

inline const char* status_name(BaryStatus s) {
  switch (s) {
    case BaryStatus::converged: return "converged";
    case BaryStatus::iteration_cap: return "iteration-cap";
    case BaryStatus::multi_minimizer: return "multi-minimizer";
  }
  return "?";
}

struct SolverOptions {
  double tol = 1e-10;     // gradient norm (sphere), Frobenius step (Gaussian), FW gap (grid)
  int max_iter = 10000;
  int restarts = 8;       // random starts on the sphere, in addition to the atoms
  int max_atom_starts = std::numeric_limits<int>::max();
  std::uint64_t seed = 0;
  double step = 0.5;      // sphere gradient step before backtracking
  double eta = 0.1;       // grid mirror-descent step before backtracking
  int max_halvings = 30;
};

template <MetricSpace S>
struct BarycenterProblem {
  S space;
  FunctionalSpec functional;
  DiscreteMeasure<typename S::point_type> P;
  SolverOptions options;
};

template <MetricSpace S>
struct BarycenterResult {
  typename S::point_type minimizer;
  double objective = 0.0;
  BaryStatus status = BaryStatus::converged;
  /// Distinct minimisers reached from the restarts, best first.
  std::vector<typename S::point_type> candidates;
  std::vector<double> candidate_objectives;
  int iterations = 0;
  /// Stationarity measure at the minimiser (tangent gradient norm, fixed-point
  /// step or Frank-Wolfe gap, depending on the solver).
  double residual = 0.0;
  /// Objective after every accepted iteration of the run that produced the
  /// minimiser.
  std::vector<double> objective_log;
};

/// sum_i w_i F(x, y_i), infinite when any term with positive weight is.
template <MetricSpace S>
FunctionalValue barycenter_objective(const S& space, const FunctionalSpec& spec,
                                     const DiscreteMeasure<typename S::point_type>& P,
                                     const typename S::point_type& x) {
  double s = 0.0;
  for (std::size_t i = 0; i < P.size(); ++i) {
    if (P.weight(i) == 0.0) continue;
    const FunctionalValue v = eval_functional(spec, space, x, P.atom(i));
    if (v.infinite) return FunctionalValue::inf();
    s += P.weight(i) * v.value;
  }
  return {s, false};
}

template <MetricSpace S>
double frechet_objective(const S& space, const DiscreteMeasure<typename S::point_type>& P,
                         const typename S::point_type& x) {
  return barycenter_objective(space, FunctionalSpec::squared_distance(), P, x).value;
}

namespace detail {

template <MetricSpace S>
BarycenterResult<S> single_result(const S& space, const DiscreteMeasure<typename S::point_type>& P,
                                  typename S::point_type x) {
  BarycenterResult<S> r;
  r.objective = frechet_objective(space, P, x);
  r.minimizer = x;
  r.candidates = {std::move(x)};
  r.candidate_objectives = {r.objective};
  r.objective_log = {r.objective};
  return r;
}

inline Vector weighted_mean(const DiscreteMeasure<Vector>& P) {
  Vector m = Vector::Zero(P.atom(0).size());
  for (std::size_t i = 0; i < P.size(); ++i) m += P.weight(i) * P.atom(i);
  return m;
}

// On ray r the objective is sum_on w (t - y)^2 + sum_off w (t + y)^2, minimised
// at t = sum_on w y - sum_off w y; at most one ray gives a positive value.
inline SpiderPoint spider_barycenter(const SpiderTree& t, const DiscreteMeasure<SpiderPoint>& P) {
  std::vector<double> moment(static_cast<std::size_t>(t.rays()), 0.0);
  double total = 0.0;
  for (std::size_t i = 0; i < P.size(); ++i) {
    const SpiderPoint& y = P.atom(i);
    t.validate(y);
    moment[static_cast<std::size_t>(y.ray)] += P.weight(i) * y.radius;
    total += P.weight(i) * y.radius;
  }
  for (int r = 0; r < t.rays(); ++r) {
    const double pos = 2.0 * moment[static_cast<std::size_t>(r)] - total;
    if (pos > 0.0) return {r, std::min(pos, t.ray_length())};
  }
  return {0, 0.0};
}

inline bool lex_less(const Vector& a, const Vector& b, double tol) {
  for (Eigen::Index i = 0; i < std::min(a.size(), b.size()); ++i) {
    if (a[i] < b[i] - tol) return true;
    if (a[i] > b[i] + tol) return false;
  }
  return false;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Sphere

/// Riemannian gradient of the Frechet functional at x, as an ambient vector:
/// -2 sum_i w_i log_x(y_i).
inline Vector sphere_frechet_gradient(const Sphere& s, const DiscreteMeasure<Vector>& P, const Vector& x) {
  Vector g = Vector::Zero(x.size());
  for (std::size_t i = 0; i < P.size(); ++i) {
    const TangentVector<Sphere> u = s.log_map(x, P.atom(i));
    if (u.magnitude > 0.0) g -= 2.0 * P.weight(i) * u.magnitude * u.direction;
  }
  return g;
}

namespace detail {

struct SphereRun {
  Vector x;
  double value = 0.0;
  double grad_norm = 0.0;
  int iterations = 0;
  bool converged = false;
  std::vector<double> log;
};

inline SphereRun sphere_descent(const Sphere& s, const DiscreteMeasure<Vector>& P, Vector x,
                                const SolverOptions& opt) {
  SphereRun run;
  double f = frechet_objective(s, P, x);
  Vector g = sphere_frechet_gradient(s, P, x);
  double gn = g.norm();
  run.log.push_back(f);
  int it = 0;
  for (; it < opt.max_iter && gn > opt.tol; ++it) {
    const Vector dir = -g / gn;
    double step = opt.step;
    bool accepted = false;
    for (int h = 0; h <= opt.max_halvings; ++h, step *= 0.5) {
      const Vector xn = s.exp_map(x, dir, step * gn);
      const double fn = frechet_objective(s, P, xn);
      const bool armijo = fn <= f - 1e-4 * step * gn * gn;
      bool roundoff = false;
      if (!armijo && fn <= f + 4.0 * std::numeric_limits<double>::epsilon() * std::abs(f)) {
        roundoff = sphere_frechet_gradient(s, P, xn).norm() < gn;
      }
      if (armijo || roundoff) {
        x = xn;
        f = std::min(fn, f);
        accepted = true;
        break;
      }
    }
    if (!accepted) break;
    g = sphere_frechet_gradient(s, P, x);
    gn = g.norm();
    run.log.push_back(f);
  }
  run.x = x;
  run.value = f;
  run.grad_norm = gn;
  run.iterations = it;
  run.converged = gn <= opt.tol;
  return run;
}

}  // namespace detail

/// Multi-start intrinsic gradient descent. Distinct minima tied with the best
/// objective are all reported; more than one gives status multi-minimizer.
inline BarycenterResult<Sphere> solve_sphere_barycenter(const Sphere& s, const DiscreteMeasure<Vector>& P,
                                                        const SolverOptions& opt) {
  for (const auto& y : P.atoms()) s.validate(y);
  std::vector<Vector> starts;
  Rng rng = make_rng(derive_seed(opt.seed, 0x5be2e));
  for (int i = 0; i < opt.restarts; ++i) starts.push_back(s.sample(rng));
  const std::size_t atom_starts = std::min(P.size(), static_cast<std::size_t>(std::max(opt.max_atom_starts, 0)));
  for (std::size_t i = 0; i < atom_starts; ++i) starts.push_back(P.atom(i));
  require(!starts.empty(), Errc::invalid_inputs, "no starting points");

  std::vector<detail::SphereRun> runs;
  for (const Vector& x0 : starts) runs.push_back(detail::sphere_descent(s, P, x0, opt));

  double best = std::numeric_limits<double>::infinity();
  for (const auto& r : runs) best = std::min(best, r.value);
  const double tie = std::max(1e-9 * std::max(1.0, std::abs(best)), 10.0 * opt.tol);
  const double merge = std::max(10.0 * opt.tol, 1e-6);

  std::vector<const detail::SphereRun*> kept;
  for (const auto& r : runs) {
    if (r.value > best + tie) continue;
    bool dup = false;
    for (auto*& k : kept)
      if (s.distance(k->x, r.x) <= merge) {
        if (r.value < k->value) k = &r;
        dup = true;
        break;
      }
    if (!dup) kept.push_back(&r);
  }
  std::sort(kept.begin(), kept.end(), [&](const detail::SphereRun* a, const detail::SphereRun* b) {
    if (std::abs(a->value - b->value) > tie) return a->value < b->value;
    return detail::lex_less(a->x, b->x, 1e-9);
  });

  BarycenterResult<Sphere> res;
  const detail::SphereRun& top = *kept.front();
  res.minimizer = top.x;
  res.objective = top.value;
  res.iterations = top.iterations;
  res.residual = top.grad_norm;
  res.objective_log = top.log;
  for (const auto* k : kept) {
    res.candidates.push_back(k->x);
    res.candidate_objectives.push_back(k->value);
  }
  if (kept.size() > 1)
    res.status = BaryStatus::multi_minimizer;
  else
    res.status = top.converged ? BaryStatus::converged : BaryStatus::iteration_cap;
  return res;
}

// ---------------------------------------------------------------------------
// Gaussian (Bures-Wasserstein)

namespace detail {

inline Matrix gaussian_fixed_point_step(const Matrix& S, const DiscreteMeasure<GaussianPoint>& P) {
  const Matrix r = sqrtm_psd(S);
  const Matrix rinv = inv_sqrtm_spd(S);
  Matrix avg = Matrix::Zero(S.rows(), S.cols());
  for (std::size_t i = 0; i < P.size(); ++i) avg += P.weight(i) * sqrtm_psd(r * P.atom(i).cov * r);
  return symmetrize(rinv * avg * avg * rinv);
}

}  // namespace detail

/// Fixed point S = S^{-1/2} (sum_i w_i (S^{1/2} S_i S^{1/2})^{1/2})^2 S^{-1/2}
/// for the covariance; the mean is the weighted mean of the means.
inline BarycenterResult<GaussianBures> solve_gaussian_barycenter(const GaussianBures& space,
                                                                 const DiscreteMeasure<GaussianPoint>& P,
                                                                 double tol = 1e-10, int max_iter = 10000) {
  const int d = space.dim();
  Vector mean = Vector::Zero(d);
  Matrix S = Matrix::Zero(d, d);
  for (std::size_t i = 0; i < P.size(); ++i) {
    space.validate(P.atom(i));
    mean += P.weight(i) * P.atom(i).mean;
    S += P.weight(i) * P.atom(i).cov;
  }
  BarycenterResult<GaussianBures> res;
  double step = std::numeric_limits<double>::infinity();
  int it = 0;
  for (; it < max_iter; ++it) {
    const Matrix next = detail::gaussian_fixed_point_step(S, P);
    if (min_eigenvalue(next) <= kSpectralFloor)
      fail(Errc::non_spd, "barycenter iterate fell below the spectral floor");
    step = (next - S).norm();
    S = next;
    res.objective_log.push_back(frechet_objective(space, P, GaussianPoint{mean, S}));
    if (step <= tol) break;
  }
  if (step > tol)
    fail(Errc::no_convergence, "Gaussian fixed point did not converge, last step " + std::to_string(step));
  res.minimizer = {mean, S};
  res.objective = frechet_objective(space, P, res.minimizer);
  res.iterations = it + 1;
  res.residual = step;
  res.candidates = {res.minimizer};
  res.candidate_objectives = {res.objective};
  return res;
}

// ---------------------------------------------------------------------------
// Grid measures: mirror descent on the simplex

namespace detail {

// Gradient of mu -> sum_k w_k F(mu, nu_k) with respect to the weights.
inline Vector grid_gradient(const GridWasserstein& grid, const FunctionalSpec& spec,
                            const DiscreteMeasure<Vector>& P, const Vector& mu, const std::vector<char>& domain,
                            const Matrix* gmat) {
  const int n = grid.size();
  Vector g = Vector::Zero(n);
  switch (spec.kind) {
    case FunctionalKind::f_divergence:
      for (std::size_t k = 0; k < P.size(); ++k) {
        const Vector& nu = P.atom(k);
        for (int i = 0; i < n; ++i)
          if (domain[static_cast<std::size_t>(i)]) g[i] += P.weight(k) * f_prime(spec.f, mu[i] / nu[i]);
      }
      break;
    case FunctionalKind::interaction: {
      Vector nubar = Vector::Zero(n);
      for (std::size_t k = 0; k < P.size(); ++k) nubar += P.weight(k) * P.atom(k);
      g = (*gmat) * nubar;
      break;
    }
    case FunctionalKind::sinkhorn:
      for (std::size_t k = 0; k < P.size(); ++k)
        g += P.weight(k) * sinkhorn_value(grid, mu, P.atom(k), spec.gamma, spec.sinkhorn_options).f;
      break;
    default:
      fail(Errc::incompatible_space, "unsupported functional on grid measures");
  }
  return g;
}

}  // namespace detail

/// Exponentiated-gradient descent over the simplex (restricted to the atoms
/// where the objective can be finite). The step starts at eta, is halved until
/// the objective does not increase and doubled after each accepted step.
/// Stops on the Frank-Wolfe gap.
inline BarycenterResult<GridWasserstein> solve_grid_barycenter(const GridWasserstein& grid,
                                                               const FunctionalSpec& spec,
                                                               const DiscreteMeasure<Vector>& P,
                                                               const SolverOptions& opt) {
  if (spec.kind == FunctionalKind::squared_distance)
    fail(Errc::incompatible_space, "squared W2 barycenters on a grid are not supported");
  const int n = grid.size();
  for (const auto& nu : P.atoms()) grid.validate(nu);

  std::vector<char> domain(static_cast<std::size_t>(n), 1);
  if (spec.kind == FunctionalKind::f_divergence)
    for (std::size_t k = 0; k < P.size(); ++k)
      if (P.weight(k) > 0.0)
        for (int i = 0; i < n; ++i)
          if (P.atom(k)[i] <= 0.0) domain[static_cast<std::size_t>(i)] = 0;
  const int support = static_cast<int>(std::count(domain.begin(), domain.end(), 1));
  require(support > 0, Errc::invalid_inputs, "the divergence is infinite at every grid measure");

  Matrix gmat;
  if (spec.kind == FunctionalKind::interaction) gmat = potential_matrix(*spec.potential, grid);

  Vector mu = Vector::Zero(n);
  for (int i = 0; i < n; ++i)
    if (domain[static_cast<std::size_t>(i)]) mu[i] = 1.0 / support;
  auto value = [&](const Vector& m) { return barycenter_objective(grid, spec, P, m).value; };

  auto gap_of = [&](const Vector& m, const Vector& g, double& gmin) {
    gmin = std::numeric_limits<double>::infinity();
    for (int i = 0; i < n; ++i)
      if (domain[static_cast<std::size_t>(i)]) gmin = std::min(gmin, g[i]);
    return m.dot(g) - gmin;
  };

  BarycenterResult<GridWasserstein> res;
  double f = value(mu);
  res.objective_log.push_back(f);
  Vector g = detail::grid_gradient(grid, spec, P, mu, domain, &gmat);
  double gmin = 0.0;
  double gap = gap_of(mu, g, gmin);
  double eta = opt.eta;
  int it = 0;
  for (; it < opt.max_iter && gap > opt.tol; ++it) {
    bool accepted = false;
    for (int h = 0; h <= opt.max_halvings; ++h, eta *= 0.5) {
      Vector next = Vector::Zero(n);
      for (int i = 0; i < n; ++i)
        if (domain[static_cast<std::size_t>(i)]) next[i] = mu[i] * std::exp(-eta * (g[i] - gmin));
      next /= next.sum();
      const double fn = value(next);
      if (fn > f + 4.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(f))) continue;
      Vector gn = detail::grid_gradient(grid, spec, P, next, domain, &gmat);
      double gmin_n = 0.0;
      const double gap_n = gap_of(next, gn, gmin_n);
      // Near the optimum the objective stalls at roundoff; accept only steps
      // that still shrink the gap there.
      if (fn > f && gap_n >= gap) continue;
      mu = next;
      f = std::min(f, fn);
      g = std::move(gn);
      gmin = gmin_n;
      gap = gap_n;
      accepted = true;
      break;
    }
    if (!accepted) break;
    eta = std::min(2.0 * eta, 1e6);
    res.objective_log.push_back(f);
  }
  res.minimizer = mu;
  res.objective = f;
  res.iterations = it;
  res.residual = gap;
  res.status = gap <= opt.tol ? BaryStatus::converged : BaryStatus::iteration_cap;
  res.candidates = {mu};
  res.candidate_objectives = {f};
  return res;
}

// ---------------------------------------------------------------------------
// Dispatch

template <MetricSpace S>
BarycenterResult<S> solve_barycenter(const BarycenterProblem<S>& prob) {
  const auto& P = prob.P;
  if constexpr (std::is_same_v<S, GridWasserstein>) {
    return solve_grid_barycenter(prob.space, prob.functional, P, prob.options);
  } else {
    if (prob.functional.kind != FunctionalKind::squared_distance)
      fail(Errc::incompatible_space, "only the squared distance is available outside grid measures");
    if constexpr (std::is_same_v<S, Euclidean> || std::is_same_v<S, Wasserstein1D>) {
      for (const auto& y : P.atoms()) prob.space.validate(y);
      return detail::single_result(prob.space, P, detail::weighted_mean(P));
    } else if constexpr (std::is_same_v<S, SpiderTree>) {
      return detail::single_result(prob.space, P, detail::spider_barycenter(prob.space, P));
    } else if constexpr (std::is_same_v<S, Sphere>) {
      return solve_sphere_barycenter(prob.space, P, prob.options);
    } else if constexpr (std::is_same_v<S, GaussianBures>) {
      return solve_gaussian_barycenter(prob.space, P, prob.options.tol, prob.options.max_iter);
    } else {
      fail(Errc::incompatible_space, "no barycenter solver for this space");
    }
  }
}

template <MetricSpace S>
BarycenterResult<S> solve_barycenter(const S& space, const DiscreteMeasure<typename S::point_type>& P,
                                     const SolverOptions& opt = {},
                                     const FunctionalSpec& spec = FunctionalSpec::squared_distance()) {
  return solve_barycenter(BarycenterProblem<S>{space, spec, P, opt});
}

// ---------------------------------------------------------------------------
// Diagnostics and sampling

/// sum_ij w_i w_j <log_c y_i, log_c y_j>_c; vanishes at exponential barycenters.
template <LogMapSpace S>
double exp_barycenter_residual(const S& space, const DiscreteMeasure<typename S::point_type>& P,
                               const typename S::point_type& c) {
  std::vector<TangentVector<S>> logs;
  logs.reserve(P.size());
  for (const auto& y : P.atoms()) logs.push_back(log_map(space, c, y));
  double s = 0.0;
  for (std::size_t i = 0; i < P.size(); ++i)
    for (std::size_t j = 0; j < P.size(); ++j)
      s += P.weight(i) * P.weight(j) * tangent_inner(space, logs[i], logs[j]);
  return s;
}

/// Empirical measure of n i.i.d. draws from P. Repeated draws of an atom are
/// merged into one atom of weight count / n, in the atom order of P.
template <class Point>
DiscreteMeasure<Point> sample_empirical(const DiscreteMeasure<Point>& P, int n, std::uint64_t seed) {
  require(n >= 1, Errc::invalid_inputs, "sample size must be positive");
  Rng rng = make_rng(seed);
  std::discrete_distribution<std::size_t> pick(P.weights().begin(), P.weights().end());
  std::vector<int> counts(P.size(), 0);
  for (int i = 0; i < n; ++i) ++counts[pick(rng)];
  std::vector<Point> atoms;
  std::vector<double> weights;
  for (std::size_t i = 0; i < P.size(); ++i)
    if (counts[i] > 0) {
      atoms.push_back(P.atom(i));
      weights.push_back(static_cast<double>(counts[i]) / n);
    }
  return DiscreteMeasure<Point>(std::move(atoms), std::move(weights));
}

}  // namespace geobary
