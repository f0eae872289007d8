#pragma once

// Entropy-regularised transport with the product of the marginals as the
// reference measure, solved by log-domain Sinkhorn iterations.

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "geobary/linalg.hpp"
#include "geobary/spaces/grid_wasserstein.hpp"

namespace geobary {

inline constexpr int kSinkhornCap = 512;

struct SinkhornOptions {
  double tol = 1e-9;         // l1 violation of the row marginal
  long max_iter = 100000;    // iterations summed over all scaling stages
  bool record_dual = false;  // keep the negated dual objective of the final stage
};

struct SinkhornResult {
  double value = 0.0;  // <C, plan> + gamma KL(plan | mu x nu)
  Matrix plan;
  long iterations = 0;
  double marginal_residual = 0.0;
  /// Dual potentials, extended to atoms outside the supports by the
  /// corresponding soft-min formula. f is the gradient of the value in mu.
  Vector f;
  Vector g;
  std::vector<double> negated_dual;
};

namespace detail {

inline double soft_min(const Vector& w, const Vector& shifted, double gamma) {
  // -gamma log sum_j w_j exp(-shifted_j / gamma) over w_j > 0
  double lo = std::numeric_limits<double>::infinity();
  for (Eigen::Index j = 0; j < w.size(); ++j)
    if (w[j] > 0.0) lo = std::min(lo, shifted[j]);
  double s = 0.0;
  for (Eigen::Index j = 0; j < w.size(); ++j)
    if (w[j] > 0.0) s += w[j] * std::exp(-(shifted[j] - lo) / gamma);
  return lo - gamma * std::log(s);
}

struct SinkhornState {
  const Vector& mu;
  const Vector& nu;
  const Matrix& cost;
  Vector f, g;

  void update_f(double gamma) {
    for (Eigen::Index i = 0; i < mu.size(); ++i) {
      const Vector shifted = cost.row(i).transpose() - g;
      f[i] = soft_min(nu, shifted, gamma);
    }
  }
  void update_g(double gamma) {
    for (Eigen::Index j = 0; j < nu.size(); ++j) {
      const Vector shifted = cost.col(j) - f;
      g[j] = soft_min(mu, shifted, gamma);
    }
  }
  Matrix plan(double gamma) const {
    Matrix p = Matrix::Zero(mu.size(), nu.size());
    for (Eigen::Index i = 0; i < mu.size(); ++i) {
      if (mu[i] <= 0.0) continue;
      for (Eigen::Index j = 0; j < nu.size(); ++j)
        if (nu[j] > 0.0) p(i, j) = mu[i] * nu[j] * std::exp((f[i] + g[j] - cost(i, j)) / gamma);
    }
    return p;
  }
  double row_residual(double gamma) const {
    return (plan(gamma).rowwise().sum() - mu).cwiseAbs().sum();
  }
  double dual(double gamma) const {
    const Matrix p = plan(gamma);
    double mass = 0.0;
    for (Eigen::Index i = 0; i < mu.size(); ++i)
      for (Eigen::Index j = 0; j < nu.size(); ++j)
        if (mu[i] > 0.0 && nu[j] > 0.0) mass += p(i, j) - mu[i] * nu[j];
    double lin = 0.0;
    for (Eigen::Index i = 0; i < mu.size(); ++i)
      if (mu[i] > 0.0) lin += f[i] * mu[i];
    for (Eigen::Index j = 0; j < nu.size(); ++j)
      if (nu[j] > 0.0) lin += g[j] * nu[j];
    return lin - gamma * mass;
  }
};

}  // namespace detail

/// W_gamma(mu, nu)^2 for the cost matrix `cost`. Regularisation is reached by
/// halving gamma from the cost scale, warm-starting each stage.
inline SinkhornResult sinkhorn(const Vector& mu, const Vector& nu, const Matrix& cost, double gamma,
                               const SinkhornOptions& opt = {}) {
  require(gamma > 0.0 && std::isfinite(gamma), Errc::invalid_inputs, "gamma must be positive");
  require(cost.rows() == mu.size() && cost.cols() == nu.size(), Errc::grid_mismatch,
          "cost matrix does not match the marginals");
  require(mu.size() <= kSinkhornCap && nu.size() <= kSinkhornCap, Errc::too_large_for_exact,
          "Sinkhorn is limited to 512 atoms");
  require(mu.minCoeff() >= 0.0 && nu.minCoeff() >= 0.0, Errc::invalid_point, "negative mass");

  detail::SinkhornState st{mu, nu, cost, Vector::Zero(mu.size()), Vector::Zero(nu.size())};
  std::vector<double> stages;
  const double scale = std::max(cost.cwiseAbs().maxCoeff(), gamma);
  for (double eps = scale; eps > gamma; eps *= 0.5) stages.push_back(eps);
  stages.push_back(gamma);

  SinkhornResult res;
  long it = 0;
  double residual = std::numeric_limits<double>::infinity();
  for (std::size_t s = 0; s < stages.size(); ++s) {
    const double eps = stages[s];
    const bool last = s + 1 == stages.size();
    const double stage_tol = last ? opt.tol : std::max(opt.tol, 1e-6);
    for (;;) {
      st.update_f(eps);
      st.update_g(eps);
      ++it;
      if (last && opt.record_dual) res.negated_dual.push_back(-st.dual(eps));
      residual = st.row_residual(eps);
      if (residual < stage_tol) break;
      if (it >= opt.max_iter)
        fail(Errc::no_convergence,
             "Sinkhorn stopped after " + std::to_string(it) + " iterations, residual " +
                 std::to_string(residual));
    }
  }

  res.plan = st.plan(gamma);
  res.iterations = it;
  res.marginal_residual = residual;
  st.update_f(gamma);  // exact row marginals; also extends f off the support
  res.f = st.f;
  res.g = st.g;
  for (Eigen::Index j = 0; j < nu.size(); ++j)
    if (nu[j] <= 0.0) res.g[j] = detail::soft_min(mu, cost.col(j) - res.f, gamma);

  double value = 0.0;
  for (Eigen::Index i = 0; i < mu.size(); ++i)
    for (Eigen::Index j = 0; j < nu.size(); ++j) {
      const double p = res.plan(i, j);
      if (p <= 0.0) continue;
      value += p * cost(i, j) + gamma * p * std::log(p / (mu[i] * nu[j]));
    }
  res.value = value;
  return res;
}

inline SinkhornResult sinkhorn_value(const GridWasserstein& grid, const Vector& mu, const Vector& nu,
                                     double gamma, const SinkhornOptions& opt = {}) {
  require(mu.size() == grid.size() && nu.size() == grid.size(), Errc::grid_mismatch,
          "measures do not live on this grid");
  return sinkhorn(mu, nu, grid.cost(), gamma, opt);
}

}  // namespace geobary
