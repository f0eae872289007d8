#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "geobary/functionals.hpp"
#include "geobary/sinkhorn.hpp"

using namespace geobary;

namespace {

// Primal value of W_gamma^2 on a 2x2 problem: couplings form the segment
// P(a) = [[a, mu0 - a], [nu0 - a, 1 - mu0 - nu0 + a]]; minimised by golden
// section (the objective is strictly convex in a).
double two_by_two_oracle(const Vector& mu, const Vector& nu, const Matrix& c, double gamma) {
  auto objective = [&](double a) {
    const double p[2][2] = {{a, mu[0] - a}, {nu[0] - a, 1.0 - mu[0] - nu[0] + a}};
    double v = 0.0;
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) {
        if (p[i][j] <= 0.0) continue;
        v += p[i][j] * c(i, j) + gamma * p[i][j] * std::log(p[i][j] / (mu[i] * nu[j]));
      }
    return v;
  };
  double lo = std::max(0.0, mu[0] + nu[0] - 1.0), hi = std::min(mu[0], nu[0]);
  const double r = (std::sqrt(5.0) - 1.0) / 2.0;
  for (int it = 0; it < 200; ++it) {
    const double x1 = hi - r * (hi - lo), x2 = lo + r * (hi - lo);
    if (objective(x1) < objective(x2))
      hi = x2;
    else
      lo = x1;
  }
  return objective(0.5 * (lo + hi));
}

}  // namespace

TEST(Sinkhorn, DiracToItselfIsZero) {
  const auto grid = GridWasserstein::line({0.0, 1.0, 2.0});
  for (double gamma : {1e-3, 1.0, 1e3}) {
    const auto r = sinkhorn_value(grid, grid.dirac(1), grid.dirac(1), gamma);
    EXPECT_NEAR(r.value, 0.0, 1e-12);
  }
}

TEST(Sinkhorn, LargeGammaApproachesInteractionEnergy) {
  const auto grid = GridWasserstein::line({0.0, 1.0});
  const Vector u = Vector::Constant(2, 0.5);
  const auto r = sinkhorn_value(grid, u, u, 1e4);
  EXPECT_NEAR(r.value, 0.5, 1e-4);
  EXPECT_NEAR(interaction_energy(PotentialRegistry::with_defaults().find("sqdist"), grid, u, u), 0.5, 1e-15);
}

TEST(Sinkhorn, SmallGammaApproachesExactTransport) {
  const auto grid = GridWasserstein::line({0.0, 1.0});
  const Vector u = Vector::Constant(2, 0.5);
  const auto r = sinkhorn_value(grid, u, u, 1e-3);
  EXPECT_NEAR(r.value, grid_w2(grid, u, u).cost, 1e-3);
}

TEST(Sinkhorn, MatchesTwoByTwoOracle) {
  const auto grid = GridWasserstein::line({0.0, 1.0});
  Rng rng = make_rng(3);
  for (int rep = 0; rep < 50; ++rep) {
    const Vector mu = grid.sample(rng), nu = grid.sample(rng);
    for (double gamma : {0.05, 0.3, 2.0}) {
      const auto r = sinkhorn_value(grid, mu, nu, gamma);
      EXPECT_NEAR(r.value, two_by_two_oracle(mu, nu, grid.cost(), gamma), 1e-8);
    }
  }
}

TEST(Sinkhorn, MarginalsAndDualMonotonicity) {
  const auto grid = GridWasserstein::unit_interval(12);
  Rng rng = make_rng(5);
  SinkhornOptions opt;
  opt.record_dual = true;
  for (int rep = 0; rep < 20; ++rep) {
    const Vector mu = grid.sample(rng), nu = grid.sample(rng);
    const auto r = sinkhorn_value(grid, mu, nu, 0.01, opt);
    EXPECT_LT((r.plan.rowwise().sum() - mu).cwiseAbs().maxCoeff(), 1e-9);
    EXPECT_LT((r.plan.colwise().sum().transpose() - nu).cwiseAbs().maxCoeff(), 1e-9);
    ASSERT_FALSE(r.negated_dual.empty());
    for (std::size_t k = 1; k < r.negated_dual.size(); ++k)
      ASSERT_LE(r.negated_dual[k], r.negated_dual[k - 1] + 1e-12);
    // At convergence the dual value equals the primal one.
    EXPECT_NEAR(-r.negated_dual.back(), r.value, 1e-8);
  }
}

TEST(Sinkhorn, MonotoneInGamma) {
  const auto grid = GridWasserstein::unit_interval(8);
  Rng rng = make_rng(7);
  for (int rep = 0; rep < 100; ++rep) {
    const Vector mu = grid.sample(rng), nu = grid.sample(rng);
    double prev = -std::numeric_limits<double>::infinity();
    for (double gamma : {1e-3, 1e-2, 1e-1, 1.0, 10.0, 100.0, 1e3}) {
      const double v = sinkhorn_value(grid, mu, nu, gamma).value;
      ASSERT_GE(v, prev - 1e-9);
      prev = v;
    }
  }
}

TEST(Sinkhorn, LimitsOnRandomInstances) {
  const auto grid = GridWasserstein::unit_interval(8);
  const auto& pot = PotentialRegistry::with_defaults().find("sqdist");
  Rng rng = make_rng(9);
  for (int rep = 0; rep < 50; ++rep) {
    const Vector mu = grid.sample(rng), nu = grid.sample(rng);
    EXPECT_LT(std::abs(sinkhorn_value(grid, mu, nu, 1e-3).value - grid_w2(grid, mu, nu).cost), 1e-2);
    EXPECT_LT(std::abs(sinkhorn_value(grid, mu, nu, 1e3).value - interaction_energy(pot, grid, mu, nu)), 1e-2);
  }
}

TEST(Sinkhorn, PotentialIsTheGradient) {
  const auto grid = GridWasserstein::unit_interval(6);
  Rng rng = make_rng(11);
  const double gamma = 0.05, h = 1e-6;
  for (int rep = 0; rep < 10; ++rep) {
    const Vector mu = grid.sample(rng), nu = grid.sample(rng);
    const auto r = sinkhorn_value(grid, mu, nu, gamma);
    // Directional derivative along a mass-preserving perturbation.
    Vector dir = grid.sample(rng) - mu;
    const double fd = (sinkhorn_value(grid, mu + h * dir, nu, gamma).value -
                       sinkhorn_value(grid, mu - h * dir, nu, gamma).value) /
                      (2 * h);
    EXPECT_NEAR(fd, r.f.dot(dir), 1e-5);
  }
}

TEST(Sinkhorn, ZeroMassAtomsAreHandled) {
  const auto grid = GridWasserstein::line({0.0, 1.0, 2.0});
  Vector mu(3), nu(3);
  mu << 0.5, 0.5, 0.0;
  nu << 0.0, 0.5, 0.5;
  const auto r = sinkhorn_value(grid, mu, nu, 1e-3);
  EXPECT_NEAR(r.value, grid_w2(grid, mu, nu).cost, 1e-2);
  EXPECT_TRUE(r.f.allFinite());
  EXPECT_TRUE(r.g.allFinite());
}

TEST(Sinkhorn, IterationCapRaises) {
  const auto grid = GridWasserstein::unit_interval(8);
  Rng rng = make_rng(13);
  const Vector mu = grid.sample(rng), nu = grid.sample(rng);
  SinkhornOptions opt;
  opt.max_iter = 3;
  try {
    (void)sinkhorn_value(grid, mu, nu, 1e-3, opt);
    FAIL();
  } catch (const Error& err) {
    EXPECT_EQ(err.code(), Errc::no_convergence);
  }
}

TEST(Sinkhorn, RejectsNonPositiveGamma) {
  const auto grid = GridWasserstein::line({0.0, 1.0});
  EXPECT_THROW((void)sinkhorn_value(grid, grid.dirac(0), grid.dirac(1), 0.0), Error);
  EXPECT_THROW((void)FunctionalSpec::sinkhorn(-1.0), Error);
}
