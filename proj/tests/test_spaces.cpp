#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <numbers>

#include "geobary/spaces/euclidean.hpp"
#include "geobary/spaces/gaussian.hpp"
#include "geobary/spaces/sphere.hpp"
#include "geobary/spaces/spider.hpp"
#include "geobary/spaces/wasserstein1d.hpp"

using namespace geobary;
using std::numbers::pi;

namespace {

GaussianPoint gauss1(double mean, double var) {
  return {Vector::Constant(1, mean), Matrix::Constant(1, 1, var)};
}

GaussianPoint diag_gauss(double v0, double v1) {
  Matrix c = Matrix::Zero(2, 2);
  c(0, 0) = v0;
  c(1, 1) = v1;
  return {Vector::Zero(2), c};
}

// E||X - T(X)||^2 for X ~ N(m0, S0) and T(x) = m0 + s + A (x - m0).
double map_cost(const GaussianPoint& a, const AffineMap& t) {
  const Matrix r = Matrix::Identity(a.cov.rows(), a.cov.cols()) - t.linear;
  return t.shift.squaredNorm() + (r * a.cov * r.transpose()).trace();
}

}  // namespace

TEST(Bures, Examples) {
  EXPECT_NEAR(bures_distance(gauss1(0, 1), gauss1(0, 4)), 1.0, 1e-14);
  Rng rng = make_rng(3);
  const GaussianPoint g = GaussianBures(2).sample(rng);
  EXPECT_NEAR(bures_distance(g, g), 0.0, 1e-12);
  EXPECT_NEAR(bures_distance(diag_gauss(1, 1), diag_gauss(4, 4)), std::sqrt(2.0), 1e-14);
}

TEST(Bures, MeanContribution) {
  GaussianPoint a = diag_gauss(1, 2), b = diag_gauss(1, 2);
  b.mean << 3, 4;
  EXPECT_NEAR(bures_distance(a, b), 5.0, 1e-12);
}

TEST(Bures, NonSpdRejected) {
  try {
    (void)bures_map(diag_gauss(1, 0), diag_gauss(1, 1));
    FAIL();
  } catch (const Error& err) {
    EXPECT_EQ(err.code(), Errc::non_spd);
  }
  try {
    (void)GaussianBures(2).validate(diag_gauss(1, -1));
    FAIL();
  } catch (const Error& err) {
    EXPECT_EQ(err.code(), Errc::non_spd);
  }
}

TEST(BuresMap, Examples) {
  const AffineMap t = bures_map(gauss1(0, 1), gauss1(0, 4));
  EXPECT_NEAR(t.linear(0, 0), 2.0, 1e-14);
  EXPECT_NEAR(t.shift[0], 0.0, 0.0);

  const GaussianPoint g = diag_gauss(2, 3);
  EXPECT_TRUE(bures_map(g, g).linear.isApprox(Matrix::Identity(2, 2), 1e-12));

  const Matrix m = bures_map(diag_gauss(1, 4), diag_gauss(9, 1)).linear;
  EXPECT_NEAR(m(0, 0), 3.0, 1e-12);
  EXPECT_NEAR(m(1, 1), 0.5, 1e-12);
  EXPECT_NEAR(m(0, 1), 0.0, 1e-12);
}

TEST(BuresMap, PushForwardAndCostOracle) {
  GaussianBures space(3);
  Rng rng = make_rng(17);
  for (int i = 0; i < 500; ++i) {
    const GaussianPoint a = space.sample(rng), b = space.sample(rng);
    const AffineMap t = bures_map(a, b);
    EXPECT_GT(min_eigenvalue(t.linear), 0.0);
    const GaussianPoint pushed = push_forward(a, t);
    ASSERT_LE((pushed.mean - b.mean).cwiseAbs().maxCoeff(), 1e-9);
    ASSERT_LE((pushed.cov - b.cov).cwiseAbs().maxCoeff(), 1e-9 * std::max(1.0, b.cov.norm()));
    const double d2 = bures_distance_squared(a, b);
    ASSERT_NEAR(d2, map_cost(a, t), 1e-9 * std::max(1.0, d2));
    ASSERT_NEAR(d2, bures_distance_squared(b, a), 1e-9 * std::max(1.0, d2));
  }
}

// Distances are dominated by the tangent-space distance at a fixed reference,
// with equality when one argument is the reference.
TEST(Bures, TangentInequalityAtReference) {
  GaussianBures space(2);
  Rng rng = make_rng(23);
  const GaussianPoint ref = space.sample(rng);
  for (int i = 0; i < 1000; ++i) {
    const GaussianPoint a = space.sample(rng), b = space.sample(rng);
    const auto u = log_map(space, ref, a);
    const auto v = log_map(space, ref, b);
    ASSERT_LE(space.distance(a, b), tangent_distance(space, u, v) + 1e-9);
    const auto o = log_map(space, ref, ref);
    ASSERT_NEAR(tangent_distance(space, o, v), space.distance(ref, b), 1e-9);
  }
}

TEST(Bures, ExtensionLimitRule) {
  GaussianBures g(1);
  EXPECT_NEAR(g.extension_limit(gauss1(0, 1), gauss1(0, 0.25)), 1.0, 1e-12);
  EXPECT_TRUE(std::isinf(g.extension_limit(gauss1(0, 1), gauss1(0, 4))));
}

TEST(Wasserstein1D, Examples) {
  Wasserstein1D w(3);
  EXPECT_DOUBLE_EQ(w.distance(Wasserstein1D::dirac(3, 0), Wasserstein1D::dirac(3, 2)), 2.0);
  const Vector a = Vector::LinSpaced(3, -1, 1);
  EXPECT_EQ(w.distance(a, a), 0.0);
  Wasserstein1D w2(2);
  Vector u(2), v(2);
  u << 0, 1;
  v << 1, 2;
  EXPECT_DOUBLE_EQ(w2.distance(u, v), 1.0);
}

TEST(Wasserstein1D, GridMismatch) {
  Wasserstein1D w(3);
  try {
    (void)w.distance(Wasserstein1D::dirac(3, 0), Wasserstein1D::dirac(4, 0));
    FAIL();
  } catch (const Error& err) {
    EXPECT_EQ(err.code(), Errc::grid_mismatch);
  }
  try {
    Vector q(3);
    q << 0, 2, 1;
    w.validate(q);
    FAIL();
  } catch (const Error& err) {
    EXPECT_EQ(err.code(), Errc::invalid_point);
  }
}

TEST(Wasserstein1D, ExtensionKeepsQuantilesMonotone) {
  Wasserstein1D w(5);
  Rng rng = make_rng(29);
  for (int i = 0; i < 200; ++i) {
    const Vector p = w.sample(rng), x = w.sample(rng);
    const double lam = w.extension_limit(p, x);
    if (std::isinf(lam)) continue;
    EXPECT_NO_THROW(w.validate(w.extend(p, x, 1.0 + lam * (1 - 1e-9))));
    EXPECT_THROW(w.validate(w.extend(p, x, 1.0 + lam * 1.01 + 1e-9)), Error);
  }
}

TEST(Spider, Examples) {
  SpiderTree t(4);
  EXPECT_DOUBLE_EQ(t.distance({1, 2.0}, {1, 0.5}), 1.5);
  EXPECT_DOUBLE_EQ(t.distance({1, 1.0}, {3, 2.0}), 3.0);
  EXPECT_DOUBLE_EQ(t.distance({2, 1.7}, {0, 0.0}), 1.7);
}

TEST(Spider, TriangleInequalityExact) {
  SpiderTree t(5);
  Rng rng = make_rng(31);
  for (int i = 0; i < 10000; ++i) {
    const auto a = t.sample(rng), b = t.sample(rng), c = t.sample(rng);
    ASSERT_LE(t.distance(a, c), t.distance(a, b) + t.distance(b, c) + 1e-15);
  }
}

TEST(Spider, ExtendThroughOrigin) {
  SpiderTree t(3);
  const SpiderPoint p{0, 1.0}, x{0, 0.5};
  const SpiderPoint e = t.extend(p, x, 3.0);
  EXPECT_EQ(e.ray, 1);
  EXPECT_DOUBLE_EQ(e.radius, 0.5);
  EXPECT_DOUBLE_EQ(t.distance(p, e), 1.5);
  EXPECT_TRUE(std::isinf(t.extension_limit(p, x)));
  SpiderTree bounded(3, 2.0);
  EXPECT_DOUBLE_EQ(bounded.extension_limit({0, 0.0}, {1, 1.0}), 1.0);
}

TEST(Sphere, ExtensionLimit) {
  Sphere s(3);
  EXPECT_NEAR(s.extension_limit(Vector::Unit(3, 2), Vector::Unit(3, 0)), 1.0, 1e-15);
  const Vector p = Sphere::from_spherical(0, 0), x = Sphere::from_spherical(pi / 4, 0.3);
  EXPECT_NEAR(s.distance(p, s.extend(p, x, 2.0)), pi / 2, 1e-12);
  try {
    (void)s.extension_limit(Vector::Unit(3, 2), -Vector::Unit(3, 2));
    FAIL();
  } catch (const Error& err) {
    EXPECT_EQ(err.code(), Errc::non_unique_geodesic);
  }
}

TEST(Sphere, ValidateRejectsNonUnit) {
  Sphere s(3);
  EXPECT_THROW(s.validate(Vector::Constant(3, 1.0)), Error);
  EXPECT_NO_THROW(s.validate(Sphere::from_spherical(1.0, 2.0)));
}

TEST(Euclidean, ExtensionIsUnbounded) {
  Euclidean e(2);
  EXPECT_TRUE(std::isinf(e.extension_limit(Vector::Zero(2), Vector::Ones(2))));
}
