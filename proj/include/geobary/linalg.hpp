#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <string>

#include "geobary/error.hpp"

namespace geobary {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

inline constexpr double kSpectralFloor = 1e-12;
inline constexpr double kSymmetryTol = 1e-12;

inline Matrix symmetrize(const Matrix& a) { return 0.5 * (a + a.transpose()); }

/// Throws NonSPD unless `a` is square, symmetric within 1e-12 and has
/// smallest eigenvalue above the spectral floor.
inline void check_spd(const Matrix& a, const char* what = "matrix") {
  require(a.rows() == a.cols(), Errc::non_spd, std::string(what) + " is not square");
  const double asym = (a - a.transpose()).cwiseAbs().maxCoeff();
  require(asym <= kSymmetryTol * std::max(1.0, a.cwiseAbs().maxCoeff()), Errc::non_spd,
          std::string(what) + " is not symmetric");
  Eigen::SelfAdjointEigenSolver<Matrix> es(symmetrize(a), Eigen::EigenvaluesOnly);
  require(es.eigenvalues().minCoeff() > kSpectralFloor, Errc::non_spd,
          std::string(what) + " has an eigenvalue below the spectral floor");
}

/// Spectral function of a symmetric matrix, f applied to the eigenvalues.
template <class F>
Matrix spectral_apply(const Matrix& a, F f) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(symmetrize(a));
  const Vector ev = es.eigenvalues().unaryExpr(f);
  return es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().transpose();
}

/// Square root of a symmetric positive semidefinite matrix. Eigenvalues below
/// -floor are rejected; those in [-floor, 0) are treated as zero.
inline Matrix sqrtm_psd(const Matrix& a) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(symmetrize(a));
  require(es.eigenvalues().minCoeff() > -kSpectralFloor, Errc::non_spd,
          "square root of an indefinite matrix");
  const Vector ev = es.eigenvalues().unaryExpr([](double x) { return std::sqrt(std::max(x, 0.0)); });
  return symmetrize(es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().transpose());
}

inline Matrix inv_sqrtm_spd(const Matrix& a) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(symmetrize(a));
  require(es.eigenvalues().minCoeff() > kSpectralFloor, Errc::non_spd,
          "inverse square root below the spectral floor");
  const Vector ev = es.eigenvalues().unaryExpr([](double x) { return 1.0 / std::sqrt(x); });
  return symmetrize(es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().transpose());
}

inline double min_eigenvalue(const Matrix& a) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(symmetrize(a), Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

}  // namespace geobary
