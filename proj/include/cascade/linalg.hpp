#pragma once

// Small dense-linear-algebra helpers shared across the library.

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <complex>

#include "cascade/errors.hpp"

namespace cascade {

using Eigen::MatrixXcd;
using Eigen::MatrixXd;
using Eigen::VectorXd;

inline void symmetrize(MatrixXd& m) { m = ((m + m.transpose()) * 0.5).eval(); }

/// Symplectic form for n_modes modes in (x, y) pair ordering:
/// block-diagonal [[0, 1], [-1, 0]].
inline MatrixXd symplectic_form(Eigen::Index n_modes) {
  MatrixXd omega = MatrixXd::Zero(2 * n_modes, 2 * n_modes);
  for (Eigen::Index k = 0; k < n_modes; ++k) {
    omega(2 * k, 2 * k + 1) = 1.0;
    omega(2 * k + 1, 2 * k) = -1.0;
  }
  return omega;
}

inline double spectral_norm(const MatrixXd& a) {
  if (a.rows() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(a.transpose() * a);
  if (es.info() != Eigen::Success) throw NumericalError("spectral_norm: eigensolver failed");
  return std::sqrt(std::max(0.0, es.eigenvalues().maxCoeff()));
}

/// Largest real part over the spectrum of a real matrix.
inline double spectral_abscissa(const MatrixXd& a) {
  Eigen::EigenSolver<MatrixXd> es(a, /*computeEigenvectors=*/false);
  if (es.info() != Eigen::Success) throw NumericalError("spectral_abscissa: eigensolver failed");
  return es.eigenvalues().real().maxCoeff();
}

/// Symmetric PSD square root with clipping of slightly negative eigenvalues.
/// Eigenvalues below -tol_rel * max(1, ||m||) are a hard failure.
inline MatrixXd psd_sqrt(const MatrixXd& m, double tol_rel = 1e-9) {
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(m);
  if (es.info() != Eigen::Success) throw NumericalError("psd_sqrt: eigensolver failed");
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  VectorXd vals = es.eigenvalues();
  for (Eigen::Index i = 0; i < vals.size(); ++i) {
    if (vals(i) < -tol_rel * scale)
      throw NumericalError("psd_sqrt: matrix is not positive semidefinite");
    vals(i) = std::sqrt(std::max(0.0, vals(i)));
  }
  return es.eigenvectors() * vals.asDiagonal() * es.eigenvectors().transpose();
}

inline MatrixXd kronecker(const MatrixXd& a, const MatrixXd& b) {
  MatrixXd out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

/// Eigenvalues of the Hermitian matrix m + (i/2) Omega, ascending. This is
/// the physicality/PPT witness spectrum of a covariance-shaped matrix.
inline VectorXd heisenberg_spectrum(const MatrixXd& m) {
  const Eigen::Index n_modes = m.rows() / 2;
  const MatrixXd omega = symplectic_form(n_modes);
  MatrixXcd h = m.cast<std::complex<double>>();
  h += std::complex<double>(0.0, 0.5) * omega.cast<std::complex<double>>();
  Eigen::SelfAdjointEigenSolver<MatrixXcd> es(h);
  if (es.info() != Eigen::Success)
    throw NumericalError("heisenberg_spectrum: eigensolver failed");
  return es.eigenvalues();
}

}  // namespace cascade
