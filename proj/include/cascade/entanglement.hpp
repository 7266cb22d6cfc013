#pragma once

// Gaussian entanglement analysis: reductions, logarithmic negativity,
// symplectic spectra, partial transposes and PPT negativity witnesses.
//
// With vacuum variance 1/2 the separability boundary of the two-mode
// measure sits at 2 zeta = 1, and physical symplectic eigenvalues are
// >= 1/2.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "cascade/linalg.hpp"
#include "cascade/lyapunov.hpp"

namespace cascade {

/// Principal submatrix over a mode subset, rows/columns in layout order.
inline CovarianceMatrix reduce(const CovarianceMatrix& sigma,
                               std::vector<std::size_t> modes) {
  std::sort(modes.begin(), modes.end());
  if (std::adjacent_find(modes.begin(), modes.end()) != modes.end())
    throw ConfigError("reduce: duplicate mode in subset");
  for (std::size_t m : modes)
    if (m >= sigma.layout.mode_count())
      throw ConfigError("reduce: unknown mode index " + std::to_string(m));

  const Eigen::Index dim = static_cast<Eigen::Index>(2 * modes.size());
  MatrixXd out(dim, dim);
  for (std::size_t r = 0; r < modes.size(); ++r)
    for (std::size_t c = 0; c < modes.size(); ++c)
      out.block<2, 2>(2 * r, 2 * c) =
          sigma.matrix.block<2, 2>(sigma.layout.x_index(modes[r]), sigma.layout.x_index(modes[c]));
  return {std::move(out), sigma.layout.subset(modes)};
}

struct LogNegativity {
  double e = 0;     // max(0, -ln 2 zeta)
  double zeta = 0;  // smallest symplectic eigenvalue of the partial transpose
};

/// Two-mode logarithmic negativity from the 2x2 block structure
/// sigma = [[s1, s3], [s3^T, s2]]:
///   zeta = 2^{-1/2} sqrt(S - sqrt(S^2 - 4 det sigma)),
///   S = det s1 + det s2 - 2 det s3.
inline LogNegativity log_negativity(const CovarianceMatrix& sigma) {
  if (sigma.layout.mode_count() != 2)
    throw ConfigError("log_negativity: expected a two-mode covariance");
  const auto& m = sigma.matrix;
  const double det1 = m.block<2, 2>(0, 0).determinant();
  const double det2 = m.block<2, 2>(2, 2).determinant();
  const double det3 = m.block<2, 2>(0, 2).determinant();
  const double big_sigma = det1 + det2 - 2.0 * det3;
  const double det_full = m.determinant();

  const double scale = std::max(1.0, big_sigma * big_sigma);
  double inner = big_sigma * big_sigma - 4.0 * det_full;
  if (inner < 0) {
    if (inner < -1e-10 * scale)
      throw NumericalError("log_negativity: non-physical covariance (inner radicand " +
                           std::to_string(inner) + ")");
    inner = 0;
  }
  double outer = big_sigma - std::sqrt(inner);
  if (outer < 0) {
    if (outer < -1e-10 * std::max(1.0, std::abs(big_sigma)))
      throw NumericalError("log_negativity: non-physical covariance (outer radicand)");
    outer = 0;
  }
  LogNegativity out;
  out.zeta = std::sqrt(0.5 * outer);
  if (!(out.zeta > 0))
    throw NumericalError("log_negativity: degenerate covariance, zeta = 0");
  out.e = std::max(0.0, -std::log(2.0 * out.zeta));
  return out;
}

/// Symplectic spectrum of sigma, ascending: the M moduli of the eigenvalues
/// of i Omega sigma, computed through the Hermitian similarity
/// i sigma^{1/2} Omega sigma^{1/2}.
inline std::vector<double> symplectic_eigenvalues(const CovarianceMatrix& sigma) {
  const Eigen::Index n_modes = static_cast<Eigen::Index>(sigma.layout.mode_count());
  const MatrixXd root = psd_sqrt(sigma.matrix);
  const MatrixXd k = root * symplectic_form(n_modes) * root;
  MatrixXcd herm = std::complex<double>(0.0, 1.0) * k.cast<std::complex<double>>();
  Eigen::SelfAdjointEigenSolver<MatrixXcd> es(herm);
  if (es.info() != Eigen::Success)
    throw NumericalError("symplectic_eigenvalues: eigensolver failed");
  // The spectrum comes in +/- pairs; keep the positive half.
  std::vector<double> out;
  out.reserve(n_modes);
  for (Eigen::Index i = n_modes; i < 2 * n_modes; ++i) out.push_back(es.eigenvalues()(i));
  std::sort(out.begin(), out.end());
  return out;
}

/// Momentum-sign flip P sigma P with P = diag(..., 1, -1, ...) on every mode
/// of the subset. Produces the covariance of the partially transposed state.
inline CovarianceMatrix partial_transpose(const CovarianceMatrix& sigma,
                                          const std::vector<std::size_t>& modes) {
  for (std::size_t m : modes)
    if (m >= sigma.layout.mode_count())
      throw ConfigError("partial_transpose: unknown mode index " + std::to_string(m));
  CovarianceMatrix out = sigma;
  for (std::size_t m : modes) {
    const Eigen::Index y = sigma.layout.y_index(m);
    out.matrix.row(y) *= -1.0;
    out.matrix.col(y) *= -1.0;
  }
  return out;
}

/// Negative eigenvalues (ascending) of PT_l(sigma) + (i/2) Omega: a
/// nonempty list witnesses entanglement across the l | rest bipartition.
inline std::vector<double> ppt_negativity_eigenvalues(const CovarianceMatrix& sigma,
                                                      std::size_t transposed_mode) {
  if (sigma.layout.mode_count() < 2)
    throw ConfigError("ppt_negativity_eigenvalues: need at least two modes");
  const CovarianceMatrix pt = partial_transpose(sigma, {transposed_mode});
  const VectorXd spectrum = heisenberg_spectrum(pt.matrix);
  const double tol = 1e-10 * std::max(1.0, sigma.matrix.cwiseAbs().maxCoeff());
  std::vector<double> out;
  for (Eigen::Index i = 0; i < spectrum.size(); ++i)
    if (spectrum(i) < -tol) out.push_back(spectrum(i));
  return out;
}

struct MultipartiteReport {
  bool genuine = false;
  // Negative PPT eigenvalues per transposed mode, in mode order.
  std::vector<std::vector<double>> witnesses;
};

/// Fully inseparable (genuine) multipartite entanglement: every single-mode
/// bipartition must carry at least one negative PPT eigenvalue.
inline MultipartiteReport classify_genuine_multipartite(const CovarianceMatrix& sigma) {
  MultipartiteReport out;
  out.genuine = sigma.layout.mode_count() >= 2;
  for (std::size_t l = 0; l < sigma.layout.mode_count(); ++l) {
    out.witnesses.push_back(ppt_negativity_eigenvalues(sigma, l));
    if (out.witnesses.back().empty()) out.genuine = false;
  }
  return out;
}

struct PairEntanglement {
  std::size_t mode_i = 0;  // indices into the analyzed layout
  std::size_t mode_j = 0;
  double log_neg = 0;
  double zeta = 0;
};

/// Full entanglement analysis of one covariance matrix, treating each mode
/// of its layout as a party.
struct EntanglementReport {
  std::vector<std::string> mode_labels;
  std::vector<PairEntanglement> pairs;             // all i < j
  std::vector<double> symplectic_spectrum;         // ascending
  std::vector<std::vector<double>> ppt_witnesses;  // per transposed mode
  bool genuine_multipartite = false;

  const PairEntanglement& pair(std::size_t i, std::size_t j) const {
    for (const auto& p : pairs)
      if ((p.mode_i == i && p.mode_j == j) || (p.mode_i == j && p.mode_j == i)) return p;
    throw ConfigError("EntanglementReport: no such pair");
  }
};

inline EntanglementReport analyze(const CovarianceMatrix& sigma) {
  EntanglementReport report;
  const std::size_t n = sigma.layout.mode_count();
  for (const Mode& m : sigma.layout.modes()) report.mode_labels.push_back(m.label());
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      const LogNegativity ln = log_negativity(reduce(sigma, {i, j}));
      report.pairs.push_back({i, j, ln.e, ln.zeta});
    }
  report.symplectic_spectrum = symplectic_eigenvalues(sigma);
  if (n >= 2) {
    const MultipartiteReport multi = classify_genuine_multipartite(sigma);
    report.ppt_witnesses = multi.witnesses;
    report.genuine_multipartite = multi.genuine;
  }
  return report;
}

}  // namespace cascade
