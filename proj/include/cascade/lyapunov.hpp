#pragma once

// Steady-state Lyapunov solver A sigma + sigma A^T = -D and the transient
// second-moment ODE d sigma/dt = A sigma + sigma A^T + D.

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <cmath>
#include <utility>
#include <vector>

#include "cascade/linalg.hpp"
#include "cascade/network.hpp"

namespace cascade {

/// Symmetrized second moments sigma_ij = <chi_i chi_j + chi_j chi_i>/2 over
/// the modes of `layout`.
struct CovarianceMatrix {
  MatrixXd matrix;
  ModeLayout layout;
};

/// Smallest eigenvalue of sigma + (i/2) Omega. Physical states have this
/// >= 0 up to round-off.
inline double min_physicality_eigenvalue(const MatrixXd& sigma) {
  return heisenberg_spectrum(sigma).minCoeff();
}

inline bool is_physical(const MatrixXd& sigma, double tol = 1e-8) {
  return min_physicality_eigenvalue(sigma) >= -tol;
}

/// Frobenius norm of A sigma + sigma A^T + D together with the acceptance
/// bound 1e-10 (||A||_F ||sigma||_F + ||D||_F).
struct LyapunovResidual {
  double norm = 0;
  double bound = 0;
  bool ok() const { return norm <= bound; }
};

inline LyapunovResidual lyapunov_residual(const MatrixXd& a, const MatrixXd& sigma,
                                          const MatrixXd& d) {
  LyapunovResidual r;
  r.norm = (a * sigma + sigma * a.transpose() + d).norm();
  r.bound = 1e-10 * (a.norm() * sigma.norm() + d.norm());
  return r;
}

enum class LyapunovMethod {
  direct,  // vectorized (I (x) A + A (x) I) solve; fine through dim ~ 48
  schur,   // Bartels-Stewart on the real Schur form
};

namespace detail {

inline MatrixXd solve_lyapunov_direct(const MatrixXd& a, const MatrixXd& d) {
  const Eigen::Index n = a.rows();
  const MatrixXd id = MatrixXd::Identity(n, n);
  // vec(A sigma + sigma A^T) = (I (x) A + A (x) I) vec(sigma), column-major.
  MatrixXd system = kronecker(id, a) + kronecker(a, id);
  Eigen::VectorXd rhs = -Eigen::Map<const Eigen::VectorXd>(d.data(), n * n);
  Eigen::PartialPivLU<MatrixXd> lu(system);
  Eigen::VectorXd v = lu.solve(rhs);
  if (!v.allFinite()) throw NumericalError("lyapunov: singular vectorized system");
  return Eigen::Map<const MatrixXd>(v.data(), n, n);
}

// Diagonal 1x1/2x2 block starts of a real quasi-triangular Schur factor.
inline std::vector<std::pair<Eigen::Index, Eigen::Index>> schur_blocks(const MatrixXd& t) {
  std::vector<std::pair<Eigen::Index, Eigen::Index>> blocks;
  Eigen::Index i = 0;
  while (i < t.rows()) {
    const Eigen::Index size = (i + 1 < t.rows() && t(i + 1, i) != 0.0) ? 2 : 1;
    blocks.emplace_back(i, size);
    i += size;
  }
  return blocks;
}

/// Bartels-Stewart: reduce A to real Schur form and back-substitute over the
/// quasi-triangular diagonal blocks, each small Sylvester block solved by
/// vectorization (at most 4x4).
inline MatrixXd solve_lyapunov_schur(const MatrixXd& a, const MatrixXd& d) {
  Eigen::RealSchur<MatrixXd> schur(a);
  if (schur.info() != Eigen::Success) throw NumericalError("lyapunov: Schur decomposition failed");
  const MatrixXd& t = schur.matrixT();
  const MatrixXd& u = schur.matrixU();
  const MatrixXd c = u.transpose() * d * u;

  const auto blocks = schur_blocks(t);
  const Eigen::Index n = t.rows();
  MatrixXd y = MatrixXd::Zero(n, n);

  for (auto jb = blocks.rbegin(); jb != blocks.rend(); ++jb) {
    const auto [j0, nj] = *jb;
    for (auto ib = blocks.rbegin(); ib != blocks.rend(); ++ib) {
      const auto [i0, ni] = *ib;
      MatrixXd rhs = -c.block(i0, j0, ni, nj);
      // Contributions of already-solved blocks below (same column) and to
      // the right (same row).
      const Eigen::Index below = i0 + ni;
      if (below < n) rhs -= t.block(i0, below, ni, n - below) * y.block(below, j0, n - below, nj);
      const Eigen::Index right = j0 + nj;
      if (right < n)
        rhs -= y.block(i0, right, ni, n - right) * t.block(j0, right, nj, n - right).transpose();

      // T_ii Y + Y T_jj^T = rhs, vectorized into an (ni nj) x (ni nj) system.
      const MatrixXd small = kronecker(MatrixXd::Identity(nj, nj), t.block(i0, i0, ni, ni)) +
                             kronecker(t.block(j0, j0, nj, nj), MatrixXd::Identity(ni, ni));
      Eigen::Map<const Eigen::VectorXd> rhs_vec(rhs.data(), ni * nj);
      Eigen::VectorXd sol = Eigen::FullPivLU<MatrixXd>(small).solve(rhs_vec);
      if (!sol.allFinite()) throw NumericalError("lyapunov: singular Schur block");
      y.block(i0, j0, ni, nj) = Eigen::Map<const MatrixXd>(sol.data(), ni, nj);
    }
  }
  return u * y * u.transpose();
}

}  // namespace detail

/// Core solver on plain matrices; callers gate stability themselves.
inline MatrixXd solve_lyapunov(const MatrixXd& a, const MatrixXd& d,
                               LyapunovMethod method = LyapunovMethod::direct) {
  MatrixXd sigma = method == LyapunovMethod::direct ? detail::solve_lyapunov_direct(a, d)
                                                    : detail::solve_lyapunov_schur(a, d);
  symmetrize(sigma);
  const LyapunovResidual res = lyapunov_residual(a, sigma, d);
  if (!res.ok())
    throw NumericalError("lyapunov: residual " + std::to_string(res.norm) +
                         " exceeds bound " + std::to_string(res.bound));
  return sigma;
}

/// Steady-state covariance of a stable chain. Refuses unstable drift.
inline CovarianceMatrix solve_steady(const DriftMatrix& drift, const DiffusionMatrix& diffusion,
                                     LyapunovMethod method = LyapunovMethod::direct) {
  if (drift.matrix.rows() != diffusion.matrix.rows())
    throw ConfigError("solve_steady: drift/diffusion dimension mismatch");
  const double abscissa = stability(drift);
  if (!(abscissa < -stability_margin(drift)))
    throw InstabilityError("solve_steady: drift is not stable (spectral abscissa " +
                           std::to_string(abscissa) + ")");
  return {solve_lyapunov(drift.matrix, diffusion.matrix, method), drift.layout};
}

struct CovarianceTrajectory {
  std::vector<double> times;
  std::vector<MatrixXd> covariances;
  ModeLayout layout;

  const MatrixXd& final() const { return covariances.back(); }
};

/// Fixed-step classical Runge-Kutta integration of the moment ODE, with
/// symmetrization after every step. store_stride = 0 picks a stride that
/// keeps at most ~1000 snapshots.
inline CovarianceTrajectory evolve_covariance(const DriftMatrix& drift,
                                              const DiffusionMatrix& diffusion,
                                              const CovarianceMatrix& initial, double t_final,
                                              double dt, std::size_t store_stride = 0) {
  if (!(dt > 0)) throw ConfigError("evolve_covariance: dt must be > 0");
  if (!(t_final >= 0)) throw ConfigError("evolve_covariance: t_final must be >= 0");
  const auto& a = drift.matrix;
  const auto& d = diffusion.matrix;
  if (initial.matrix.rows() != a.rows())
    throw ConfigError("evolve_covariance: initial covariance dimension mismatch");

  const std::size_t n_steps = static_cast<std::size_t>(std::ceil(t_final / dt));
  if (store_stride == 0) store_stride = std::max<std::size_t>(1, n_steps / 1000);

  auto rhs = [&](const MatrixXd& s) { return MatrixXd(a * s + s * a.transpose() + d); };

  CovarianceTrajectory out;
  out.layout = drift.layout;
  MatrixXd sigma = initial.matrix;
  symmetrize(sigma);
  out.times.push_back(0.0);
  out.covariances.push_back(sigma);

  for (std::size_t k = 1; k <= n_steps; ++k) {
    const MatrixXd k1 = rhs(sigma);
    const MatrixXd k2 = rhs(sigma + 0.5 * dt * k1);
    const MatrixXd k3 = rhs(sigma + 0.5 * dt * k2);
    const MatrixXd k4 = rhs(sigma + dt * k3);
    sigma += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    symmetrize(sigma);
    if (!sigma.allFinite() || sigma.norm() > 1e150)
      throw NumericalError("evolve_covariance: divergence at t = " + std::to_string(k * dt) +
                           "; reduce dt");
    if (k % store_stride == 0 || k == n_steps) {
      out.times.push_back(k * dt);
      out.covariances.push_back(sigma);
    }
  }
  return out;
}

}  // namespace cascade
