#pragma once

// Monte Carlo verification path. The symmetrized moments of the linear
// quantum dynamics obey the classical SDE
//     d chi = A chi dt + B dW,   B B^T = D,
// with D the symmetrized noise matrix of the Langevin equations, so an
// ensemble of Euler-Maruyama trajectories estimates the same stationary
// covariance the Lyapunov solver produces.

#include <Eigen/Dense>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <random>
#include <thread>
#include <vector>

#include "cascade/linalg.hpp"
#include "cascade/lyapunov.hpp"
#include "cascade/network.hpp"

namespace cascade {

struct TrajectoryConfig {
  double dt = 0;           // seconds; 0 -> 0.01 / ||A||_2
  double burn_in = 0;      // seconds; 0 -> 10 slowest decay times
  double sample_time = 0;  // seconds; 0 -> 20 slowest decay times
  std::size_t trajectories = 2000;
  std::uint64_t seed = 1;
  std::size_t stride = 0;  // accumulation stride in steps; 0 -> auto
};

struct CovarianceEstimate {
  MatrixXd mean;
  MatrixXd std_error;            // per-entry standard error across trajectories
  double effective_samples = 0;  // independent units = trajectories
  std::size_t samples_per_trajectory = 0;
  ModeLayout layout;
};

namespace detail {

inline std::mt19937_64 trajectory_rng(std::uint64_t base_seed, std::uint64_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(base_seed), static_cast<std::uint32_t>(base_seed >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
  return std::mt19937_64(seq);
}

/// Runs fn(i) for i in [0, count) on `workers` threads. Work items are
/// independent; any exception is rethrown on the caller.
template <typename Fn>
inline void parallel_for(std::size_t count, unsigned workers, Fn&& fn) {
  workers = std::max(1u, workers);
  if (workers == 1 || count <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(workers);
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (std::size_t i = next.fetch_add(1); i < count; i = next.fetch_add(1)) fn(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace detail

/// Estimates the stationary covariance by an across-trajectory average of
/// within-trajectory second moments. Per-trajectory streams are seeded from
/// (seed, trajectory index), and the final reduction runs in trajectory
/// order, so the result is bit-identical for any worker count.
inline CovarianceEstimate simulate_trajectories(const DriftMatrix& drift,
                                                const DiffusionMatrix& diffusion,
                                                TrajectoryConfig tc, unsigned workers = 1) {
  const MatrixXd& a = drift.matrix;
  const Eigen::Index dim = a.rows();
  if (diffusion.matrix.rows() != dim)
    throw ConfigError("simulate_trajectories: drift/diffusion dimension mismatch");
  if (tc.trajectories < 1) throw ConfigError("simulate_trajectories: need >= 1 trajectory");

  const double abscissa = stability(drift);
  if (!(abscissa < -stability_margin(drift)))
    throw InstabilityError("simulate_trajectories: drift is not stable");
  const double slowest = -1.0 / abscissa;  // slowest decay time

  const double a_norm = spectral_norm(a);
  if (tc.dt <= 0) tc.dt = 0.01 / a_norm;
  if (tc.dt * a_norm > 0.05)
    throw ConfigError("simulate_trajectories: dt ||A||_2 exceeds 0.05");
  if (tc.burn_in <= 0) tc.burn_in = 10.0 * slowest;
  if (tc.sample_time <= 0) tc.sample_time = 20.0 * slowest;
  if (tc.stride == 0)
    tc.stride = std::max<std::size_t>(1, static_cast<std::size_t>(std::lround(0.1 * slowest / tc.dt)));

  const std::size_t burn_steps = static_cast<std::size_t>(std::ceil(tc.burn_in / tc.dt));
  const std::size_t sample_steps = static_cast<std::size_t>(std::ceil(tc.sample_time / tc.dt));
  const std::size_t n_samples = 1 + (sample_steps - 1) / tc.stride;

  // B B^T = D through a symmetric PSD factorization; D may be numerically
  // semi-definite, eigenvalues below -1e-9 ||D|| are a hard error.
  const MatrixXd noise_gain = psd_sqrt(diffusion.matrix) * std::sqrt(tc.dt);
  const MatrixXd step_gain = MatrixXd::Identity(dim, dim) + tc.dt * a;

  std::vector<MatrixXd> per_trajectory(tc.trajectories);
  detail::parallel_for(tc.trajectories, workers, [&](std::size_t t) {
    std::mt19937_64 rng = detail::trajectory_rng(tc.seed, t);
    std::normal_distribution<double> normal(0.0, 1.0);
    VectorXd chi = VectorXd::Zero(dim);
    VectorXd xi(dim);
    MatrixXd acc = MatrixXd::Zero(dim, dim);
    std::size_t collected = 0;
    for (std::size_t k = 0; k < burn_steps + sample_steps; ++k) {
      for (Eigen::Index i = 0; i < dim; ++i) xi(i) = normal(rng);
      chi = step_gain * chi + noise_gain * xi;
      if (k >= burn_steps && (k - burn_steps) % tc.stride == 0) {
        if (!chi.allFinite())
          throw NumericalError("simulate_trajectories: instability detected mid-run");
        acc.noalias() += chi * chi.transpose();
        ++collected;
      }
    }
    per_trajectory[t] = acc / static_cast<double>(collected);
  });

  CovarianceEstimate est;
  est.layout = drift.layout;
  est.samples_per_trajectory = n_samples;
  est.effective_samples = static_cast<double>(tc.trajectories);

  est.mean = MatrixXd::Zero(dim, dim);
  for (const MatrixXd& m : per_trajectory) est.mean += m;  // fixed order
  est.mean /= static_cast<double>(tc.trajectories);
  symmetrize(est.mean);

  est.std_error = MatrixXd::Zero(dim, dim);
  if (tc.trajectories > 1) {
    for (const MatrixXd& m : per_trajectory) {
      const MatrixXd dev = m - est.mean;
      est.std_error += dev.cwiseProduct(dev);
    }
    const double n = static_cast<double>(tc.trajectories);
    est.std_error = (est.std_error / (n * (n - 1.0))).cwiseSqrt();
  }
  return est;
}

struct ComparisonReport {
  MatrixXd z;  // (estimate - reference) / standard error, entrywise
  double max_abs_z = 0;
  bool pass(double threshold = 4.0) const { return max_abs_z <= threshold; }
};

inline ComparisonReport compare(const CovarianceEstimate& est, const CovarianceMatrix& sigma) {
  if (est.mean.rows() != sigma.matrix.rows())
    throw ConfigError("compare: layout mismatch between estimate and covariance");
  ComparisonReport report;
  report.z = MatrixXd::Zero(est.mean.rows(), est.mean.cols());
  for (Eigen::Index i = 0; i < est.mean.rows(); ++i)
    for (Eigen::Index j = 0; j < est.mean.cols(); ++j) {
      const double diff = est.mean(i, j) - sigma.matrix(i, j);
      const double se = est.std_error(i, j);
      if (se <= 0) {
        if (diff == 0) continue;
        throw NumericalError("compare: zero standard error with nonzero deviation at (" +
                             std::to_string(i) + ", " + std::to_string(j) + ")");
      }
      report.z(i, j) = diff / se;
    }
  report.max_abs_z = report.z.cwiseAbs().maxCoeff();
  return report;
}

}  // namespace cascade
