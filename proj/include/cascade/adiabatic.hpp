#pragma once

// Bad-cavity-limit model: with kappa dominating, the cavity modes follow the
// mechanics adiabatically and each oscillator couples to an effective
// broadband two-mode-squeezed reservoir. Everything here is closed-form or a
// small mechanical-only Lyapunov solve.

#include <cmath>
#include <cstddef>
#include <limits>

#include "cascade/lyapunov.hpp"

namespace cascade {

/// Effective reservoir parameters seen by the mechanics once the cavity
/// modes are eliminated. Requires the damping side to dominate: g2 > g1.
struct AdiabaticRates {
  double gamma_tilde = 0;  // net optomechanical damping (g2^2 - g1^2)/kappa
  double n_m = 0;          // reservoir occupation g1^2/(g2^2 - g1^2)
  double m_m = 0;          // reservoir cross correlation sqrt(n_m (n_m + 1))
  double squeezing = 0;    // r = atanh(g1/g2)
};

inline AdiabaticRates effective_rates(double g1, double g2, double kappa) {
  if (!(g1 >= 0) || !(g2 > g1))
    throw ConfigError("effective_rates: requires g2 > g1 >= 0 (no stable adiabatic model)");
  if (!(kappa > 0)) throw ConfigError("effective_rates: kappa must be > 0");
  AdiabaticRates out;
  out.gamma_tilde = (g2 * g2 - g1 * g1) / kappa;
  out.n_m = g1 * g1 / (g2 * g2 - g1 * g1);
  out.m_m = std::sqrt(out.n_m * (out.n_m + 1.0));
  out.squeezing = std::atanh(g1 / g2);
  return out;
}

struct AnalyticZeta {
  double zeta = 0;
  double log_neg = 0;
};

/// Closed-form two-mode entanglement parameter of the adiabatic model:
/// zeta = 1/2 - [g1 (g2 - g1) - kappa gamma_m n_th] / (kappa gamma_m + g2^2 - g1^2).
inline AnalyticZeta zeta12_analytic(double g1, double g2, double kappa, double gamma_m,
                                    double n_th) {
  if (!(g2 > g1) || g1 < 0) throw ConfigError("zeta12_analytic: requires g2 > g1 >= 0");
  if (!(kappa > 0) || gamma_m < 0 || n_th < 0)
    throw ConfigError("zeta12_analytic: rates must be non-negative, kappa > 0");
  AnalyticZeta out;
  out.zeta = 0.5 - (g1 * (g2 - g1) - kappa * gamma_m * n_th) /
                       (kappa * gamma_m + g2 * g2 - g1 * g1);
  out.log_neg = out.zeta > 0 ? std::max(0.0, -std::log(2.0 * out.zeta)) : 0.0;
  return out;
}

/// Largest thermal occupation with surviving entanglement:
/// n_max = g1 g2 (1 - g1/g2) / (kappa gamma_m). Infinite for gamma_m = 0.
inline double thermal_threshold(double g1, double g2, double kappa, double gamma_m) {
  if (!(g2 > g1) || g1 < 0) throw ConfigError("thermal_threshold: requires g2 > g1 >= 0");
  if (!(kappa > 0) || gamma_m < 0) throw ConfigError("thermal_threshold: bad rates");
  if (gamma_m == 0) return std::numeric_limits<double>::infinity();
  return g1 * g2 * (1.0 - g1 / g2) / (kappa * gamma_m);
}

struct SteadyOccupations {
  double phonons = 0;  // <c^dag c> per oscillator
  double cross = 0;    // <c_1 c_2>
};

inline SteadyOccupations steady_occupations(double g1, double g2, double kappa, double gamma_m,
                                            double n_th) {
  const AdiabaticRates rates = effective_rates(g1, g2, kappa);
  if (gamma_m < 0 || n_th < 0) throw ConfigError("steady_occupations: bad rates");
  const double total = gamma_m + rates.gamma_tilde;
  if (!(total > 0)) throw ConfigError("steady_occupations: no damping at all");
  SteadyOccupations out;
  out.phonons = (gamma_m * n_th + rates.gamma_tilde * rates.n_m) / total;
  out.cross = rates.gamma_tilde * rates.m_m / total;
  return out;
}

/// Steady mechanical covariance of the reduced N-oscillator model: diagonal
/// relaxation at gamma_m + gamma_tilde, incoherent -2 gamma_tilde coupling
/// from every earlier same-parity oscillator, and reservoir noise that is
/// identical (fully correlated) within each parity class.
inline CovarianceMatrix adiabatic_chain_covariance(std::size_t n, double g1, double g2,
                                                   double kappa, double gamma_m, double n_th) {
  if (n < 1) throw ConfigError("adiabatic_chain_covariance: need n >= 1");
  const AdiabaticRates rates = effective_rates(g1, g2, kappa);
  if (gamma_m < 0 || n_th < 0) throw ConfigError("adiabatic_chain_covariance: bad rates");

  const ModeLayout layout = ModeLayout::mechanical(n);
  const Eigen::Index dim = layout.dim();
  MatrixXd a = MatrixXd::Zero(dim, dim);
  MatrixXd d = MatrixXd::Zero(dim, dim);

  const double gt = rates.gamma_tilde;
  for (std::size_t j = 0; j < n; ++j) {
    a.block<2, 2>(2 * j, 2 * j) = -(gamma_m + gt) * Eigen::Matrix2d::Identity();
    for (std::size_t s = j % 2; s < j; s += 2)
      a.block<2, 2>(2 * j, 2 * s) = -2.0 * gt * Eigen::Matrix2d::Identity();

    for (std::size_t k = 0; k < n; ++k) {
      Eigen::Matrix2d block = Eigen::Matrix2d::Zero();
      if ((j % 2) == (k % 2)) {
        // Shared reservoir operator within a parity class.
        block = gt * (2.0 * rates.n_m + 1.0) * Eigen::Matrix2d::Identity();
        if (j == k) block += gamma_m * (2.0 * n_th + 1.0) * Eigen::Matrix2d::Identity();
      } else {
        block << 2.0 * gt * rates.m_m, 0.0, 0.0, -2.0 * gt * rates.m_m;
      }
      d.block<2, 2>(2 * j, 2 * k) = block;
    }
  }

  const double abscissa = spectral_abscissa(a);
  if (!(abscissa < 0))
    throw InstabilityError("adiabatic_chain_covariance: reduced drift unstable");
  return {solve_lyapunov(a, d), layout};
}

}  // namespace cascade
