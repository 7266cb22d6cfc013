#pragma once

// Physical parameter model for chains of unidirectionally coupled
// optomechanical cavities: pump-to-coupling derivation, chain configuration,
// and validity diagnostics.
//
// Unit convention: configuration files carry ordinary frequencies f in Hz
// (rate / 2pi, as in figure captions); every value held in these structs is
// angular (rad/s). Only ratios of rates enter dimensionless outputs.

#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "cascade/errors.hpp"

namespace cascade {

inline constexpr double two_pi = 2.0 * std::numbers::pi;
inline constexpr double hbar = 1.054571817e-34;  // J s

/// Ordinary frequency in Hz -> angular rate in rad/s.
constexpr double hz(double f) { return two_pi * f; }
constexpr double to_hz(double w) { return w / two_pi; }

enum class Severity { info, warning, error };

struct Diagnostic {
  Severity severity = Severity::info;
  std::string code;     // stable machine-readable tag, e.g. "eta-range"
  std::string message;  // human-readable detail

  bool is_error() const { return severity == Severity::error; }
};

inline bool has_errors(const std::vector<Diagnostic>& diags) {
  for (const auto& d : diags)
    if (d.is_error()) return true;
  return false;
}

inline std::string severity_name(Severity s) {
  switch (s) {
    case Severity::info: return "INFO";
    case Severity::warning: return "WARN";
    default: return "ERROR";
  }
}

/// Laser drive of a single cavity mode coupled to one mechanical mode.
/// All rates and frequencies angular (rad/s); power in watts, length in
/// meters, mass in kilograms.
struct PumpParams {
  double power = 0;      // pump power P (W)
  double kappa_in = 0;   // input-mirror loss rate
  double nu = 0;         // pump frequency
  double omega_c = 0;    // cavity resonance frequency
  double length = 0;     // cavity length (m)
  double mass = 0;       // effective mechanical mass (kg)
  double omega_m = 0;    // mechanical frequency
  double gamma_m = 0;    // mechanical damping rate
  double kappa = 0;      // output-mirror loss rate

  double detuning() const { return omega_c - nu; }  // bare detuning

  /// Single-photon optomechanical coupling sqrt(hbar / (m omega_m)) omega_c / L.
  double single_photon_coupling() const {
    return std::sqrt(hbar / (mass * omega_m)) * omega_c / length;
  }

  /// Drive amplitude |E| = sqrt(2 P kappa_in / (hbar nu)).
  double drive_amplitude() const {
    return std::sqrt(2.0 * power * kappa_in / (hbar * nu));
  }
};

inline std::vector<Diagnostic> validate(const PumpParams& p) {
  std::vector<Diagnostic> out;
  auto positive = [&](double v, const char* name) {
    if (!(v > 0) || !std::isfinite(v))
      out.push_back({Severity::error, "pump-positive",
                     std::string(name) + " must be positive and finite"});
  };
  positive(p.kappa_in, "kappa_in");
  positive(p.nu, "nu");
  positive(p.omega_c, "omega_c");
  positive(p.length, "length");
  positive(p.mass, "mass");
  positive(p.omega_m, "omega_m");
  positive(p.kappa, "kappa");
  if (p.power < 0 || !std::isfinite(p.power))
    out.push_back({Severity::error, "pump-positive", "power must be >= 0 and finite"});
  if (p.gamma_m < 0 || !std::isfinite(p.gamma_m))
    out.push_back({Severity::error, "pump-positive", "gamma_m must be >= 0 and finite"});
  // Input-mirror losses are dropped from the dynamics; that is only justified
  // when the output mirror dominates.
  if (p.kappa > 0 && p.kappa_in > 0 && p.kappa < 10.0 * p.kappa_in)
    out.push_back({Severity::warning, "pump-kappa-in",
                   "kappa is not >> kappa_in; neglecting input-mirror loss is inaccurate"});
  return out;
}

/// Self-consistent classical operating point of a driven cavity mode.
struct ClassicalSteadyState {
  std::complex<double> cavity_amplitude;      // zbar
  std::complex<double> mechanical_amplitude;  // cbar
  double detuning = 0;     // shifted detuning Delta = delta + 2 g~ Re(cbar)
  double coupling = 0;     // effective coupling g = |zbar| g~
  double residual = 0;     // fixed-point residual, relative
  int iterations = 0;
};

/// Solves the classical fixed point
///   zbar = E / (kappa + i Delta),  cbar = g~ |zbar|^2 / (omega_m + i gamma_m),
///   Delta = delta + 2 g~ Re(cbar)
/// by damped Picard iteration (damping 0.5). Non-convergence signals a
/// bistable or ill-conditioned operating point.
inline ClassicalSteadyState effective_coupling(const PumpParams& pump,
                                               double tolerance = 1e-12,
                                               int max_iterations = 1000) {
  if (!(tolerance > 0)) throw ConfigError("effective_coupling: tolerance must be > 0");
  auto diags = validate(pump);
  if (has_errors(diags)) {
    std::string msg = "effective_coupling: invalid pump parameters:";
    for (const auto& d : diags)
      if (d.is_error()) msg += " " + d.message + ";";
    throw ConfigError(msg);
  }

  const double g0 = pump.single_photon_coupling();
  const double amp = pump.drive_amplitude();
  const double delta = pump.detuning();
  const double mech_denom2 = pump.omega_m * pump.omega_m + pump.gamma_m * pump.gamma_m;
  if (mech_denom2 == 0) throw ConfigError("effective_coupling: omega_m + i gamma_m is zero");

  const std::complex<double> mech_denom(pump.omega_m, pump.gamma_m);
  auto cavity_amp = [&](double shifted) {
    const std::complex<double> denom(pump.kappa, shifted);
    if (std::norm(denom) == 0)
      throw ConfigError("effective_coupling: kappa + i Delta is zero");
    return amp / denom;
  };
  auto next = [&](std::complex<double> c) {
    const double shifted = delta + 2.0 * g0 * c.real();
    const std::complex<double> z = cavity_amp(shifted);
    return g0 * std::norm(z) / mech_denom;
  };

  std::complex<double> c(0.0, 0.0);
  const double damping = 0.5;
  int iter = 0;
  for (; iter < max_iterations; ++iter) {
    const std::complex<double> f = next(c);
    const std::complex<double> updated = (1.0 - damping) * c + damping * f;
    const double step = std::abs(updated - c) / std::max(1.0, std::abs(updated));
    c = updated;
    if (step <= tolerance) break;
  }
  const double residual = std::abs(c - next(c)) / std::max(1.0, std::abs(c));
  if (residual > tolerance)
    throw NumericalError("effective_coupling: no convergence after " +
                         std::to_string(max_iterations) +
                         " iterations (residual " + std::to_string(residual) + ")");

  ClassicalSteadyState out;
  out.detuning = delta + 2.0 * g0 * c.real();
  out.cavity_amplitude = cavity_amp(out.detuning);
  out.mechanical_amplitude = c;
  out.coupling = std::abs(out.cavity_amplitude) * g0;
  out.residual = residual;
  out.iterations = iter + 1;
  return out;
}

/// Which of the two driven modes of a cavity sits on the amplifying
/// (blue-detuned, parametric) sideband. Odd cavities pump mode a blue and
/// mode b red; even cavities the reverse.
enum class Parity { odd, even };

/// One cavity of the chain: two driven optical modes (a, b) coupled to a
/// single mechanical mode, fed by the previous cavity's output.
struct CavityParams {
  double kappa_a = 0;  // loss rate of mode a
  double kappa_b = 0;  // loss rate of mode b
  double g_a = 0;      // effective optomechanical coupling of mode a
  double g_b = 0;      // effective optomechanical coupling of mode b
  double gamma_m = 0;  // mechanical damping rate
  double n_th = 0;     // mean thermal phonon number of the mechanical bath
  // Link efficiencies from the previous cavity; disallowed on the first.
  std::optional<double> eta_a;
  std::optional<double> eta_b;
  Parity parity = Parity::odd;

  double g_amplifying() const { return parity == Parity::odd ? g_a : g_b; }
  double g_damping() const { return parity == Parity::odd ? g_b : g_a; }
};

/// Matched-coupling chain in the standard convention: the amplifying mode of
/// every cavity has coupling g1 and the damping mode g2.
struct MatchedChain {
  double g1 = 0;
  double g2 = 0;
  double kappa = 0;
  double gamma_m = 0;
  double n_th = 0;
  double eta = 1.0;
  std::optional<double> omega_m;
};

struct ChainConfig {
  std::vector<CavityParams> cavities;
  // Common mechanical frequency; only used for rotating-wave validity
  // diagnostics, the rotated dynamics do not contain it.
  std::optional<double> omega_m;

  std::size_t size() const { return cavities.size(); }

  static ChainConfig matched(std::size_t n, const MatchedChain& p) {
    ChainConfig cfg;
    cfg.omega_m = p.omega_m;
    cfg.cavities.reserve(n);
    for (std::size_t j = 0; j < n; ++j) {
      CavityParams cav;
      cav.parity = (j % 2 == 0) ? Parity::odd : Parity::even;
      cav.kappa_a = cav.kappa_b = p.kappa;
      cav.g_a = (cav.parity == Parity::odd) ? p.g1 : p.g2;
      cav.g_b = (cav.parity == Parity::odd) ? p.g2 : p.g1;
      cav.gamma_m = p.gamma_m;
      cav.n_th = p.n_th;
      if (j > 0) {
        cav.eta_a = p.eta;
        cav.eta_b = p.eta;
      }
      cfg.cavities.push_back(cav);
    }
    return cfg;
  }
};

/// Structural and physical checks. Returns diagnostics, never throws:
/// ERROR entries make the config unusable, WARN entries flag regimes where
/// the linearized rotating-wave model is questionable.
inline std::vector<Diagnostic> validate_chain(const ChainConfig& config) {
  std::vector<Diagnostic> out;
  if (config.cavities.empty()) {
    out.push_back({Severity::error, "chain-empty", "chain must contain at least one cavity"});
    return out;
  }
  if (config.omega_m && (!(*config.omega_m > 0) || !std::isfinite(*config.omega_m)))
    out.push_back({Severity::error, "omega-m-range", "omega_m must be positive and finite"});

  for (std::size_t j = 0; j < config.cavities.size(); ++j) {
    const CavityParams& cav = config.cavities[j];
    const std::string where = "cavity " + std::to_string(j + 1);
    auto err = [&](const char* code, const std::string& msg) {
      out.push_back({Severity::error, code, where + ": " + msg});
    };
    auto warn = [&](const char* code, const std::string& msg) {
      out.push_back({Severity::warning, code, where + ": " + msg});
    };

    if (!(cav.kappa_a > 0) || !std::isfinite(cav.kappa_a))
      err("rate-range", "kappa_a must be positive and finite");
    if (!(cav.kappa_b > 0) || !std::isfinite(cav.kappa_b))
      err("rate-range", "kappa_b must be positive and finite");
    if (cav.g_a < 0 || !std::isfinite(cav.g_a)) err("rate-range", "g_a must be >= 0 and finite");
    if (cav.g_b < 0 || !std::isfinite(cav.g_b)) err("rate-range", "g_b must be >= 0 and finite");
    if (cav.gamma_m < 0 || !std::isfinite(cav.gamma_m))
      err("rate-range", "gamma_m must be >= 0 and finite");
    if (cav.n_th < 0 || !std::isfinite(cav.n_th)) err("n-th-range", "n_th must be >= 0 and finite");

    const Parity expected = (j % 2 == 0) ? Parity::odd : Parity::even;
    if (cav.parity != expected)
      err("parity", "parity must alternate along the chain starting odd");

    if (j == 0) {
      if (cav.eta_a || cav.eta_b)
        err("eta-first", "link efficiencies are not allowed on the first cavity");
    } else {
      for (const auto* eta : {&cav.eta_a, &cav.eta_b}) {
        if (!*eta)
          err("eta-missing", "link efficiency missing (cavities after the first need eta_a, eta_b)");
        else if (!(**eta >= 0 && **eta <= 1))
          err("eta-range", "link efficiency must lie in [0, 1]");
      }
    }

    if (cav.gamma_m == 0 && cav.g_amplifying() >= cav.g_damping())
      warn("marginal-stability",
           "amplifying coupling >= damping coupling with gamma_m = 0; "
           "the chain is at best marginally stable");

    if (config.omega_m && *config.omega_m > 0) {
      const double wm = *config.omega_m;
      const double kmax = std::max(cav.kappa_a, cav.kappa_b);
      const double gmax = std::max(cav.g_a, cav.g_b);
      if (kmax > 0 && wm / kmax < 10.0)
        warn("sideband-resolution", "omega_m / kappa < 10; outside the resolved-sideband regime");
      if (gmax > 0 && wm / gmax < 10.0)
        warn("sideband-resolution", "omega_m / g < 10; rotating-wave reduction is inaccurate");
    }
  }
  return out;
}

/// Throws ConfigError if validate_chain reports any ERROR diagnostics.
inline void require_valid(const ChainConfig& config) {
  const auto diags = validate_chain(config);
  if (!has_errors(diags)) return;
  std::ostringstream msg;
  msg << "invalid chain configuration:";
  for (const auto& d : diags)
    if (d.is_error()) msg << "\n  [" << d.code << "] " << d.message;
  throw ConfigError(msg.str());
}

}  // namespace cascade
