#pragma once

// Quadrature-space generators of the linearized cascaded dynamics.
//
// Conventions, fixed once for the whole library:
//   * quadratures x = (o + o^dag)/sqrt(2), y = -i(o - o^dag)/sqrt(2),
//     vacuum variance 1/2;
//   * mode order a1, b1, a2, b2, ..., aN, bN, c1, ..., cN, each mode holding
//     a consecutive (x, y) pair, total dimension 6N;
//   * cavity j couples only to cavities s < j (unidirectional feed-forward);
//   * the amplifying (blue) mode of a cavity couples as -i g c^dag, the
//     damping (red) mode as -i g c, with the amplifying side on a for odd
//     cavities and on b for even cavities.

#include <Eigen/Dense>
#include <cstddef>
#include <string>
#include <vector>

#include "cascade/linalg.hpp"
#include "cascade/model.hpp"

namespace cascade {

struct Mode {
  enum class Kind { optical_a, optical_b, mechanical };
  Kind kind = Kind::mechanical;
  std::size_t cavity = 0;  // 1-based

  std::string label() const {
    const char prefix = kind == Kind::optical_a ? 'a' : kind == Kind::optical_b ? 'b' : 'c';
    return prefix + std::to_string(cavity);
  }
};

/// Bijection between modes and quadrature indices: mode m owns rows/columns
/// (2m, 2m+1) = (x, y).
class ModeLayout {
 public:
  ModeLayout() = default;
  explicit ModeLayout(std::vector<Mode> modes) : modes_(std::move(modes)) {}

  /// Full-chain layout: all optical modes first, mechanical modes trailing.
  static ModeLayout chain(std::size_t n_cavities) {
    std::vector<Mode> modes;
    modes.reserve(3 * n_cavities);
    for (std::size_t j = 1; j <= n_cavities; ++j) {
      modes.push_back({Mode::Kind::optical_a, j});
      modes.push_back({Mode::Kind::optical_b, j});
    }
    for (std::size_t j = 1; j <= n_cavities; ++j)
      modes.push_back({Mode::Kind::mechanical, j});
    return ModeLayout(std::move(modes));
  }

  /// Mechanical-only layout (reduced models).
  static ModeLayout mechanical(std::size_t n) {
    std::vector<Mode> modes;
    modes.reserve(n);
    for (std::size_t j = 1; j <= n; ++j) modes.push_back({Mode::Kind::mechanical, j});
    return ModeLayout(std::move(modes));
  }

  const std::vector<Mode>& modes() const { return modes_; }
  std::size_t mode_count() const { return modes_.size(); }
  Eigen::Index dim() const { return static_cast<Eigen::Index>(2 * modes_.size()); }

  Eigen::Index x_index(std::size_t mode) const { return static_cast<Eigen::Index>(2 * mode); }
  Eigen::Index y_index(std::size_t mode) const { return static_cast<Eigen::Index>(2 * mode + 1); }

  std::vector<std::size_t> mechanical_indices() const {
    std::vector<std::size_t> out;
    for (std::size_t m = 0; m < modes_.size(); ++m)
      if (modes_[m].kind == Mode::Kind::mechanical) out.push_back(m);
    return out;
  }

  ModeLayout subset(const std::vector<std::size_t>& mode_indices) const {
    std::vector<Mode> modes;
    modes.reserve(mode_indices.size());
    for (std::size_t m : mode_indices) {
      if (m >= modes_.size())
        throw ConfigError("ModeLayout::subset: unknown mode index " + std::to_string(m));
      modes.push_back(modes_[m]);
    }
    return ModeLayout(std::move(modes));
  }

  std::vector<std::string> quadrature_labels() const {
    std::vector<std::string> out;
    out.reserve(2 * modes_.size());
    for (const Mode& m : modes_) {
      out.push_back("x_" + m.label());
      out.push_back("y_" + m.label());
    }
    return out;
  }

 private:
  std::vector<Mode> modes_;
};

struct DriftMatrix {
  MatrixXd matrix;
  ModeLayout layout;
};

struct DiffusionMatrix {
  MatrixXd matrix;  // symmetric PSD
  ModeLayout layout;
};

namespace detail {

// 2x2 quadrature blocks of -i g c (beam splitter) and -i g c^dag (parametric).
inline Eigen::Matrix2d beam_splitter_block(double g) {
  Eigen::Matrix2d b;
  b << 0.0, g, -g, 0.0;
  return b;
}

inline Eigen::Matrix2d parametric_block(double g) {
  Eigen::Matrix2d b;
  b << 0.0, -g, -g, 0.0;
  return b;
}

enum class Branch { a, b };

inline double branch_kappa(const CavityParams& cav, Branch z) {
  return z == Branch::a ? cav.kappa_a : cav.kappa_b;
}
inline double branch_g(const CavityParams& cav, Branch z) {
  return z == Branch::a ? cav.g_a : cav.g_b;
}
inline double branch_eta(const CavityParams& cav, Branch z) {
  const auto& eta = z == Branch::a ? cav.eta_a : cav.eta_b;
  return eta.value_or(1.0);
}
inline bool branch_amplifying(const CavityParams& cav, Branch z) {
  return (cav.parity == Parity::odd) == (z == Branch::a);
}

/// Amplitude transmission of branch z from the output of cavity s to the
/// input of cavity j (0-based, s < j): product of sqrt(eta) over the links.
inline double link_transmission(const ChainConfig& cfg, Branch z, std::size_t s, std::size_t j) {
  double t = 1.0;
  for (std::size_t u = s + 1; u <= j; ++u) t *= std::sqrt(branch_eta(cfg.cavities[u], z));
  return t;
}

/// Weight of independent vacuum input s on the in-field of cavity j
/// (0-based). Input 0 is the external vacuum driving the first cavity;
/// input s >= 1 is the local vacuum admixed by the lossy link into cavity s.
inline double vacuum_weight(const ChainConfig& cfg, Branch z, std::size_t s, std::size_t j) {
  const double local = s == 0 ? 1.0 : std::sqrt(1.0 - branch_eta(cfg.cavities[s], z));
  return local * link_transmission(cfg, z, s, j);
}

}  // namespace detail

/// Drift matrix A of d chi/dt = A chi + f(t) for the rotated, rotating-wave
/// dynamics of the chain.
inline DriftMatrix build_drift(const ChainConfig& config) {
  require_valid(config);
  const std::size_t n = config.size();
  const ModeLayout layout = ModeLayout::chain(n);
  MatrixXd a = MatrixXd::Zero(layout.dim(), layout.dim());

  auto opt_mode = [&](std::size_t j, detail::Branch z) {
    return 2 * j + (z == detail::Branch::a ? 0 : 1);
  };
  auto mech_mode = [&](std::size_t j) { return 2 * n + j; };
  auto block = [&](std::size_t row_mode, std::size_t col_mode) {
    return a.block<2, 2>(layout.x_index(row_mode), layout.x_index(col_mode));
  };

  for (std::size_t j = 0; j < n; ++j) {
    const CavityParams& cav = config.cavities[j];
    for (detail::Branch z : {detail::Branch::a, detail::Branch::b}) {
      const std::size_t zm = opt_mode(j, z);
      const double kappa = detail::branch_kappa(cav, z);
      const double g = detail::branch_g(cav, z);
      const Eigen::Matrix2d coupling = detail::branch_amplifying(cav, z)
                                           ? detail::parametric_block(g)
                                           : detail::beam_splitter_block(g);

      block(zm, zm) = -kappa * Eigen::Matrix2d::Identity();
      // Optical row <- mechanical column, and the mirrored mechanical row
      // <- optical column: the same 2x2 block in this convention.
      block(zm, mech_mode(j)) = coupling;
      block(mech_mode(j), zm) = coupling;

      // Feed-forward from every upstream cavity on the same branch.
      for (std::size_t s = 0; s < j; ++s) {
        const double kappa_s = detail::branch_kappa(config.cavities[s], z);
        const double w = 2.0 * std::sqrt(kappa * kappa_s) *
                         detail::link_transmission(config, z, s, j);
        block(zm, opt_mode(s, z)) = -w * Eigen::Matrix2d::Identity();
      }
    }
    block(mech_mode(j), mech_mode(j)) = -cav.gamma_m * Eigen::Matrix2d::Identity();
  }
  return {std::move(a), layout};
}

/// Noise matrix D, defined through the symmetrized correlations of the
/// stacked quadrature noise, <f_i(t) f_j(t') + f_j(t') f_i(t)>/2 =
/// D_ij delta(t - t'). Optical baths are vacuum; shared upstream vacua give
/// the intercavity cross blocks. Mechanical baths are thermal.
inline DiffusionMatrix build_diffusion(const ChainConfig& config) {
  require_valid(config);
  const std::size_t n = config.size();
  const ModeLayout layout = ModeLayout::chain(n);
  MatrixXd d = MatrixXd::Zero(layout.dim(), layout.dim());

  auto opt_mode = [&](std::size_t j, detail::Branch z) {
    return 2 * j + (z == detail::Branch::a ? 0 : 1);
  };

  for (detail::Branch z : {detail::Branch::a, detail::Branch::b}) {
    for (std::size_t j = 0; j < n; ++j) {
      for (std::size_t k = 0; k < n; ++k) {
        // Sum over the independent vacuum inputs both modes share.
        double overlap = 0.0;
        for (std::size_t s = 0; s <= std::min(j, k); ++s)
          overlap += detail::vacuum_weight(config, z, s, j) *
                     detail::vacuum_weight(config, z, s, k);
        const double kj = detail::branch_kappa(config.cavities[j], z);
        const double kk = detail::branch_kappa(config.cavities[k], z);
        const double c = std::sqrt(kj * kk) * overlap;
        const std::size_t mj = opt_mode(j, z);
        const std::size_t mk = opt_mode(k, z);
        d.block<2, 2>(layout.x_index(mj), layout.x_index(mk)) =
            c * Eigen::Matrix2d::Identity();
      }
    }
  }
  for (std::size_t j = 0; j < n; ++j) {
    const CavityParams& cav = config.cavities[j];
    const double c = cav.gamma_m * (2.0 * cav.n_th + 1.0);
    const std::size_t m = 2 * n + j;
    d.block<2, 2>(layout.x_index(m), layout.x_index(m)) = c * Eigen::Matrix2d::Identity();
  }
  return {std::move(d), layout};
}

/// Max real part of the drift spectrum. The chain is treated as stable when
/// this lies below -stability_margin(drift).
inline double stability(const DriftMatrix& drift) {
  if (!drift.matrix.allFinite()) throw NumericalError("stability: non-finite drift matrix");
  return spectral_abscissa(drift.matrix);
}

inline double stability_margin(const DriftMatrix& drift) {
  return 1e-9 * drift.matrix.norm();
}

inline bool is_stable(const DriftMatrix& drift) {
  return stability(drift) < -stability_margin(drift);
}

}  // namespace cascade
