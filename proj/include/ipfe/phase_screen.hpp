#pragma once

#include "ipfe/grid.hpp"
#include "ipfe/spectrum.hpp"

#include <cstdint>
#include <vector>

namespace ipfe {

/// One slab-integrated refractive-index screen in the frequency domain.
///
/// Coefficients satisfy n_tilde_hat(-a) = conj(n_tilde_hat(a)) on the periodic
/// lattice and have per-mode variance Phi_n(a,0) dz / delta_a^D.
struct ScreenRealization {
  FrequencyGrid grid;
  std::vector<cplx> n_tilde_hat;
  double dz = 0.0;
  std::uint64_t seed = 0;

  bool is_zero() const;
  /// Max |N(a) - conj(N(-a))| over the lattice.
  double hermitian_residual() const;
};

/// Target per-mode variance Phi_n(a,0) dz / delta_a^D for every site.
std::vector<double> screen_mode_variance(const TurbulenceModel& model,
                                         const FrequencyGrid& grid, double dz);

/// Draw a Gaussian screen. Independent draws on one member of each
/// (a, -a) pair, mirrored to the partner; self-paired sites are real.
/// Deterministic in (model, grid, dz, seed).
ScreenRealization draw_screen(const TurbulenceModel& model,
                              const FrequencyGrid& grid, double dz,
                              std::uint64_t seed);

/// Phase phi(x) = k n_tilde_slab(x) in radians, on the position lattice.
std::vector<double> phase_screen_position(const ScreenRealization& screen,
                                          double wavenumber);

struct ModeStatistics {
  std::size_t site = 0;
  double frequency = 0.0;        ///< |a|, cycles/m
  double target_variance = 0.0;
  double sample_variance = 0.0;  ///< mean |N(a)|^2
  double standard_error = 0.0;
  double relative_deviation = 0.0;
};

struct CrossCovariance {
  std::size_t site1 = 0;
  std::size_t site2 = 0;
  cplx value{};                   ///< sample <N(a1) N*(a2)>
  double standard_error = 0.0;    ///< complex standard error
  double z_score = 0.0;           ///< |value| / standard_error
};

struct ScreenStatistics {
  std::size_t n_samples = 0;
  std::vector<ModeStatistics> modes;
  std::vector<CrossCovariance> cross;
  double max_relative_deviation = 0.0;
  double max_cross_z_score = 0.0;
};

/// Empirical screen statistics over n_samples seeds derived from `seed`.
/// Cross covariances are reported for every pair a1 != a2, a2 != -a1.
ScreenStatistics screen_statistics(const TurbulenceModel& model,
                                   const FrequencyGrid& grid, double dz,
                                   std::size_t n_samples, std::uint64_t seed);

} // namespace ipfe

namespace ipfe {

/// Lambda_grid = sum_j Phi_n(a_j, 0) delta_a^D over the periodic shift
/// lattice. A screen of thickness dz has phase variance k^2 dz Lambda_grid.
double lattice_lambda(const TurbulenceModel& model, const FrequencyGrid& grid);

/// Warn when the outer scale is not resolved by the lattice (L0 > 1/delta_a,
/// "outer scale exceeds grid support") or the PSD core is wider than the
/// lattice (L0 < 1/(n delta_a)). Returns the number of warnings issued.
int check_outer_scale(const TurbulenceModel& model, const FrequencyGrid& grid);

} // namespace ipfe
