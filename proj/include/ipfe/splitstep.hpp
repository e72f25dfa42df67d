#pragma once

// Monte-Carlo oracle: symmetric split-step propagation of classical angular
// spectra through random phase screens, and ensemble moment accumulation.

#include "ipfe/grid.hpp"
#include "ipfe/phase_screen.hpp"
#include "ipfe/spectrum.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace ipfe {

struct PlanGuards {
  double slab_thickness = 0.0;   ///< dz, m
  double free_phase = 0.0;       ///< pi lambda dz |a_max|^2, rad (< pi/4)
  double scattering = 0.0;       ///< k^2 Lambda_grid dz (< 0.1)
  double lattice_lambda = 0.0;   ///< Lambda_grid
};

struct PropagationPlan {
  FrequencyGrid grid;
  TurbulenceModel model;
  double z_total = 0.0;
  std::size_t n_slabs = 64;
  std::size_t n_realizations = 500;
  std::uint64_t master_seed = 0;

  double slab_thickness() const { return z_total / static_cast<double>(n_slabs); }
  PlanGuards guards() const;
  /// Throws ConfigError naming every violated inequality.
  void validate() const;
};

/// Multiply by exp(i pi lambda dz |a|^2). Pure phase.
Spectrum free_space_step(const Spectrum& s, double dz);

/// One-slab phase modulation: position domain multiply by exp(-i phi(x)).
/// An all-zero screen is the identity (returned unchanged).
Spectrum apply_screen(const Spectrum& s, const ScreenRealization& screen);

/// Strang composition with screens at the slab midplanes
/// z_i = (i + 1/2) z_total / screens.size(); adjacent half free steps are merged.
Spectrum propagate_through(const Spectrum& s0,
                           std::span<const ScreenRealization> screens,
                           double z_total);

/// Screen seed for (master, realization, slab).
std::uint64_t screen_seed(std::uint64_t master_seed, std::size_t realization,
                          std::size_t slab);

/// Propagate one realization of the plan (screens drawn from screen_seed).
Spectrum propagate(const Spectrum& s0, const PropagationPlan& plan,
                   std::size_t realization_index);

/// Ensemble averages with standard errors. Matrices are N x N row-major over
/// lattice sites (N = grid.size()); `coherence` is <G(a) G*(a')>,
/// `anomalous` is <G(a) G(a')>.
struct EnsembleStats {
  FrequencyGrid grid;
  std::size_t n_samples = 0;
  std::vector<cplx> mean;
  std::vector<double> mean_se_re, mean_se_im;
  std::vector<cplx> coherence;
  std::vector<double> coherence_se_re, coherence_se_im;
  std::vector<cplx> anomalous;
  std::vector<double> anomalous_se_re, anomalous_se_im;

  std::size_t sites() const { return grid.size(); }
  /// sqrt(se_re^2 + se_im^2) of a coherence entry.
  double coherence_se(std::size_t i, std::size_t j) const;
  double mean_se(std::size_t i) const;
};

/// Monte-Carlo estimate over plan.n_realizations independent screen
/// sequences. The reduction is a fixed pairwise tree over fixed-size blocks of
/// realizations, so the result is bit-identical for any thread count.
EnsembleStats ensemble_moments(const Spectrum& s0, const PropagationPlan& plan,
                               std::size_t threads = 1);

} // namespace ipfe
