#pragma once

// Gaussian Wigner functionals W[alpha] = exp(-alpha* <> A <> alpha
// - alpha* <> beta - eta* <> alpha), the linear-process Wigner functional and
// fixed-spectrum Fock states.
//
// Kernels over grid^2 are dense N x N row-major matrices of kernel values, so
// alpha* <> A <> alpha = sum alpha*(a) A(a,a') alpha(a') delta_a^(2D). The
// operator acting on site vectors is therefore A * delta_a^D.

#include "ipfe/grid.hpp"
#include "ipfe/spectrum.hpp"

#include <cstdint>
#include <vector>

namespace ipfe {

struct GaussianState {
  FrequencyGrid grid;
  std::vector<cplx> A;  ///< N x N
  std::vector<cplx> B;  ///< N x N, symmetric
  std::vector<cplx> C;  ///< N x N, symmetric
  Spectrum beta;
  Spectrum eta;
  double z = 0.0;

  GaussianState() = default;
  /// All kernels and shifts zero.
  explicit GaussianState(FrequencyGrid g);

  std::size_t sites() const { return grid.size(); }
  /// True when B, C, beta and eta vanish identically.
  bool is_isotropic() const;
};

/// A = c delta (c / delta_a^D on the diagonal).
GaussianState thermal_state(const FrequencyGrid& grid, double c);
/// A = 2 delta, W = exp(-2 ||alpha||^2).
GaussianState vacuum_state(const FrequencyGrid& grid);

/// exp(-alpha* <> A <> alpha - alpha* <> beta - eta* <> alpha).
cplx evaluate_gaussian(const GaussianState& s, const Spectrum& alpha);

/// Free-space transport over distance z (pure phase transformations).
GaussianState free_space_gaussian(const GaussianState& s, double z);

struct DriftResult {
  std::vector<cplx> rhs;          ///< d A / dz from the second-order equation
  double rhs_norm = 0.0;          ///< max |rhs| / (k^2 Lambda max |A|)
  double fourth_order_residual = 0.0;
  std::vector<double> probe_residuals;
};

/// Number of random probe fields used by gaussian_drift.
inline constexpr std::size_t kDriftProbes = 16;

/// Second-order right-hand side for A and the fourth-order obstruction of
/// the isotropic Gaussian ansatz. The residual is the max over kDriftProbes
/// fixed random alpha of |R[alpha]| / (k^2 Lambda |alpha* <> A <> alpha|^2).
DriftResult gaussian_drift(const GaussianState& s, const TurbulenceModel& model,
                           std::uint64_t probe_seed = 0x5eedULL);

/// Fourth-order bracket R[alpha] for one probe (unnormalised).
cplx fourth_order_bracket(const GaussianState& s, const TurbulenceModel& model,
                          const Spectrum& alpha);

struct ShiftPair {
  Spectrum beta;
  Spectrum eta;
};

/// beta0 exp(i pi lambda z |a|^2 - k^2 Lambda z), eta0 exp(i pi lambda z |a|^2
/// - k^2 Lambda z). Kolmogorov models give zero for z > 0.
ShiftPair shift_decay(const Spectrum& beta0, const Spectrum& eta0,
                      const TurbulenceModel& model, double z);

struct CharacteristicGaussian {
  GaussianState state;   ///< transformed kernel in A
  cplx log_prefactor{};  ///< log det(2 A^-1 / delta_a^D)
};

/// Functional Fourier transform of a centred Gaussian with kernel
/// exp(2(eta* <> alpha - alpha* <> eta)). A~ = 4 A^-1 / delta_a^(2D); the
/// vacuum maps to itself with unit prefactor.
CharacteristicGaussian characteristic_of_gaussian(const GaussianState& s);

struct LinearProcess {
  FrequencyGrid grid;
  std::vector<cplx> T;  ///< N x N kernel
};

struct LinearProcessWigner {
  FrequencyGrid grid;
  cplx log_norm{};           ///< -log det(1 + T)
  std::vector<cplx> B_lin;   ///< 2 (1 - T)(1 + T)^-1 as a kernel
  double condition = 0.0;    ///< 2-norm condition estimate of (1 + T)
  double inverse_residual = 0.0;  ///< max |(1+T)(1+T)^-1 - 1|
};

LinearProcessWigner wigner_linear_process(const LinearProcess& p);
/// exp(log_norm - alpha* <> B_lin <> alpha).
cplx evaluate_linear_process(const LinearProcessWigner& w, const Spectrum& alpha);

struct FockSpec {
  Spectrum F;
  unsigned n = 0;
};

/// Rescale F so that contract(F*, F) = 1.
Spectrum normalized(const Spectrum& f);

/// N0/(1+eta) exp(-2||alpha||^2 + 4 eta/(1+eta) |<alpha,F>|^2).
cplx fock_generating(double eta, const FockSpec& f, const Spectrum& alpha,
                     double n0 = 1.0);
/// N0 (-1)^n L_n(4 |<alpha,F>|^2) exp(-2 ||alpha||^2).
cplx fock_wigner(unsigned n, const FockSpec& f, const Spectrum& alpha,
                 double n0 = 1.0);

} // namespace ipfe
