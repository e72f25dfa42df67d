#pragma once

// Moment-kernel hierarchy H_{m,n} of the Wigner functional under Markov
// turbulence.
//
//   dH/dz = i pi lambda (sum_i |a_i|^2 - sum_j |a'_j|^2) H
//           - (m+n)/2 k^2 Lambda H
//           - k^2 sum_{i<j} [H(a_i + a0, a_j - a0) * Phi]        (ket pairs)
//           - k^2 sum_{i<j} [H(a'_i + a0, a'_j - a0) * Phi]      (bra pairs)
//           + k^2 sum_{i,j} [H(a_i + a0, a'_j + a0) * Phi]       (cross pairs)
//
// where [.. * Phi] = sum_{a0} (..) Phi_n(a0, 0) delta_a^D. Shifts wrap on the
// periodic lattice and Lambda is the lattice sum of Phi, so trace and the
// delta-diagonal stationary state are exact at the discrete level.

#include "ipfe/grid.hpp"
#include "ipfe/spectrum.hpp"

#include <complex>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace ipfe {

/// Discretised H_{m,n}: complex tensor with m "ket" site indices followed by
/// n "bra" site indices, row-major over sites.
class MomentKernel {
public:
  MomentKernel() = default;
  MomentKernel(FrequencyGrid grid, unsigned m, unsigned n, double z = 0.0);

  const FrequencyGrid& grid() const { return grid_; }
  unsigned m() const { return m_; }
  unsigned n() const { return n_; }
  unsigned rank() const { return m_ + n_; }
  std::size_t sites() const { return grid_.size(); }
  std::size_t size() const { return values_.size(); }

  double z = 0.0;

  std::vector<cplx>& values() { return values_; }
  const std::vector<cplx>& values() const { return values_; }
  cplx& operator[](std::size_t i) { return values_[i]; }
  const cplx& operator[](std::size_t i) const { return values_[i]; }

  /// Element at per-slot site indices (length m + n).
  cplx& at(std::span<const std::size_t> sites);
  const cplx& at(std::span<const std::size_t> sites) const;
  cplx& at(std::initializer_list<std::size_t> sites);
  const cplx& at(std::initializer_list<std::size_t> sites) const;

  /// Flat index of per-slot site indices / inverse.
  std::size_t flat(std::span<const std::size_t> sites) const;
  std::vector<std::size_t> unflat(std::size_t index) const;

  /// Axis lengths of the underlying array: n repeated (m+n)*D times.
  std::vector<std::size_t> tensor_shape() const;

  MomentKernel& operator+=(const MomentKernel& o);
  MomentKernel& operator*=(cplx s);

  /// Same shape, zeros.
  MomentKernel zeros_like() const;

private:
  FrequencyGrid grid_;
  unsigned m_ = 0;
  unsigned n_ = 0;
  std::vector<cplx> values_;
};

/// H_{1,1}(a, a') = G(a) conj(G(a')).
MomentKernel outer_product(const Spectrum& g);
/// H_{1,1} = c delta(a - a'): c / delta_a^D on the diagonal.
MomentKernel delta_diagonal(const FrequencyGrid& grid, cplx c);
/// H_{m,0} / H_{1,0} from a spectrum.
MomentKernel from_spectrum(const Spectrum& s);
Spectrum to_spectrum(const MomentKernel& h);

/// Average over permutations of the ket indices and of the bra indices.
MomentKernel symmetrize(const MomentKernel& h);
/// H_{n,m}(b', b) = conj(H_{m,n}(b, b')).
MomentKernel conjugate_transpose(const MomentKernel& h);

/// Precomputed Markov-scattering data for one (model, grid) pair: the lattice
/// PSD samples, Lambda_grid, and the position-domain correlation
/// C(d) = sum_{a0} Phi(a0) delta_a^D exp(i 2 pi a0 d).
class KernelEquation {
public:
  /// Throws DomainError for Kolmogorov models.
  KernelEquation(const TurbulenceModel& model, const FrequencyGrid& grid);

  const FrequencyGrid& grid() const { return grid_; }
  const TurbulenceModel& model() const { return model_; }
  double lattice_lambda() const { return lambda_; }
  double k2() const { return k2_; }
  /// Phi_n(a0, 0) at the signed shift represented by each site.
  std::span<const double> shift_psd() const { return phi_; }

  /// General hierarchy right-hand side.
  MomentKernel rhs(const MomentKernel& h) const;
  /// Same, with the diagonal (drift and decay) coefficients precomputed by
  /// diagonal_coefficients(h.m(), h.n(), ...).
  MomentKernel rhs(const MomentKernel& h, std::span<const cplx> diagonal) const;

  /// i pi lambda (sum |a_i|^2 - sum |a'_j|^2) - decay_rate for every element of
  /// an (m, n) kernel; decay_rate defaults to (m+n)/2 k^2 Lambda.
  std::vector<cplx> diagonal_coefficients(unsigned m, unsigned n) const;
  std::vector<cplx> diagonal_coefficients(unsigned m, unsigned n,
                                          double decay_rate) const;

  /// Explicit bi-photon form for H_{2,2} (F(a1,a2,a3,a4) = H(a1,a3;a2,a4)).
  MomentKernel biphoton_rhs(const MomentKernel& h) const;
  MomentKernel biphoton_rhs(const MomentKernel& h,
                            std::span<const cplx> diagonal) const;

  /// sum_{a0} Phi(a0) delta_a^D H(.., a_p + a0, .., a_q +/- a0, ..) along
  /// slots p and q; `same_sign` selects +/+ versus +/-.
  MomentKernel pair_shift(const MomentKernel& h, unsigned p, unsigned q,
                          bool same_sign) const;

private:
  MomentKernel add_pair_terms(const MomentKernel& h) const;

  FrequencyGrid grid_;
  TurbulenceModel model_;
  double lambda_ = 0.0;
  double k2_ = 0.0;
  std::vector<double> phi_;
  std::vector<double> correlation_;
};

/// Closed-form first moment: B10(a) exp(i pi lambda z |a|^2 - k^2 Lambda z / 2).
Spectrum evolve_h10(const Spectrum& b10, const TurbulenceModel& model, double z);

MomentKernel h11_rhs(const MomentKernel& h, const TurbulenceModel& model);
MomentKernel biphoton_rhs(const MomentKernel& f, const TurbulenceModel& model);
/// Order bound: m + n <= 4; D = 2 only for m + n <= 2.
MomentKernel hierarchy_rhs(const MomentKernel& h, const TurbulenceModel& model);

/// Step guard max(pi lambda dz |a|^2_max, k^2 Lambda dz).
double step_guard(const KernelEquation& eq, double dz);

struct EvolveOptions {
  std::size_t n_steps = 0;
  /// Use the explicit bi-photon right-hand side for (2,2) kernels.
  bool biphoton_form = false;
  /// Called after every step with the current kernel.
  std::function<void(const MomentKernel&)> on_step;
};

/// Fixed-step classical RK4 from h0.z to h0.z + z_total. Throws ConfigError
/// when the step guard is >= 0.1.
MomentKernel evolve_kernel(const MomentKernel& h0, const TurbulenceModel& model,
                           double z_total, const EvolveOptions& options);
MomentKernel evolve_h11(const MomentKernel& h0, const TurbulenceModel& model,
                        double z_total, std::size_t n_steps);
MomentKernel evolve_biphoton(const MomentKernel& f0, const TurbulenceModel& model,
                             double z_total, std::size_t n_steps);

/// Smallest step count satisfying the guard with the given margin.
std::size_t minimum_steps(const TurbulenceModel& model, const FrequencyGrid& grid,
                          double z_total, double guard = 0.1);

/// Full diagonal contraction sum H(b, b) delta_a^(D n); requires m = n.
double kernel_trace(const MomentKernel& h);
std::complex<double> kernel_trace_complex(const MomentKernel& h);

/// max |H(b, b') - conj(H(b', b))| / max |H|; requires m = n.
double hermiticity_residual(const MomentKernel& h);

/// Fraction of |trace| carried by diagonal entries with any index in the outer
/// quarter of the lattice (|j - n/2| >= 3n/8 on some axis); requires m = n.
double boundary_mass(const MomentKernel& h);

} // namespace ipfe
