#pragma once

// Refractive-index power spectral densities.
//
// Frequency convention: transverse spatial frequencies `a` are in cycles/m
// (transforms use exp(-i 2 pi a.x)); the PSD argument is the angular wave
// vector k = 2 pi a in rad/m.

#include <array>
#include <span>
#include <string>

namespace ipfe {

enum class SpectrumKind { Kolmogorov, VonKarman };

std::string to_string(SpectrumKind kind);
SpectrumKind spectrum_kind_from_string(const std::string& name);

/// Kolmogorov-family turbulence model.
///
/// Phi_n(k) = 0.033 (2 pi)^3 C_n^2 (|k|^2 + kappa0^2)^(-11/6) exp(-|k|^2 l0^2 / c_in)
///
/// with kappa0 = 2 pi / L0 for von Karman (0 for Kolmogorov) and
/// c_in = inner_scale_constant (35.0 by default, Tatarskii). An inner scale of
/// zero disables the rolloff.
struct TurbulenceModel {
  SpectrumKind kind = SpectrumKind::VonKarman;
  double cn2 = 0.0;           ///< m^(-2/3)
  double outer_scale = 1.0;   ///< L0, m (von Karman only)
  double inner_scale = 0.0;   ///< l0, m
  double inner_scale_constant = 35.0;

  static TurbulenceModel kolmogorov(double cn2, double inner_scale = 0.0);
  static TurbulenceModel von_karman(double cn2, double outer_scale,
                                    double inner_scale = 0.0);

  /// Throws ConfigError when a field violates its bounds.
  void validate() const;

  /// True when Lambda (and the screen DC variance) is finite.
  bool has_finite_lambda() const { return kind == SpectrumKind::VonKarman; }

  /// 2 pi / L0 for von Karman, 0 for Kolmogorov.
  double kappa0() const;
};

/// Leading constant 0.033 (2 pi)^3 of the PSD.
double psd_prefactor();

/// Phi_n as a function of the angular wave-number magnitude |k| (rad/m).
double psd_radial(const TurbulenceModel& model, double k_magnitude);

/// Phi_n(k) for a 3-vector of angular spatial frequency (rad/m). Units m^3.
double psd_3d(const TurbulenceModel& model, const std::array<double, 3>& k);

/// Markov slice Phi_n(a, 0) for a D-vector (D = 1 or 2) of transverse
/// frequency in cycles/m.
double psd_transverse(const TurbulenceModel& model, std::span<const double> a);
double psd_transverse(const TurbulenceModel& model, double a_magnitude);

/// Lambda = int Phi_n(a, 0) d^2a (2-D transverse), metres.
double lambda_total(const TurbulenceModel& model);

/// Lambda_1d = int Phi_n(a, 0) da over a single transverse axis.
double lambda_total_1d(const TurbulenceModel& model);

/// Closed form of lambda_total for l0 = 0: 0.033 (2 pi)^2 (3/5) cn2 kappa0^(-5/3).
double lambda_total_closed_form(const TurbulenceModel& model);

} // namespace ipfe
