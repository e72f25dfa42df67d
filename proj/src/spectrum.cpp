#include "ipfe/spectrum.hpp"

#include "ipfe/error.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace ipfe {

using std::numbers::pi;

std::string to_string(SpectrumKind kind) {
  return kind == SpectrumKind::Kolmogorov ? "kolmogorov" : "von_karman";
}

SpectrumKind spectrum_kind_from_string(const std::string& name) {
  if (name == "kolmogorov")
    return SpectrumKind::Kolmogorov;
  if (name == "von_karman")
    return SpectrumKind::VonKarman;
  throw ConfigError("unknown spectrum kind '" + name +
                    "' (expected kolmogorov or von_karman)");
}

TurbulenceModel TurbulenceModel::kolmogorov(double cn2, double inner_scale) {
  TurbulenceModel m;
  m.kind = SpectrumKind::Kolmogorov;
  m.cn2 = cn2;
  m.outer_scale = std::numeric_limits<double>::infinity();
  m.inner_scale = inner_scale;
  m.validate();
  return m;
}

TurbulenceModel TurbulenceModel::von_karman(double cn2, double outer_scale,
                                            double inner_scale) {
  TurbulenceModel m;
  m.kind = SpectrumKind::VonKarman;
  m.cn2 = cn2;
  m.outer_scale = outer_scale;
  m.inner_scale = inner_scale;
  m.validate();
  return m;
}

void TurbulenceModel::validate() const {
  if (!(cn2 >= 0.0) || !std::isfinite(cn2))
    throw ConfigError("cn2 must be finite and >= 0");
  if (kind == SpectrumKind::VonKarman &&
      (!(outer_scale > 0.0) || !std::isfinite(outer_scale)))
    throw ConfigError("outer_scale must be finite and > 0 for von_karman");
  if (!(inner_scale >= 0.0) || !std::isfinite(inner_scale))
    throw ConfigError("inner_scale must be finite and >= 0");
  if (!(inner_scale_constant > 0.0))
    throw ConfigError("inner_scale_constant must be > 0");
}

double TurbulenceModel::kappa0() const {
  return kind == SpectrumKind::VonKarman ? 2.0 * pi / outer_scale : 0.0;
}

double psd_prefactor() { return 0.033 * 8.0 * pi * pi * pi; }

double psd_radial(const TurbulenceModel& model, double k) {
  k = std::abs(k);
  if (model.kind == SpectrumKind::Kolmogorov && k == 0.0)
    throw DomainError("PSD singular at zero frequency");
  if (model.cn2 == 0.0)
    return 0.0;
  const double kappa0 = model.kappa0();
  const double k2 = k * k;
  double value =
      psd_prefactor() * model.cn2 * std::pow(k2 + kappa0 * kappa0, -11.0 / 6.0);
  if (model.inner_scale > 0.0)
    value *= std::exp(-k2 * model.inner_scale * model.inner_scale /
                      model.inner_scale_constant);
  return value;
}

double psd_3d(const TurbulenceModel& model, const std::array<double, 3>& k) {
  return psd_radial(model, std::hypot(k[0], k[1], k[2]));
}

double psd_transverse(const TurbulenceModel& model, std::span<const double> a) {
  if (a.empty() || a.size() > 2)
    throw ShapeError("transverse frequency must have 1 or 2 components");
  std::array<double, 3> k{0.0, 0.0, 0.0};
  for (std::size_t i = 0; i < a.size(); ++i)
    k[i] = 2.0 * pi * a[i];
  return psd_3d(model, k);
}

double psd_transverse(const TurbulenceModel& model, double a_magnitude) {
  return psd_radial(model, 2.0 * pi * a_magnitude);
}

namespace {

constexpr double kQuadratureTolerance = 1e-10;

// Integrates f over [0, inf) split at kappa0.
template <class F>
double radial_integral(F f, double kappa0, const char* what) {
  using boost::math::quadrature::gauss_kronrod;
  double err_inner = 0.0, err_outer = 0.0, l1_inner = 0.0, l1_outer = 0.0;
  const double inner =
      gauss_kronrod<double, 61>::integrate(f, 0.0, kappa0, 20,
                                           kQuadratureTolerance, &err_inner,
                                           &l1_inner);
  const double outer = gauss_kronrod<double, 61>::integrate(
      f, kappa0, std::numeric_limits<double>::infinity(), 20,
      kQuadratureTolerance, &err_outer, &l1_outer);
  const double total = inner + outer;
  const double err = err_inner + err_outer;
  if (!std::isfinite(total) || err > 10.0 * kQuadratureTolerance * std::abs(total)) {
    std::ostringstream os;
    os << what << ": quadrature did not converge (value " << total
       << ", error estimate " << err << ", inner " << inner << " +- "
       << err_inner << ", outer " << outer << " +- " << err_outer << ")";
    throw NumericalError(os.str());
  }
  return total;
}

void require_finite_lambda(const TurbulenceModel& model) {
  model.validate();
  if (!model.has_finite_lambda())
    throw DomainError("Λ divergent for pure Kolmogorov");
}

} // namespace

double lambda_total(const TurbulenceModel& model) {
  require_finite_lambda(model);
  if (model.cn2 == 0.0)
    return 0.0;
  // d^2a = d^2k / (2 pi)^2, polar in k.
  const double integral = radial_integral(
      [&](double k) { return psd_radial(model, k) * k; }, model.kappa0(),
      "lambda_total");
  return integral / (2.0 * pi);
}

double lambda_total_1d(const TurbulenceModel& model) {
  require_finite_lambda(model);
  if (model.cn2 == 0.0)
    return 0.0;
  // da = dk / (2 pi), even integrand over the full line.
  const double integral = radial_integral(
      [&](double k) { return psd_radial(model, k); }, model.kappa0(),
      "lambda_total_1d");
  return integral / pi;
}

double lambda_total_closed_form(const TurbulenceModel& model) {
  require_finite_lambda(model);
  return 0.033 * 4.0 * pi * pi * 0.6 * model.cn2 *
         std::pow(model.kappa0(), -5.0 / 3.0);
}

} // namespace ipfe
