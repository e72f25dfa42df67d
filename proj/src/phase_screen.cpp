#include "ipfe/phase_screen.hpp"

#include "ipfe/diagnostics.hpp"
#include "ipfe/error.hpp"
#include "ipfe/rng.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace ipfe {

bool ScreenRealization::is_zero() const {
  return std::all_of(n_tilde_hat.begin(), n_tilde_hat.end(),
                     [](const cplx& v) { return v == cplx{}; });
}

double ScreenRealization::hermitian_residual() const {
  double worst = 0.0;
  for (std::size_t s = 0; s < n_tilde_hat.size(); ++s)
    worst = std::max(worst, std::abs(n_tilde_hat[s] -
                                     std::conj(n_tilde_hat[grid.mirror(s)])));
  return worst;
}

std::vector<double> screen_mode_variance(const TurbulenceModel& model,
                                         const FrequencyGrid& grid, double dz) {
  std::vector<double> var(grid.size());
  for (std::size_t s = 0; s < grid.size(); ++s) {
    const auto a = grid.frequency(s);
    const double amag = std::hypot(a[0], a[1]);
    var[s] = psd_transverse(model, amag) * dz / grid.weight();
  }
  return var;
}

ScreenRealization draw_screen(const TurbulenceModel& model,
                              const FrequencyGrid& grid, double dz,
                              std::uint64_t seed) {
  model.validate();
  if (!model.has_finite_lambda())
    throw DomainError(
        "phase screens require a finite-variance spectrum (Kolmogorov DC "
        "variance diverges)");
  if (!(dz > 0.0))
    throw ConfigError("screen slab thickness dz must be > 0");

  ScreenRealization screen{grid, std::vector<cplx>(grid.size()), dz, seed};
  if (model.cn2 == 0.0)
    return screen;

  const auto variance = screen_mode_variance(model, grid, dz);
  Engine engine(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (std::size_t s = 0; s < grid.size(); ++s) {
    const std::size_t partner = grid.mirror(s);
    if (partner < s)
      continue;
    const double sigma = std::sqrt(variance[s]);
    if (partner == s) {
      screen.n_tilde_hat[s] = sigma * normal(engine);
    } else {
      const double re = normal(engine);
      const double im = normal(engine);
      const cplx v = sigma * std::sqrt(0.5) * cplx(re, im);
      screen.n_tilde_hat[s] = v;
      screen.n_tilde_hat[partner] = std::conj(v);
    }
  }
  return screen;
}

std::vector<double> phase_screen_position(const ScreenRealization& screen,
                                          double wavenumber) {
  const double herm = screen.hermitian_residual();
  double max_coeff = 0.0;
  for (const auto& v : screen.n_tilde_hat)
    max_coeff = std::max(max_coeff, std::abs(v));
  if (herm > 1e-12 * max_coeff) {
    std::ostringstream os;
    os << "screen lost Hermitian symmetry (residual " << herm << ")";
    throw ConsistencyError(os.str());
  }

  const PositionField field = to_position(Spectrum(screen.grid, screen.n_tilde_hat));
  std::vector<double> phase(field.values.size());
  double sum_sq = 0.0, max_imag = 0.0;
  for (std::size_t i = 0; i < phase.size(); ++i) {
    phase[i] = wavenumber * field.values[i].real();
    sum_sq += phase[i] * phase[i];
    max_imag = std::max(max_imag, std::abs(wavenumber * field.values[i].imag()));
  }
  const double rms = std::sqrt(sum_sq / static_cast<double>(phase.size()));
  if (max_imag > 1e-12 * rms && max_imag > 0.0) {
    std::ostringstream os;
    os << "screen phase has imaginary residue " << max_imag << " (rms " << rms
       << ")";
    throw ConsistencyError(os.str());
  }
  return phase;
}

ScreenStatistics screen_statistics(const TurbulenceModel& model,
                                   const FrequencyGrid& grid, double dz,
                                   std::size_t n_samples, std::uint64_t seed) {
  if (n_samples < 100)
    throw ConfigError("screen_statistics requires n_samples >= 100");
  const std::size_t m = grid.size();
  const auto target = screen_mode_variance(model, grid, dz);

  std::vector<ScreenRealization> draws;
  draws.reserve(n_samples);
  for (std::size_t i = 0; i < n_samples; ++i)
    draws.push_back(draw_screen(model, grid, dz, derive_seed({seed, i})));

  const double ns = static_cast<double>(n_samples);
  ScreenStatistics stats;
  stats.n_samples = n_samples;
  for (std::size_t s = 0; s < m; ++s) {
    double sum = 0.0, sum_sq = 0.0;
    for (const auto& d : draws) {
      const double p = std::norm(d.n_tilde_hat[s]);
      sum += p;
      sum_sq += p * p;
    }
    const double mean = sum / ns;
    const double var_of_p = std::max(0.0, (sum_sq / ns - mean * mean) * ns / (ns - 1.0));
    ModeStatistics ms;
    ms.site = s;
    const auto a = grid.frequency(s);
    ms.frequency = std::hypot(a[0], a[1]);
    ms.target_variance = target[s];
    ms.sample_variance = mean;
    ms.standard_error = std::sqrt(var_of_p / ns);
    ms.relative_deviation =
        target[s] > 0.0 ? mean / target[s] - 1.0 : (mean == 0.0 ? 0.0 : INFINITY);
    stats.max_relative_deviation =
        std::max(stats.max_relative_deviation, std::abs(ms.relative_deviation));
    stats.modes.push_back(ms);
  }

  for (std::size_t s1 = 0; s1 < m; ++s1) {
    for (std::size_t s2 = s1 + 1; s2 < m; ++s2) {
      if (s2 == grid.mirror(s1))
        continue;
      cplx sum{};
      double sum_sq = 0.0;
      for (const auto& d : draws) {
        const cplx x = d.n_tilde_hat[s1] * std::conj(d.n_tilde_hat[s2]);
        sum += x;
        sum_sq += std::norm(x);
      }
      CrossCovariance cc;
      cc.site1 = s1;
      cc.site2 = s2;
      cc.value = sum / ns;
      const double var_x =
          std::max(0.0, (sum_sq / ns - std::norm(cc.value)) * ns / (ns - 1.0));
      cc.standard_error = std::sqrt(var_x / ns);
      cc.z_score = cc.standard_error > 0.0 ? std::abs(cc.value) / cc.standard_error
                                           : 0.0;
      stats.max_cross_z_score = std::max(stats.max_cross_z_score, cc.z_score);
      stats.cross.push_back(cc);
    }
  }
  return stats;
}

} // namespace ipfe

namespace ipfe {

double lattice_lambda(const TurbulenceModel& model, const FrequencyGrid& grid) {
  if (!model.has_finite_lambda())
    throw DomainError("Λ divergent for pure Kolmogorov");
  double sum = 0.0;
  for (std::size_t s = 0; s < grid.size(); ++s) {
    const auto a = grid.frequency(s);
    sum += psd_transverse(model, std::hypot(a[0], a[1]));
  }
  return sum * grid.weight();
}

int check_outer_scale(const TurbulenceModel& model, const FrequencyGrid& grid) {
  if (!model.has_finite_lambda())
    return 0;
  int count = 0;
  if (model.outer_scale > 1.0 / grid.delta_a()) {
    std::ostringstream os;
    os << "outer scale exceeds grid support (L0 = " << model.outer_scale
       << " m > 1/delta_a = " << 1.0 / grid.delta_a() << " m)";
    warn(os.str());
    ++count;
  }
  if (model.outer_scale < grid.delta_x()) {
    std::ostringstream os;
    os << "turbulence spectrum wider than the frequency lattice (L0 = "
       << model.outer_scale << " m < 1/(n delta_a) = " << grid.delta_x() << " m)";
    warn(os.str());
    ++count;
  }
  return count;
}

} // namespace ipfe
