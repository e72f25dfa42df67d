#include "ipfe/splitstep.hpp"

#include "ipfe/error.hpp"
#include "ipfe/parallel.hpp"
#include "ipfe/rng.hpp"

#include <cmath>
#include <numbers>
#include <optional>
#include <sstream>

namespace ipfe {

using std::numbers::pi;

PlanGuards PropagationPlan::guards() const {
  PlanGuards g;
  g.slab_thickness = slab_thickness();
  g.free_phase =
      pi * grid.wavelength() * g.slab_thickness * grid.max_frequency_sq();
  if (model.has_finite_lambda()) {
    g.lattice_lambda = lattice_lambda(model, grid);
    g.scattering = grid.wavenumber() * grid.wavenumber() * g.lattice_lambda *
                   g.slab_thickness;
  } else {
    g.lattice_lambda = INFINITY;
    g.scattering = INFINITY;
  }
  return g;
}

void PropagationPlan::validate() const {
  model.validate();
  std::ostringstream os;
  bool bad = false;
  if (n_slabs < 1) {
    os << " n_slabs >= 1 violated;";
    bad = true;
  }
  if (!(z_total >= 0.0) || !std::isfinite(z_total)) {
    os << " z_total >= 0 violated;";
    bad = true;
  }
  if (!model.has_finite_lambda()) {
    os << " propagation requires a von_karman spectrum (Λ divergent for pure "
          "Kolmogorov);";
    bad = true;
  }
  if (!bad) {
    const PlanGuards g = guards();
    if (!(g.free_phase < pi / 4.0)) {
      os << " per-slab phase bound pi*lambda*dz*|a_max|^2 < pi/4 violated ("
         << g.free_phase << " rad);";
      bad = true;
    }
    if (!(g.scattering < 0.1)) {
      os << " weak per-slab scattering bound k^2*Lambda*dz < 0.1 violated ("
         << g.scattering << ");";
      bad = true;
    }
  }
  if (bad)
    throw ConfigError("propagation plan invalid:" + os.str());
}

Spectrum free_space_step(const Spectrum& s, double dz) {
  Spectrum out = s;
  const double c = pi * s.grid.wavelength() * dz;
  for (std::size_t i = 0; i < out.size(); ++i) {
    const double a2 = s.grid.frequency_sq(i);
    if (a2 != 0.0)
      out[i] *= std::polar(1.0, c * a2);
  }
  return out;
}

Spectrum apply_screen(const Spectrum& s, const ScreenRealization& screen) {
  require_same_grid(s.grid, screen.grid, "apply_screen");
  if (screen.is_zero())
    return s;
  const auto phase = phase_screen_position(screen, s.grid.wavenumber());
  PositionField field = to_position(s);
  for (std::size_t i = 0; i < field.values.size(); ++i)
    field.values[i] *= std::polar(1.0, -phase[i]);
  return to_frequency(field);
}

Spectrum propagate_through(const Spectrum& s0,
                           std::span<const ScreenRealization> screens,
                           double z_total) {
  Spectrum s = s0;
  const double nslab = static_cast<double>(screens.size());
  double z_now = 0.0;
  for (std::size_t i = 0; i < screens.size(); ++i) {
    if (screens[i].is_zero())
      continue;
    const double z_plane = (static_cast<double>(i) + 0.5) * z_total / nslab;
    s = free_space_step(s, z_plane - z_now);
    s = apply_screen(s, screens[i]);
    z_now = z_plane;
  }
  if (z_total - z_now != 0.0)
    s = free_space_step(s, z_total - z_now);
  return s;
}

std::uint64_t screen_seed(std::uint64_t master_seed, std::size_t realization,
                          std::size_t slab) {
  return derive_seed({master_seed, realization, slab});
}

Spectrum propagate(const Spectrum& s0, const PropagationPlan& plan,
                   std::size_t realization_index) {
  plan.validate();
  require_same_grid(s0.grid, plan.grid, "propagate");
  const double dz = plan.slab_thickness();
  std::vector<ScreenRealization> screens;
  screens.reserve(plan.n_slabs);
  if (plan.z_total > 0.0) {
    for (std::size_t i = 0; i < plan.n_slabs; ++i)
      screens.push_back(draw_screen(plan.model, plan.grid, dz,
                                    screen_seed(plan.master_seed,
                                                realization_index, i)));
  }
  return propagate_through(s0, screens, plan.z_total);
}

double EnsembleStats::coherence_se(std::size_t i, std::size_t j) const {
  const std::size_t k = i * sites() + j;
  return std::hypot(coherence_se_re[k], coherence_se_im[k]);
}

double EnsembleStats::mean_se(std::size_t i) const {
  return std::hypot(mean_se_re[i], mean_se_im[i]);
}

namespace {

// Raw power sums for a group of realizations. Matrices hold the upper
// triangle only (i <= j) until finalisation.
struct Sums {
  std::vector<cplx> m1;
  std::vector<double> m1_re2, m1_im2;
  std::vector<cplx> c;
  std::vector<double> c_re2, c_im2;
  std::vector<cplx> an;
  std::vector<double> an_re2, an_im2;

  explicit Sums(std::size_t n)
      : m1(n), m1_re2(n), m1_im2(n), c(n * n), c_re2(n * n), c_im2(n * n),
        an(n * n), an_re2(n * n), an_im2(n * n) {}

  void add_sample(const std::vector<cplx>& g) {
    const std::size_t n = g.size();
    for (std::size_t i = 0; i < n; ++i) {
      m1[i] += g[i];
      m1_re2[i] += g[i].real() * g[i].real();
      m1_im2[i] += g[i].imag() * g[i].imag();
      for (std::size_t j = i; j < n; ++j) {
        const std::size_t k = i * n + j;
        const cplx x = g[i] * std::conj(g[j]);
        c[k] += x;
        c_re2[k] += x.real() * x.real();
        c_im2[k] += x.imag() * x.imag();
        const cplx y = g[i] * g[j];
        an[k] += y;
        an_re2[k] += y.real() * y.real();
        an_im2[k] += y.imag() * y.imag();
      }
    }
  }

  void add(const Sums& o) {
    auto acc = [](auto& a, const auto& b) {
      for (std::size_t i = 0; i < a.size(); ++i)
        a[i] += b[i];
    };
    acc(m1, o.m1);
    acc(m1_re2, o.m1_re2);
    acc(m1_im2, o.m1_im2);
    acc(c, o.c);
    acc(c_re2, o.c_re2);
    acc(c_im2, o.c_im2);
    acc(an, o.an);
    acc(an_re2, o.an_re2);
    acc(an_im2, o.an_im2);
  }
};

// Pairwise (binary-counter) reduction: pushing blocks in index order gives a
// tree that depends only on the number of blocks.
class PairwiseReducer {
public:
  void push(Sums block) {
    std::size_t level = 0;
    std::optional<Sums> carry(std::move(block));
    while (level < levels_.size() && levels_[level]) {
      levels_[level]->add(*carry);
      carry = std::move(levels_[level]);
      levels_[level].reset();
      ++level;
    }
    if (level == levels_.size())
      levels_.emplace_back();
    levels_[level] = std::move(carry);
  }

  Sums finish(std::size_t n) {
    std::optional<Sums> total;
    for (auto& l : levels_) {
      if (!l)
        continue;
      if (!total)
        total = std::move(l);
      else
        total->add(*l);
    }
    return total ? std::move(*total) : Sums(n);
  }

private:
  std::vector<std::optional<Sums>> levels_;
};

constexpr std::size_t kBlockSize = 8;
constexpr std::size_t kBlocksPerWave = 16;

void mean_and_se(double sum, double sum_sq, double ns, double& mean, double& se) {
  mean = sum / ns;
  const double var = std::max(0.0, (sum_sq / ns - mean * mean) * ns / (ns - 1.0));
  se = std::sqrt(var / ns);
}

} // namespace

EnsembleStats ensemble_moments(const Spectrum& s0, const PropagationPlan& plan,
                               std::size_t threads) {
  plan.validate();
  require_same_grid(s0.grid, plan.grid, "ensemble_moments");
  if (plan.n_realizations < 2)
    throw ConfigError("ensemble_moments requires n_realizations >= 2");
  check_outer_scale(plan.model, plan.grid);

  const std::size_t n = plan.grid.size();
  const std::size_t n_blocks = (plan.n_realizations + kBlockSize - 1) / kBlockSize;
  threads = resolve_threads(threads);

  PairwiseReducer reducer;
  for (std::size_t wave = 0; wave < n_blocks; wave += kBlocksPerWave) {
    const std::size_t count = std::min(kBlocksPerWave, n_blocks - wave);
    std::vector<std::optional<Sums>> partial(count);
    parallel_for(count, threads, [&](std::size_t b) {
      Sums sums(n);
      const std::size_t first = (wave + b) * kBlockSize;
      const std::size_t last = std::min(first + kBlockSize, plan.n_realizations);
      for (std::size_t r = first; r < last; ++r)
        sums.add_sample(propagate(s0, plan, r).values);
      partial[b] = std::move(sums);
    });
    for (auto& p : partial)
      reducer.push(std::move(*p));
  }
  const Sums total = reducer.finish(n);

  EnsembleStats st;
  st.grid = plan.grid;
  st.n_samples = plan.n_realizations;
  const double ns = static_cast<double>(plan.n_realizations);
  st.mean.resize(n);
  st.mean_se_re.resize(n);
  st.mean_se_im.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    double re, im;
    mean_and_se(total.m1[i].real(), total.m1_re2[i], ns, re, st.mean_se_re[i]);
    mean_and_se(total.m1[i].imag(), total.m1_im2[i], ns, im, st.mean_se_im[i]);
    st.mean[i] = {re, im};
  }
  auto finish_matrix = [&](const std::vector<cplx>& sum,
                           const std::vector<double>& re2,
                           const std::vector<double>& im2, bool hermitian,
                           std::vector<cplx>& out, std::vector<double>& se_re,
                           std::vector<double>& se_im) {
    out.assign(n * n, cplx{});
    se_re.assign(n * n, 0.0);
    se_im.assign(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i; j < n; ++j) {
        const std::size_t k = i * n + j;
        double re, im;
        mean_and_se(sum[k].real(), re2[k], ns, re, se_re[k]);
        mean_and_se(sum[k].imag(), im2[k], ns, im, se_im[k]);
        if (i == j && hermitian) {
          im = 0.0;
          se_im[k] = 0.0;
        }
        out[k] = {re, im};
        const std::size_t t = j * n + i;
        out[t] = hermitian ? std::conj(out[k]) : out[k];
        se_re[t] = se_re[k];
        se_im[t] = se_im[k];
      }
    }
  };
  finish_matrix(total.c, total.c_re2, total.c_im2, true, st.coherence,
                st.coherence_se_re, st.coherence_se_im);
  finish_matrix(total.an, total.an_re2, total.an_im2, false, st.anomalous,
                st.anomalous_se_re, st.anomalous_se_im);
  return st;
}

} // namespace ipfe
