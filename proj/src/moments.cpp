#include "ipfe/moments.hpp"

#include "ipfe/diagnostics.hpp"
#include "ipfe/error.hpp"
#include "ipfe/fft.hpp"
#include "ipfe/phase_screen.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <sstream>

namespace ipfe {

using std::numbers::pi;

namespace {

std::size_t ipow(std::size_t base, unsigned e) {
  std::size_t r = 1;
  for (unsigned i = 0; i < e; ++i)
    r *= base;
  return r;
}

void require_same_shape(const MomentKernel& a, const MomentKernel& b,
                        const char* what) {
  require_same_grid(a.grid(), b.grid(), what);
  if (a.m() != b.m() || a.n() != b.n())
    throw ShapeError(std::string(what) + ": order mismatch");
}

void require_square(const MomentKernel& h, const char* what) {
  if (h.m() != h.n()) {
    std::ostringstream os;
    os << what << " requires m = n (got " << h.m() << "," << h.n() << ")";
    throw ShapeError(os.str());
  }
}

} // namespace

MomentKernel::MomentKernel(FrequencyGrid grid, unsigned m, unsigned n, double z_)
    : z(z_), grid_(std::move(grid)), m_(m), n_(n),
      values_(ipow(grid_.size(), m + n), cplx{}) {}

std::size_t MomentKernel::flat(std::span<const std::size_t> sites) const {
  if (sites.size() != rank())
    throw ShapeError("kernel index has wrong rank");
  std::size_t idx = 0;
  const std::size_t ns = grid_.size();
  for (auto s : sites) {
    if (s >= ns)
      throw ShapeError("kernel site index out of range");
    idx = idx * ns + s;
  }
  return idx;
}

std::vector<std::size_t> MomentKernel::unflat(std::size_t index) const {
  std::vector<std::size_t> out(rank());
  const std::size_t ns = grid_.size();
  for (std::size_t i = rank(); i-- > 0;) {
    out[i] = index % ns;
    index /= ns;
  }
  return out;
}

cplx& MomentKernel::at(std::span<const std::size_t> s) { return values_[flat(s)]; }
const cplx& MomentKernel::at(std::span<const std::size_t> s) const {
  return values_[flat(s)];
}
cplx& MomentKernel::at(std::initializer_list<std::size_t> s) {
  return at(std::span<const std::size_t>(s.begin(), s.size()));
}
const cplx& MomentKernel::at(std::initializer_list<std::size_t> s) const {
  return at(std::span<const std::size_t>(s.begin(), s.size()));
}

std::vector<std::size_t> MomentKernel::tensor_shape() const {
  return std::vector<std::size_t>(rank() * static_cast<unsigned>(grid_.dim()),
                                  grid_.n());
}

MomentKernel& MomentKernel::operator+=(const MomentKernel& o) {
  require_same_shape(*this, o, "kernel +=");
  for (std::size_t i = 0; i < values_.size(); ++i)
    values_[i] += o.values_[i];
  return *this;
}

MomentKernel& MomentKernel::operator*=(cplx s) {
  for (auto& v : values_)
    v *= s;
  return *this;
}

MomentKernel MomentKernel::zeros_like() const {
  return MomentKernel(grid_, m_, n_, z);
}

MomentKernel outer_product(const Spectrum& g) {
  MomentKernel h(g.grid, 1, 1);
  const std::size_t n = g.size();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      h[i * n + j] = g[i] * std::conj(g[j]);
  return h;
}

MomentKernel delta_diagonal(const FrequencyGrid& grid, cplx c) {
  MomentKernel h(grid, 1, 1);
  const std::size_t n = grid.size();
  for (std::size_t i = 0; i < n; ++i)
    h[i * n + i] = c / grid.weight();
  return h;
}

MomentKernel from_spectrum(const Spectrum& s) {
  MomentKernel h(s.grid, 1, 0);
  h.values() = s.values;
  return h;
}

Spectrum to_spectrum(const MomentKernel& h) {
  if (h.rank() != 1)
    throw ShapeError("to_spectrum requires a rank-1 kernel");
  return Spectrum(h.grid(), h.values());
}

MomentKernel symmetrize(const MomentKernel& h) {
  const unsigned m = h.m(), n = h.n();
  std::vector<unsigned> ket(m), bra(n);
  std::iota(ket.begin(), ket.end(), 0u);
  std::iota(bra.begin(), bra.end(), 0u);
  std::vector<std::vector<unsigned>> ket_perms, bra_perms;
  do
    ket_perms.push_back(ket);
  while (std::next_permutation(ket.begin(), ket.end()));
  do
    bra_perms.push_back(bra);
  while (std::next_permutation(bra.begin(), bra.end()));

  MomentKernel out = h.zeros_like();
  const double count = static_cast<double>(ket_perms.size() * bra_perms.size());
  std::vector<std::size_t> src(h.rank());
  for (std::size_t e = 0; e < h.size(); ++e) {
    const auto idx = h.unflat(e);
    cplx acc{};
    for (const auto& kp : ket_perms) {
      for (const auto& bp : bra_perms) {
        for (unsigned i = 0; i < m; ++i)
          src[i] = idx[kp[i]];
        for (unsigned j = 0; j < n; ++j)
          src[m + j] = idx[m + bp[j]];
        acc += h[h.flat(src)];
      }
    }
    out[e] = acc / count;
  }
  return out;
}

MomentKernel conjugate_transpose(const MomentKernel& h) {
  MomentKernel out(h.grid(), h.n(), h.m(), h.z);
  std::vector<std::size_t> dst(h.rank());
  for (std::size_t e = 0; e < h.size(); ++e) {
    const auto idx = h.unflat(e);
    for (unsigned j = 0; j < h.n(); ++j)
      dst[j] = idx[h.m() + j];
    for (unsigned i = 0; i < h.m(); ++i)
      dst[h.n() + i] = idx[i];
    out[out.flat(dst)] = std::conj(h[e]);
  }
  return out;
}

KernelEquation::KernelEquation(const TurbulenceModel& model,
                               const FrequencyGrid& grid)
    : grid_(grid), model_(model) {
  model.validate();
  if (!model.has_finite_lambda())
    throw DomainError("Λ divergent for pure Kolmogorov");
  k2_ = grid.wavenumber() * grid.wavenumber();
  const std::size_t ns = grid.size();
  phi_.resize(ns);
  for (std::size_t s = 0; s < ns; ++s) {
    const auto a = grid.frequency(s);
    phi_[s] = psd_transverse(model, std::hypot(a[0], a[1]));
  }
  lambda_ = ::ipfe::lattice_lambda(model, grid);

  // Raw-DFT layout: shift s sits at index s mod n per axis.
  std::vector<cplx> raw(ns);
  for (std::size_t s = 0; s < ns; ++s) {
    const auto off = grid.signed_offset(s);
    raw[grid.shifted(0, off)] = phi_[s] * grid.weight();
  }
  std::vector<std::size_t> shape(static_cast<std::size_t>(grid.dim()), grid.n());
  fft::transform(raw, shape, fft::Direction::Backward);
  correlation_.resize(ns);
  for (std::size_t d = 0; d < ns; ++d)
    correlation_[d] = raw[d].real();
}

MomentKernel KernelEquation::pair_shift(const MomentKernel& h, unsigned p,
                                        unsigned q, bool same_sign) const {
  require_same_grid(h.grid(), grid_, "pair_shift");
  if (p >= h.rank() || q >= h.rank() || p == q)
    throw ShapeError("pair_shift: invalid slot pair");
  const std::size_t dim = static_cast<std::size_t>(grid_.dim());
  const std::size_t ns = grid_.size();
  const std::size_t n = grid_.n();
  const auto shape = h.tensor_shape();

  MomentKernel out = h;
  auto data = std::span<cplx>(out.values());
  const auto dir_q = same_sign ? fft::Direction::Backward : fft::Direction::Forward;
  const auto inv_q = same_sign ? fft::Direction::Forward : fft::Direction::Backward;
  fft::transform_axes(data, shape, p * dim, dim, fft::Direction::Forward);
  fft::transform_axes(data, shape, q * dim, dim, dir_q);

  const std::size_t rank = h.rank();
  const std::size_t stride_p = ipow(ns, static_cast<unsigned>(rank - 1 - p));
  const std::size_t stride_q = ipow(ns, static_cast<unsigned>(rank - 1 - q));
  const double norm = 1.0 / (static_cast<double>(ns) * static_cast<double>(ns));
  for (std::size_t e = 0; e < data.size(); ++e) {
    const std::size_t lp = (e / stride_p) % ns;
    const std::size_t lq = (e / stride_q) % ns;
    std::size_t d;
    if (dim == 1) {
      d = (lp + n - lq) % n;
    } else {
      const std::size_t d0 = (lp / n + n - lq / n) % n;
      const std::size_t d1 = (lp % n + n - lq % n) % n;
      d = d0 * n + d1;
    }
    data[e] *= correlation_[d] * norm;
  }

  fft::transform_axes(data, shape, q * dim, dim, inv_q);
  fft::transform_axes(data, shape, p * dim, dim, fft::Direction::Backward);
  return out;
}

std::vector<cplx> KernelEquation::diagonal_coefficients(unsigned m, unsigned n) const {
  return diagonal_coefficients(m, n, 0.5 * k2_ * lambda_ * static_cast<double>(m + n));
}

std::vector<cplx> KernelEquation::diagonal_coefficients(unsigned m, unsigned n,
                                                        double decay_rate) const {
  const std::size_t ns = grid_.size();
  const unsigned rank = m + n;
  const double c = pi * grid_.wavelength();
  const auto a2 = grid_.frequency_sq();
  // Built slot by slot: drift of the leading slots, then append one more.
  std::vector<double> drift{0.0};
  for (unsigned slot = 0; slot < rank; ++slot) {
    const double sign = slot < m ? 1.0 : -1.0;
    std::vector<double> next;
    next.reserve(drift.size() * ns);
    for (double d : drift)
      for (std::size_t s = 0; s < ns; ++s)
        next.push_back(d + sign * a2[s]);
    drift = std::move(next);
  }
  std::vector<cplx> out(drift.size());
  for (std::size_t e = 0; e < drift.size(); ++e)
    out[e] = cplx(-decay_rate, c * drift[e]);
  return out;
}

MomentKernel KernelEquation::add_pair_terms(const MomentKernel& h) const {
  MomentKernel out = h.zeros_like();
  if (!(k2_ * lambda_ > 0.0))
    return out;
  const unsigned m = h.m(), n = h.n();
  auto accumulate = [&](unsigned p, unsigned q, bool same, double coef) {
    const MomentKernel t = pair_shift(h, p, q, same);
    for (std::size_t e = 0; e < out.size(); ++e)
      out[e] += coef * t[e];
  };
  for (unsigned i = 0; i < m; ++i)
    for (unsigned j = i + 1; j < m; ++j)
      accumulate(i, j, false, -k2_);
  for (unsigned i = 0; i < n; ++i)
    for (unsigned j = i + 1; j < n; ++j)
      accumulate(m + i, m + j, false, -k2_);
  for (unsigned i = 0; i < m; ++i)
    for (unsigned j = 0; j < n; ++j)
      accumulate(i, m + j, true, k2_);
  return out;
}

MomentKernel KernelEquation::rhs(const MomentKernel& h) const {
  require_same_grid(h.grid(), grid_, "hierarchy_rhs");
  return rhs(h, diagonal_coefficients(h.m(), h.n()));
}

MomentKernel KernelEquation::rhs(const MomentKernel& h,
                                 std::span<const cplx> diagonal) const {
  require_same_grid(h.grid(), grid_, "hierarchy_rhs");
  if (diagonal.size() != h.size())
    throw ShapeError("hierarchy_rhs: diagonal coefficients have the wrong size");
  MomentKernel out = h;
  if (k2_ * lambda_ > 0.0) {
    out = add_pair_terms(h);
    for (std::size_t e = 0; e < out.size(); ++e)
      out[e] += diagonal[e] * h[e];
  } else {
    for (std::size_t e = 0; e < out.size(); ++e)
      out[e] = diagonal[e] * h[e];
  }
  out.z = h.z;
  return out;
}

MomentKernel KernelEquation::biphoton_rhs(const MomentKernel& h) const {
  return biphoton_rhs(h, diagonal_coefficients(2, 2, 2.0 * k2_ * lambda_));
}

MomentKernel KernelEquation::biphoton_rhs(const MomentKernel& h,
                                          std::span<const cplx> diagonal) const {
  require_same_grid(h.grid(), grid_, "biphoton_rhs");
  if (h.m() != 2 || h.n() != 2)
    throw ShapeError("biphoton_rhs requires a (2,2) kernel");
  if (diagonal.size() != h.size())
    throw ShapeError("biphoton_rhs: diagonal coefficients have the wrong size");
  // Slots: a1 -> 0, a3 -> 1 (kets); a2 -> 2, a4 -> 3 (bras).
  constexpr unsigned a1 = 0, a3 = 1, a2 = 2, a4 = 3;
  struct Term {
    unsigned p, q;
    bool same;
    double weight;
  };
  const Term terms[] = {
      {a1, a2, true, +1.0},  {a3, a4, true, +1.0},  {a1, a4, true, +1.0},
      {a3, a2, true, +1.0},  {a1, a3, false, -1.0}, {a2, a4, false, -1.0},
  };
  MomentKernel out = h.zeros_like();
  for (const auto& t : terms) {
    if (!(k2_ * lambda_ > 0.0))
      break;
    const MomentKernel s = pair_shift(h, t.p, t.q, t.same);
    for (std::size_t e = 0; e < out.size(); ++e)
      out[e] += t.weight * k2_ * s[e];
  }
  for (std::size_t e = 0; e < out.size(); ++e)
    out[e] += diagonal[e] * h[e];
  out.z = h.z;
  return out;
}

Spectrum evolve_h10(const Spectrum& b10, const TurbulenceModel& model, double z) {
  model.validate();
  if (!model.has_finite_lambda())
    throw DomainError("Λ divergent for pure Kolmogorov");
  const double k = b10.grid.wavenumber();
  const double decay = 0.5 * k * k * lattice_lambda(model, b10.grid) * z;
  const double c = pi * b10.grid.wavelength() * z;
  Spectrum out = b10;
  for (std::size_t i = 0; i < out.size(); ++i)
    out[i] *= std::exp(cplx(-decay, c * b10.grid.frequency_sq(i)));
  return out;
}

MomentKernel h11_rhs(const MomentKernel& h, const TurbulenceModel& model) {
  if (h.m() != 1 || h.n() != 1)
    throw ShapeError("h11_rhs requires a (1,1) kernel");
  check_outer_scale(model, h.grid());
  return KernelEquation(model, h.grid()).rhs(h);
}

MomentKernel biphoton_rhs(const MomentKernel& f, const TurbulenceModel& model) {
  if (f.m() != 2 || f.n() != 2)
    throw ShapeError("biphoton_rhs requires a (2,2) kernel");
  if (f.grid().dim() != 1 || f.grid().n() > 16) {
    std::ostringstream os;
    os << "biphoton_rhs memory bound: requires D = 1 and n <= 16 (got D = "
       << f.grid().dim() << ", n = " << f.grid().n() << ")";
    throw ConfigError(os.str());
  }
  return KernelEquation(model, f.grid()).biphoton_rhs(f);
}

namespace {

void check_order_bound(const MomentKernel& h) {
  if (h.rank() > 4 || (h.grid().dim() == 2 && h.rank() > 2)) {
    std::ostringstream os;
    os << "hierarchy order bound exceeded: (m,n) = (" << h.m() << "," << h.n()
       << ") on a D = " << h.grid().dim()
       << " grid (limit m+n <= 4 for D = 1, m+n <= 2 for D = 2)";
    throw ConfigError(os.str());
  }
}

} // namespace

MomentKernel hierarchy_rhs(const MomentKernel& h, const TurbulenceModel& model) {
  check_order_bound(h);
  return KernelEquation(model, h.grid()).rhs(h);
}

double step_guard(const KernelEquation& eq, double dz) {
  const auto& g = eq.grid();
  return std::max(pi * g.wavelength() * std::abs(dz) * g.max_frequency_sq(),
                  eq.k2() * eq.lattice_lambda() * std::abs(dz));
}

std::size_t minimum_steps(const TurbulenceModel& model, const FrequencyGrid& grid,
                          double z_total, double guard) {
  const KernelEquation eq(model, grid);
  const double per_metre = step_guard(eq, 1.0);
  const double steps = std::floor(per_metre * std::abs(z_total) / guard) + 1.0;
  return std::max<std::size_t>(1, static_cast<std::size_t>(steps));
}

MomentKernel evolve_kernel(const MomentKernel& h0, const TurbulenceModel& model,
                           double z_total, const EvolveOptions& options) {
  check_order_bound(h0);
  if (options.n_steps == 0)
    throw ConfigError("evolve: n_steps must be >= 1");
  const KernelEquation eq(model, h0.grid());
  const double dz = z_total / static_cast<double>(options.n_steps);
  const double guard = step_guard(eq, dz);
  if (!(guard < 0.1)) {
    std::ostringstream os;
    os << "evolve: step guard max(pi*lambda*dz*|a|^2_max, k^2*Lambda*dz) < 0.1 "
          "violated ("
       << guard << " with dz = " << dz << " m; need at least "
       << minimum_steps(model, h0.grid(), z_total) << " steps)";
    throw ConfigError(os.str());
  }
  check_outer_scale(model, h0.grid());

  const bool biphoton = options.biphoton_form && h0.m() == 2 && h0.n() == 2;
  const auto diagonal =
      biphoton ? eq.diagonal_coefficients(2, 2, 2.0 * eq.k2() * eq.lattice_lambda())
               : eq.diagonal_coefficients(h0.m(), h0.n());
  auto f = [&](const MomentKernel& h) {
    return biphoton ? eq.biphoton_rhs(h, diagonal) : eq.rhs(h, diagonal);
  };
  auto axpy = [](const MomentKernel& x, double a, const MomentKernel& y) {
    MomentKernel r = x;
    for (std::size_t i = 0; i < r.size(); ++i)
      r[i] += a * y[i];
    return r;
  };

  MomentKernel h = h0;
  const double z0 = h0.z;
  for (std::size_t step = 0; step < options.n_steps; ++step) {
    const MomentKernel k1 = f(h);
    const MomentKernel k2 = f(axpy(h, 0.5 * dz, k1));
    const MomentKernel k3 = f(axpy(h, 0.5 * dz, k2));
    const MomentKernel k4 = f(axpy(h, dz, k3));
    for (std::size_t i = 0; i < h.size(); ++i)
      h[i] += dz / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    h.z = z0 + static_cast<double>(step + 1) * dz;
    if (options.on_step)
      options.on_step(h);
  }

  if (h.m() == h.n() && h.m() > 0) {
    const double mass = boundary_mass(h);
    if (mass > 1e-6) {
      std::ostringstream os;
      os << "kernel boundary mass " << mass
         << " of the trace exceeds 1e-6: periodic wrap-around may be significant";
      warn(os.str());
    }
  }
  return h;
}

MomentKernel evolve_h11(const MomentKernel& h0, const TurbulenceModel& model,
                        double z_total, std::size_t n_steps) {
  if (h0.m() != 1 || h0.n() != 1)
    throw ShapeError("evolve_h11 requires a (1,1) kernel");
  return evolve_kernel(h0, model, z_total, EvolveOptions{n_steps, false, {}});
}

MomentKernel evolve_biphoton(const MomentKernel& f0, const TurbulenceModel& model,
                             double z_total, std::size_t n_steps) {
  if (f0.m() != 2 || f0.n() != 2)
    throw ShapeError("evolve_biphoton requires a (2,2) kernel");
  if (f0.grid().dim() != 1 || f0.grid().n() > 16)
    throw ConfigError("evolve_biphoton memory bound: requires D = 1 and n <= 16");
  return evolve_kernel(f0, model, z_total, EvolveOptions{n_steps, true, {}});
}

std::complex<double> kernel_trace_complex(const MomentKernel& h) {
  require_square(h, "kernel_trace");
  const std::size_t ns = h.sites();
  const std::size_t count = ipow(ns, h.m());
  std::vector<std::size_t> idx(h.rank());
  cplx sum{};
  for (std::size_t c = 0; c < count; ++c) {
    std::size_t r = c;
    for (unsigned i = h.m(); i-- > 0;) {
      idx[i] = r % ns;
      idx[h.m() + i] = idx[i];
      r /= ns;
    }
    sum += h[h.flat(idx)];
  }
  return sum * std::pow(h.grid().weight(), static_cast<double>(h.m()));
}

double kernel_trace(const MomentKernel& h) { return kernel_trace_complex(h).real(); }

double hermiticity_residual(const MomentKernel& h) {
  require_square(h, "hermiticity_residual");
  double scale = 0.0;
  for (const auto& v : h.values())
    scale = std::max(scale, std::abs(v));
  if (scale == 0.0)
    return 0.0;
  const MomentKernel ct = conjugate_transpose(h);
  double worst = 0.0;
  for (std::size_t e = 0; e < h.size(); ++e)
    worst = std::max(worst, std::abs(h[e] - ct[e]));
  return worst / scale;
}

double boundary_mass(const MomentKernel& h) {
  require_square(h, "boundary_mass");
  const auto& g = h.grid();
  const std::size_t ns = g.size();
  const long n = static_cast<long>(g.n());
  auto outer = [&](std::size_t site) {
    const auto off = g.signed_offset(site);
    for (int d = 0; d < g.dim(); ++d)
      if (8 * std::abs(off[d]) >= 3 * n)
        return true;
    return false;
  };
  const std::size_t count = ipow(ns, h.m());
  std::vector<std::size_t> idx(h.rank());
  double band = 0.0, total = 0.0;
  for (std::size_t c = 0; c < count; ++c) {
    std::size_t r = c;
    bool in_band = false;
    for (unsigned i = h.m(); i-- > 0;) {
      idx[i] = r % ns;
      idx[h.m() + i] = idx[i];
      in_band = in_band || outer(idx[i]);
      r /= ns;
    }
    const double v = std::abs(h[h.flat(idx)]);
    total += v;
    if (in_band)
      band += v;
  }
  return total > 0.0 ? band / total : 0.0;
}

} // namespace ipfe
