#include "ipfe/grid.hpp"

#include "ipfe/error.hpp"
#include "ipfe/fft.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace ipfe {

FrequencyGrid::FrequencyGrid(int dim, std::size_t n, double delta_a,
                             double wavelength)
    : dim_(dim), n_(n), delta_a_(delta_a), wavelength_(wavelength) {
  if (dim != 1 && dim != 2)
    throw ConfigError("grid dim must be 1 or 2");
  if (n < 2 || (n & (n - 1)) != 0)
    throw ConfigError("grid n must be a power of two >= 2");
  if (!(delta_a > 0.0) || !std::isfinite(delta_a))
    throw ConfigError("grid delta_a must be > 0");
  if (!(wavelength > 0.0) || !std::isfinite(wavelength))
    throw ConfigError("grid wavelength must be > 0");
  wavenumber_ = 2.0 * std::numbers::pi / wavelength_;
  size_ = dim_ == 1 ? n_ : n_ * n_;
  weight_ = dim_ == 1 ? delta_a_ : delta_a_ * delta_a_;
  freq_sq_.resize(size_);
  for (std::size_t s = 0; s < size_; ++s) {
    const auto f = frequency(s);
    freq_sq_[s] = f[0] * f[0] + f[1] * f[1];
  }
}

double FrequencyGrid::position_weight() const {
  const double dx = delta_x();
  return dim_ == 1 ? dx : dx * dx;
}

double FrequencyGrid::axis_frequency(std::size_t j) const {
  return (static_cast<double>(j) - static_cast<double>(n_ / 2)) * delta_a_;
}

double FrequencyGrid::axis_position(std::size_t l) const {
  return (static_cast<double>(l) - static_cast<double>(n_ / 2)) * delta_x();
}

std::array<std::size_t, 2> FrequencyGrid::axis_indices(std::size_t site) const {
  if (dim_ == 1)
    return {site, 0};
  return {site / n_, site % n_};
}

std::size_t FrequencyGrid::site_index(std::array<std::size_t, 2> idx) const {
  return dim_ == 1 ? idx[0] : idx[0] * n_ + idx[1];
}

std::array<double, 2> FrequencyGrid::frequency(std::size_t site) const {
  const auto idx = axis_indices(site);
  if (dim_ == 1)
    return {axis_frequency(idx[0]), 0.0};
  return {axis_frequency(idx[0]), axis_frequency(idx[1])};
}

double FrequencyGrid::max_frequency_sq() const {
  const double amax = static_cast<double>(n_ / 2) * delta_a_;
  return dim_ * amax * amax;
}

std::size_t FrequencyGrid::mirror(std::size_t site) const {
  auto idx = axis_indices(site);
  for (int d = 0; d < dim_; ++d)
    idx[d] = (n_ - idx[d]) % n_;
  return site_index(idx);
}

std::size_t FrequencyGrid::shifted(std::size_t site,
                                   std::array<long, 2> offset) const {
  auto idx = axis_indices(site);
  const long n = static_cast<long>(n_);
  for (int d = 0; d < dim_; ++d) {
    long v = (static_cast<long>(idx[d]) + offset[d]) % n;
    if (v < 0)
      v += n;
    idx[d] = static_cast<std::size_t>(v);
  }
  return site_index(idx);
}

std::array<long, 2> FrequencyGrid::signed_offset(std::size_t site) const {
  const auto idx = axis_indices(site);
  const long half = static_cast<long>(n_ / 2);
  std::array<long, 2> out{0, 0};
  for (int d = 0; d < dim_; ++d)
    out[d] = static_cast<long>(idx[d]) - half;
  return out;
}

bool FrequencyGrid::operator==(const FrequencyGrid& o) const {
  return dim_ == o.dim_ && n_ == o.n_ && delta_a_ == o.delta_a_ &&
         wavelength_ == o.wavelength_;
}

void require_same_grid(const FrequencyGrid& a, const FrequencyGrid& b,
                       const char* what) {
  if (!(a == b)) {
    std::ostringstream os;
    os << what << ": grid mismatch (dim " << a.dim() << "/" << b.dim() << ", n "
       << a.n() << "/" << b.n() << ", delta_a " << a.delta_a() << "/"
       << b.delta_a() << ")";
    throw ShapeError(os.str());
  }
}

Spectrum::Spectrum(FrequencyGrid g, std::vector<cplx> v)
    : grid(std::move(g)), values(std::move(v)) {
  if (values.size() != grid.size())
    throw ShapeError("spectrum size does not match grid");
}

double Spectrum::norm_sq() const {
  double sum = 0.0;
  for (const auto& v : values)
    sum += std::norm(v);
  return sum * grid.weight();
}

double PositionField::norm_sq() const {
  double sum = 0.0;
  for (const auto& v : values)
    sum += std::norm(v);
  return sum * grid.position_weight();
}

Spectrum discrete_delta(const FrequencyGrid& grid, std::size_t site) {
  Spectrum s(grid);
  s[site] = 1.0 / grid.weight();
  return s;
}

Spectrum conj(const Spectrum& s) {
  Spectrum out = s;
  for (auto& v : out.values)
    v = std::conj(v);
  return out;
}

cplx contract(const Spectrum& f, const Spectrum& g) {
  require_same_grid(f.grid, g.grid, "contract");
  if (f.size() != g.size())
    throw ShapeError("contract: size mismatch");
  cplx sum{};
  for (std::size_t i = 0; i < f.size(); ++i)
    sum += f[i] * g[i];
  return sum * f.grid.weight();
}

namespace {

// (-1)^(j1 + j2 + D n/2): the DC-centring factor applied on both sides of the
// raw DFT.
double centring_sign(const FrequencyGrid& grid, std::size_t site) {
  const auto idx = grid.axis_indices(site);
  std::size_t parity = idx[0] + idx[1];
  return (parity % 2 == 0) ? 1.0 : -1.0;
}

double global_sign(const FrequencyGrid& grid) {
  const std::size_t parity = static_cast<std::size_t>(grid.dim()) * (grid.n() / 2);
  return (parity % 2 == 0) ? 1.0 : -1.0;
}

std::vector<std::size_t> shape_of(const FrequencyGrid& grid) {
  return grid.dim() == 1 ? std::vector<std::size_t>{grid.n()}
                         : std::vector<std::size_t>{grid.n(), grid.n()};
}

void centred_transform(std::vector<cplx>& data, const FrequencyGrid& grid,
                       fft::Direction dir, double scale) {
  for (std::size_t s = 0; s < data.size(); ++s)
    data[s] *= centring_sign(grid, s);
  fft::transform(data, shape_of(grid), dir);
  const double g = global_sign(grid) * scale;
  for (std::size_t s = 0; s < data.size(); ++s)
    data[s] *= centring_sign(grid, s) * g;
}

} // namespace

PositionField to_position(const Spectrum& s) {
  PositionField out(s.grid);
  out.values = s.values;
  centred_transform(out.values, s.grid, fft::Direction::Forward,
                    s.grid.weight());
  return out;
}

Spectrum to_frequency(const PositionField& f) {
  Spectrum out(f.grid);
  out.values = f.values;
  centred_transform(out.values, f.grid, fft::Direction::Backward,
                    f.grid.position_weight());
  return out;
}

} // namespace ipfe
