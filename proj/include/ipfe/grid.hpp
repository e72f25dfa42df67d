#pragma once

// Discretised transverse frequency / position lattices.
//
// Per axis: a_j = (j - n/2) delta_a, x_l = (l - n/2) delta_x, delta_x = 1/(n delta_a).
// Multi-dimensional sites are stored row-major (first axis slowest). A Dirac
// delta discretises to 1/delta_a^D at coinciding sites; contraction is
// sum f g delta_a^D.

#include <array>
#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace ipfe {

using cplx = std::complex<double>;

class FrequencyGrid {
public:
  FrequencyGrid() = default;
  /// Throws ConfigError unless dim is 1 or 2, n is an even power of two,
  /// and delta_a, wavelength are positive.
  FrequencyGrid(int dim, std::size_t n, double delta_a, double wavelength);

  int dim() const { return dim_; }
  std::size_t n() const { return n_; }
  double delta_a() const { return delta_a_; }
  double wavelength() const { return wavelength_; }
  double wavenumber() const { return wavenumber_; }
  double delta_x() const { return 1.0 / (static_cast<double>(n_) * delta_a_); }

  /// Number of lattice sites, n^D.
  std::size_t size() const { return size_; }
  /// Contraction weight delta_a^D.
  double weight() const { return weight_; }
  /// Position-domain weight delta_x^D.
  double position_weight() const;

  double axis_frequency(std::size_t j) const;
  double axis_position(std::size_t l) const;

  /// Per-axis indices of a site.
  std::array<std::size_t, 2> axis_indices(std::size_t site) const;
  std::size_t site_index(std::array<std::size_t, 2> idx) const;

  /// Frequency vector of a site (second entry 0 for D = 1).
  std::array<double, 2> frequency(std::size_t site) const;
  double frequency_sq(std::size_t site) const { return freq_sq_[site]; }
  /// |a|^2 for every site.
  std::span<const double> frequency_sq() const { return freq_sq_; }
  double max_frequency_sq() const;

  /// Site holding -a on the periodic lattice.
  std::size_t mirror(std::size_t site) const;
  /// Site holding a + b (periodic), for signed per-axis offsets in sites.
  std::size_t shifted(std::size_t site, std::array<long, 2> offset) const;
  /// Signed per-axis offset (in sites, in [-n/2, n/2)) represented by a site.
  std::array<long, 2> signed_offset(std::size_t site) const;

  bool operator==(const FrequencyGrid& other) const;

private:
  int dim_ = 1;
  std::size_t n_ = 0;
  double delta_a_ = 0.0;
  double wavelength_ = 0.0;
  double wavenumber_ = 0.0;
  std::size_t size_ = 0;
  double weight_ = 0.0;
  std::vector<double> freq_sq_;
};

/// Throws ShapeError when the grids differ.
void require_same_grid(const FrequencyGrid& a, const FrequencyGrid& b,
                       const char* what);

/// A field on the frequency lattice: angular spectrum G(a).
struct Spectrum {
  FrequencyGrid grid;
  std::vector<cplx> values;

  Spectrum() = default;
  explicit Spectrum(FrequencyGrid g)
      : grid(std::move(g)), values(grid.size(), cplx{}) {}
  Spectrum(FrequencyGrid g, std::vector<cplx> v);

  cplx& operator[](std::size_t i) { return values[i]; }
  const cplx& operator[](std::size_t i) const { return values[i]; }
  std::size_t size() const { return values.size(); }

  /// Discrete ||G||^2 = sum |G|^2 delta_a^D.
  double norm_sq() const;
};

/// A field on the conjugate position lattice, g(x).
struct PositionField {
  FrequencyGrid grid;
  std::vector<cplx> values;

  PositionField() = default;
  explicit PositionField(FrequencyGrid g)
      : grid(std::move(g)), values(grid.size(), cplx{}) {}

  /// sum |g|^2 delta_x^D.
  double norm_sq() const;
};

/// Discrete delta at a site: value 1/delta_a^D.
Spectrum discrete_delta(const FrequencyGrid& grid, std::size_t site);

Spectrum conj(const Spectrum& s);

/// f <> g = sum f(a) g(a) delta_a^D.
cplx contract(const Spectrum& f, const Spectrum& g);

/// g(x) = sum_a G(a) exp(-i 2 pi a.x) delta_a^D.
PositionField to_position(const Spectrum& s);
/// G(a) = sum_x g(x) exp(+i 2 pi a.x) delta_x^D.
Spectrum to_frequency(const PositionField& f);

} // namespace ipfe
