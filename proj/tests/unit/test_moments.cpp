#include "doctest.h"

#include "helpers.hpp"
#include "oracles/oracles.hpp"

#include "ipfe/config.hpp"
#include "ipfe/diagnostics.hpp"
#include "ipfe/error.hpp"
#include "ipfe/moments.hpp"
#include "ipfe/splitstep.hpp"

#include <cmath>
#include <numbers>
#include <random>

using namespace ipfe;
using std::numbers::pi;

namespace {

const TurbulenceModel kModel = TurbulenceModel::von_karman(1.07e-8, 1.0 / 60.0, 0.01);
const TurbulenceModel kNone = TurbulenceModel::von_karman(0.0, 1.0 / 60.0, 0.01);

MomentKernel random_kernel(const FrequencyGrid& g, unsigned m, unsigned n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  MomentKernel h(g, m, n);
  h.values() = helpers::random_complex(rng, h.size());
  return h;
}

MomentKernel random_h11(const FrequencyGrid& g, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  MomentKernel h(g, 1, 1);
  h.values() = helpers::random_hermitian(rng, g.size());
  return h;
}

double rel_diff(const std::vector<cplx>& a, const std::vector<cplx>& b) {
  return helpers::max_abs_diff(a, b) / std::max(helpers::max_abs(b), 1e-300);
}

// Symmetric bi-photon density: sum of psi psi^dagger over symmetric two-photon
// amplitudes, stored in slot order (a1, a3, a2, a4).
MomentKernel random_biphoton(const FrequencyGrid& g, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const std::size_t n = g.size();
  MomentKernel f(g, 2, 2);
  for (int term = 0; term < 3; ++term) {
    auto psi = helpers::random_complex(rng, n * n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < i; ++j)
        psi[i * n + j] = psi[j * n + i];
    for (std::size_t p = 0; p < n * n; ++p)
      for (std::size_t q = 0; q < n * n; ++q)
        f[p * n * n + q] += psi[p] * std::conj(psi[q]);
  }
  return f;
}

} // namespace

TEST_CASE("evolve_h10 closed form") {
  const FrequencyGrid g(1, 32, 20.0, 1e-6);
  const auto b = gaussian_beam(g, 0.004);
  CHECK(evolve_h10(b, kModel, 0.0).values == b.values);
  const double k2 = g.wavenumber() * g.wavenumber();
  const double lam = oracle::grid_lambda(kModel, g);
  const double z = 2.0 / (k2 * lam);
  const auto h = evolve_h10(b, kModel, z);
  const auto free = free_space_step(b, z);
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (std::abs(b[i]) < 1e-30)
      continue;
    CHECK(std::abs(h[i]) / std::abs(b[i]) == doctest::Approx(std::exp(-1.0)).epsilon(1e-12));
    CHECK(std::abs(h[i] * std::exp(1.0) - free[i]) < 1e-12 * std::abs(b[i]));
  }
  CHECK_THROWS_AS(evolve_h10(b, TurbulenceModel::kolmogorov(1e-14), 1.0), DomainError);
}

TEST_CASE("h11 right-hand side") {
  const FrequencyGrid g(1, 8, 20.0, 1e-6);
  SUBCASE("uniform diagonal is stationary") {
    const auto rhs = h11_rhs(delta_diagonal(g, 2.5), kModel);
    const double k2l = g.wavenumber() * g.wavenumber() * lattice_lambda(kModel, g);
    CHECK(helpers::max_abs(rhs.values()) < 1e-12 * k2l * 2.5 / g.weight());
  }
  SUBCASE("no turbulence is pure drift") {
    const auto h = random_h11(g, 3);
    const auto rhs = h11_rhs(h, kNone);
    for (std::size_t i = 0; i < g.size(); ++i)
      for (std::size_t j = 0; j < g.size(); ++j) {
        const cplx drift = cplx(0, pi * g.wavelength() * (g.frequency_sq(i) - g.frequency_sq(j)));
        CHECK(rhs.at({i, j}) == drift * h.at({i, j}));
      }
  }
  SUBCASE("matches the loop oracle, 1-D and 2-D") {
    for (int dim : {1, 2}) {
      const FrequencyGrid gd(dim, 8, 20.0, 1e-6);
      const auto h = random_h11(gd, 4 + dim);
      const auto rhs = h11_rhs(h, kModel);
      CHECK(rel_diff(rhs.values(), oracle::h11_rhs(h.values(), kModel, gd)) < 1e-12);
    }
  }
  SUBCASE("Hermitian and traceless") {
    const auto h = random_h11(g, 9);
    const auto rhs = h11_rhs(h, kModel);
    CHECK(hermiticity_residual(rhs) < 1e-12);
    MomentKernel trial = h;
    MomentKernel step = rhs;
    step *= 1e-3;
    trial += step;
    CHECK(hermiticity_residual(trial) < 1e-12);
    const double k2l = g.wavenumber() * g.wavenumber() * lattice_lambda(kModel, g);
    CHECK(std::abs(kernel_trace(rhs)) < 1e-10 * k2l * helpers::max_abs(h.values()) * g.size() * g.weight());
  }
  CHECK_THROWS_AS(h11_rhs(MomentKernel(g, 2, 0), kModel), ShapeError);
  CHECK_THROWS_AS(h11_rhs(delta_diagonal(g, 1.0), TurbulenceModel::kolmogorov(1e-14)), DomainError);
}

TEST_CASE("evolve_h11") {
  WarningCapture quiet;
  const FrequencyGrid g(1, 16, 20.0, 1e-6);
  SUBCASE("free space closed form") {
    const auto h0 = random_h11(g, 21);
    const double z = 10.0;
    const auto h = evolve_h11(h0, kNone, z, 400);
    std::vector<cplx> ref(h0.size());
    for (std::size_t i = 0; i < g.size(); ++i)
      for (std::size_t j = 0; j < g.size(); ++j)
        ref[i * g.size() + j] = h0.at({i, j}) * std::exp(cplx(0, pi * g.wavelength() * z *
                                                                  (g.frequency_sq(i) - g.frequency_sq(j))));
    CHECK(rel_diff(h.values(), ref) < 1e-10);
    CHECK(h.z == doctest::Approx(z));
  }
  SUBCASE("uniform diagonal unchanged") {
    const auto h0 = delta_diagonal(g, 1.0);
    const auto h = evolve_h11(h0, kModel, 10.0, 200);
    CHECK(rel_diff(h.values(), h0.values()) < 1e-12);
  }
  SUBCASE("trace, hermiticity and fourth-order convergence") {
    const auto h0 = outer_product(gaussian_beam(g, 0.004));
    const double z = 10.0;
    const auto ref = evolve_h11(h0, kModel, z, 1600);
    CHECK(std::abs(kernel_trace(ref) / kernel_trace(h0) - 1.0) < 1e-8);
    CHECK(hermiticity_residual(ref) < 1e-10);
    const double e1 = helpers::max_abs_diff(evolve_h11(h0, kModel, z, 100).values(), ref.values());
    const double e2 = helpers::max_abs_diff(evolve_h11(h0, kModel, z, 200).values(), ref.values());
    const double order = std::log2(e1 / e2);
    CHECK(order > 3.7);
    CHECK(order < 4.3);
  }
  SUBCASE("step guard") {
    const auto h0 = delta_diagonal(g, 1.0);
    CHECK_THROWS_WITH_AS(evolve_h11(h0, kModel, 10.0, 2), doctest::Contains("0.1"), ConfigError);
    const std::size_t steps = minimum_steps(kModel, g, 10.0);
    const KernelEquation eq(kModel, g);
    CHECK(step_guard(eq, 10.0 / steps) < 0.1);
    CHECK(step_guard(eq, 10.0 / (steps - 1)) >= 0.1);
  }
  SUBCASE("boundary mass") {
    CHECK(boundary_mass(delta_diagonal(g, 1.0)) == doctest::Approx(5.0 / 16.0));
    CHECK(boundary_mass(outer_product(gaussian_beam(g, 0.004))) > 1e-3);
    CHECK(boundary_mass(outer_product(gaussian_beam(FrequencyGrid(1, 64, 20.0, 1e-6), 0.004))) < 1e-6);
  }
}

TEST_CASE("biphoton right-hand side") {
  SUBCASE("no turbulence is pure drift") {
    const FrequencyGrid g(1, 4, 20.0, 1e-6);
    const auto f = random_biphoton(g, 1);
    const auto rhs = biphoton_rhs(f, kNone);
    for (std::size_t i = 0; i < f.size(); ++i) {
      const auto s = f.unflat(i);
      const double d = g.frequency_sq(s[0]) + g.frequency_sq(s[1]) - g.frequency_sq(s[2]) -
                       g.frequency_sq(s[3]);
      CHECK(rhs[i] == cplx(0, pi * g.wavelength() * d) * f[i]);
    }
  }
  SUBCASE("product of uniform diagonals is stationary") {
    const FrequencyGrid g(1, 8, 20.0, 1e-6);
    MomentKernel f(g, 2, 2);
    const double w = g.weight();
    for (std::size_t i = 0; i < g.size(); ++i)
      for (std::size_t j = 0; j < g.size(); ++j)
        f.at({i, j, i, j}) = 1.0 / (w * w);
    const auto oracle_rhs = oracle::biphoton_rhs(f.values(), kModel, g);
    CHECK(helpers::max_abs(oracle_rhs) < 1e-12 * helpers::max_abs(f.values()));
    CHECK(helpers::max_abs(biphoton_rhs(f, kModel).values()) < 1e-12 * helpers::max_abs(f.values()));
  }
  SUBCASE("matches the loop oracle") {
    const FrequencyGrid g(1, 8, 20.0, 1e-6);
    const auto f = random_biphoton(g, 2);
    CHECK(rel_diff(biphoton_rhs(f, kModel).values(), oracle::biphoton_rhs(f.values(), kModel, g)) < 1e-12);
  }
  SUBCASE("hermiticity and trace") {
    const FrequencyGrid g(1, 8, 20.0, 1e-6);
    const auto f = random_biphoton(g, 3);
    const auto rhs = biphoton_rhs(f, kModel);
    MomentKernel trial = rhs;
    trial *= 1e-3;
    trial += f;
    CHECK(hermiticity_residual(trial) < 1e-12);
    CHECK(std::abs(kernel_trace(rhs)) < 1e-8 * std::abs(kernel_trace(f)));
  }
  SUBCASE("memory bound") {
    CHECK_THROWS_AS(biphoton_rhs(MomentKernel(FrequencyGrid(1, 32, 20.0, 1e-6), 2, 2), kModel), ConfigError);
    CHECK_THROWS_AS(biphoton_rhs(MomentKernel(FrequencyGrid(2, 2, 20.0, 1e-6), 2, 2), kModel), ConfigError);
    CHECK_THROWS_AS(evolve_biphoton(MomentKernel(FrequencyGrid(1, 32, 20.0, 1e-6), 2, 2), kModel, 1.0, 10),
                    ConfigError);
  }
}

TEST_CASE("general hierarchy") {
  const FrequencyGrid g(1, 8, 20.0, 1e-6);
  SUBCASE("(0,0) is constant") {
    MomentKernel h(g, 0, 0);
    h[0] = 3.0;
    const auto rhs = hierarchy_rhs(h, kModel);
    REQUIRE(rhs.size() == 1);
    CHECK(rhs[0] == cplx{});
  }
  SUBCASE("(1,1) agrees bitwise with h11_rhs") {
    const auto h = random_h11(g, 5);
    CHECK(hierarchy_rhs(h, kModel).values() == h11_rhs(h, kModel).values());
  }
  SUBCASE("(2,2) agrees with the explicit bi-photon form") {
    const auto f = random_biphoton(g, 6);
    CHECK(rel_diff(hierarchy_rhs(f, kModel).values(), biphoton_rhs(f, kModel).values()) < 1e-12);
  }
  SUBCASE("loop oracle for every order") {
    for (auto [m, n] : {std::pair{2u, 0u}, {1u, 0u}, {0u, 2u}, {1u, 2u}, {3u, 1u}, {2u, 1u}}) {
      CAPTURE(m);
      CAPTURE(n);
      const auto h = symmetrize(random_kernel(g, m, n, 10 * m + n));
      CHECK(rel_diff(hierarchy_rhs(h, kModel).values(),
                     oracle::hierarchy_rhs(h.values(), m, n, kModel, g)) < 1e-12);
    }
  }
  SUBCASE("transform path equals loop path at n = 16") {
    const FrequencyGrid g16(1, 16, 20.0, 1e-6);
    const auto h = symmetrize(random_kernel(g16, 2, 1, 77));
    CHECK(rel_diff(hierarchy_rhs(h, kModel).values(),
                   oracle::hierarchy_rhs(h.values(), 2, 1, kModel, g16)) < 1e-12);
    const auto h11 = random_h11(g16, 78);
    CHECK(rel_diff(h11_rhs(h11, kModel).values(), oracle::h11_rhs(h11.values(), kModel, g16)) < 1e-12);
  }
  SUBCASE("conjugation duality") {
    for (auto [m, n] : {std::pair{2u, 1u}, {3u, 1u}, {2u, 0u}}) {
      const auto h = symmetrize(random_kernel(g, m, n, 31 + m));
      const auto a = hierarchy_rhs(conjugate_transpose(h), kModel);
      const auto b = conjugate_transpose(hierarchy_rhs(h, kModel));
      CHECK(a.m() == n);
      CHECK(rel_diff(a.values(), b.values()) < 1e-13);
    }
  }
  SUBCASE("trace of the (2,2) right-hand side vanishes") {
    const auto f = symmetrize(random_kernel(g, 2, 2, 55));
    const double scale = helpers::max_abs(f.values()) * g.size() * g.size() * g.weight() * g.weight();
    const double k2l = g.wavenumber() * g.wavenumber() * lattice_lambda(kModel, g);
    CHECK(std::abs(kernel_trace_complex(hierarchy_rhs(f, kModel))) < 1e-10 * k2l * scale);
  }
  SUBCASE("(1,0) integrated numerically reproduces the closed form") {
    const FrequencyGrid g32(1, 32, 20.0, 1e-6);
    const auto b = gaussian_beam(g32, 0.004);
    EvolveOptions opt;
    opt.n_steps = 400;
    const auto h = evolve_kernel(from_spectrum(b), kModel, 10.0, opt);
    CHECK(rel_diff(to_spectrum(h).values, evolve_h10(b, kModel, 10.0).values) < 1e-10);
  }
  SUBCASE("order bounds") {
    CHECK_THROWS_AS(hierarchy_rhs(MomentKernel(g, 3, 2), kModel), ConfigError);
    CHECK_THROWS_AS(hierarchy_rhs(MomentKernel(FrequencyGrid(2, 4, 20.0, 1e-6), 2, 1), kModel), ConfigError);
    CHECK_NOTHROW(hierarchy_rhs(MomentKernel(FrequencyGrid(2, 4, 20.0, 1e-6), 1, 1), kModel));
  }
}

TEST_CASE("kernel trace") {
  const FrequencyGrid g(1, 8, 20.0, 1e-6);
  const cplx c = 2.5;
  const auto d = delta_diagonal(g, c);
  CHECK(kernel_trace(d) == doctest::Approx(g.size() * g.weight() * (c.real() / g.weight())));
  const auto a = random_h11(g, 1);
  const auto b = random_h11(g, 2);
  MomentKernel sum = a;
  sum += b;
  CHECK(std::abs(kernel_trace_complex(sum) - kernel_trace_complex(a) - kernel_trace_complex(b)) <
        1e-14 * std::abs(kernel_trace(a)));
  CHECK(std::abs(kernel_trace_complex(a).imag()) < 1e-12 * std::abs(kernel_trace(a)));
  CHECK_THROWS_AS(kernel_trace(MomentKernel(g, 2, 1)), ShapeError);
}

TEST_CASE("kernel bookkeeping") {
  const FrequencyGrid g(1, 4, 20.0, 1e-6);
  const auto h = random_kernel(g, 2, 1, 8);
  for (std::size_t i = 0; i < h.size(); ++i)
    CHECK(h.flat(h.unflat(i)) == i);
  CHECK(h.tensor_shape() == std::vector<std::size_t>{4, 4, 4});
  CHECK(MomentKernel(FrequencyGrid(2, 4, 20.0, 1e-6), 1, 1).tensor_shape().size() == 4);
  const auto s = symmetrize(h);
  for (std::size_t a = 0; a < 4; ++a)
    for (std::size_t b = 0; b < 4; ++b)
      for (std::size_t c = 0; c < 4; ++c) {
        CHECK(s.at({a, b, c}) == s.at({b, a, c}));
        CHECK(s.at({a, b, c}) == 0.5 * (h.at({a, b, c}) + h.at({b, a, c})));
      }
  const auto t = conjugate_transpose(h);
  CHECK(t.m() == 1);
  CHECK(t.n() == 2);
  CHECK(t.at({3, 1, 2}) == std::conj(h.at({1, 2, 3})));
  const auto sp = gaussian_beam(g, 0.01);
  CHECK(to_spectrum(from_spectrum(sp)).values == sp.values);
  CHECK_THROWS_AS(h.at({0, 0}), ShapeError);
  CHECK_THROWS_AS(h.at({0, 0, 4}), ShapeError);
}
