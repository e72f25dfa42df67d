#include "oracles.hpp"

#include <boost/multiprecision/cpp_bin_float.hpp>

#include <Eigen/Dense>

#include <cmath>
#include <numbers>

namespace oracle {

using std::numbers::pi;

namespace {

std::size_t axis_count(const FrequencyGrid& g) { return static_cast<std::size_t>(g.dim()); }

// Per-axis site digits, first axis slowest.
std::array<long, 2> digits(const FrequencyGrid& g, std::size_t site) {
  const long n = static_cast<long>(g.n());
  if (g.dim() == 1)
    return {static_cast<long>(site), 0};
  return {static_cast<long>(site) / n, static_cast<long>(site) % n};
}

std::size_t undigits(const FrequencyGrid& g, std::array<long, 2> d) {
  const long n = static_cast<long>(g.n());
  if (g.dim() == 1)
    return static_cast<std::size_t>(d[0]);
  return static_cast<std::size_t>(d[0] * n + d[1]);
}

double a_sq(const FrequencyGrid& g, std::size_t site) {
  const auto d = digits(g, site);
  const long half = static_cast<long>(g.n()) / 2;
  double sum = 0.0;
  for (std::size_t ax = 0; ax < axis_count(g); ++ax) {
    const double a = static_cast<double>(d[ax] - half) * g.delta_a();
    sum += a * a;
  }
  return sum;
}

std::size_t ipow(std::size_t b, unsigned e) {
  std::size_t r = 1;
  while (e--)
    r *= b;
  return r;
}

} // namespace

std::size_t shift_site(const FrequencyGrid& g, std::size_t site, std::size_t shift,
                       int sign) {
  const long n = static_cast<long>(g.n());
  const long half = n / 2;
  auto d = digits(g, site);
  const auto s = digits(g, shift);
  for (std::size_t ax = 0; ax < axis_count(g); ++ax) {
    const long off = s[ax] - half;
    d[ax] = ((d[ax] + sign * off) % n + n) % n;
  }
  return undigits(g, d);
}

std::vector<double> shift_psd(const TurbulenceModel& m, const FrequencyGrid& g) {
  std::vector<double> out(g.size());
  for (std::size_t s = 0; s < g.size(); ++s)
    out[s] = ipfe::psd_transverse(m, std::sqrt(a_sq(g, s)));
  return out;
}

double grid_lambda(const TurbulenceModel& m, const FrequencyGrid& g) {
  double sum = 0.0;
  for (double v : shift_psd(m, g))
    sum += v;
  return sum * g.weight();
}

std::vector<cplx> h11_rhs(const std::vector<cplx>& h, const TurbulenceModel& m,
                          const FrequencyGrid& g) {
  const std::size_t n = g.size();
  const double k2 = g.wavenumber() * g.wavenumber();
  const double w = g.weight();
  const double lam = grid_lambda(m, g);
  const auto phi = shift_psd(m, g);
  std::vector<cplx> out(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      cplx acc = cplx(0.0, pi * g.wavelength() * (a_sq(g, i) - a_sq(g, j))) * h[i * n + j];
      acc -= k2 * lam * h[i * n + j];
      for (std::size_t s = 0; s < n; ++s)
        acc += k2 * phi[s] * w *
               h[shift_site(g, i, s, +1) * n + shift_site(g, j, s, +1)];
      out[i * n + j] = acc;
    }
  }
  return out;
}

std::vector<cplx> biphoton_rhs(const std::vector<cplx>& f, const TurbulenceModel& m,
                               const FrequencyGrid& g) {
  const std::size_t n = g.size();
  const double k2 = g.wavenumber() * g.wavenumber();
  const double w = g.weight();
  const double lam = grid_lambda(m, g);
  const auto phi = shift_psd(m, g);
  // Storage slots (a1, a3, a2, a4).
  auto F = [&](std::size_t a1, std::size_t a2, std::size_t a3, std::size_t a4) {
    return f[((a1 * n + a3) * n + a2) * n + a4];
  };
  auto minus = [&](std::size_t a, std::size_t u) { return shift_site(g, a, u, -1); };
  auto plus = [&](std::size_t a, std::size_t u) { return shift_site(g, a, u, +1); };
  std::vector<cplx> out(f.size());
  for (std::size_t a1 = 0; a1 < n; ++a1)
    for (std::size_t a2 = 0; a2 < n; ++a2)
      for (std::size_t a3 = 0; a3 < n; ++a3)
        for (std::size_t a4 = 0; a4 < n; ++a4) {
          const cplx f0 = F(a1, a2, a3, a4);
          cplx acc = cplx(0.0, pi * g.wavelength() *
                                   (a_sq(g, a1) - a_sq(g, a2) + a_sq(g, a3) - a_sq(g, a4))) *
                     f0;
          cplx integral = 2.0 * lam * f0;
          for (std::size_t u = 0; u < n; ++u) {
            const cplx bracket =
                -F(minus(a1, u), minus(a2, u), a3, a4) - F(a1, a2, minus(a3, u), minus(a4, u)) -
                F(minus(a1, u), a2, a3, minus(a4, u)) - F(a1, minus(a2, u), minus(a3, u), a4) +
                F(minus(a1, u), a2, plus(a3, u), a4) + F(a1, minus(a2, u), a3, plus(a4, u));
            integral += phi[u] * w * bracket;
          }
          acc -= k2 * integral;
          out[((a1 * n + a3) * n + a2) * n + a4] = acc;
        }
  return out;
}

std::vector<cplx> hierarchy_rhs(const std::vector<cplx>& h, unsigned m, unsigned n,
                                const TurbulenceModel& model, const FrequencyGrid& g) {
  const std::size_t ns = g.size();
  const unsigned rank = m + n;
  const double k2 = g.wavenumber() * g.wavenumber();
  const double w = g.weight();
  const double lam = grid_lambda(model, g);
  const auto phi = shift_psd(model, g);
  const std::size_t total = ipow(ns, rank);
  auto split = [&](std::size_t e) {
    std::vector<std::size_t> idx(rank);
    for (unsigned i = rank; i-- > 0;) {
      idx[i] = e % ns;
      e /= ns;
    }
    return idx;
  };
  auto join = [&](const std::vector<std::size_t>& idx) {
    std::size_t e = 0;
    for (auto v : idx)
      e = e * ns + v;
    return e;
  };
  std::vector<cplx> out(total);
  for (std::size_t e = 0; e < total; ++e) {
    const auto idx = split(e);
    double drift = 0.0;
    for (unsigned i = 0; i < rank; ++i)
      drift += (i < m ? 1.0 : -1.0) * a_sq(g, idx[i]);
    cplx acc = cplx(0.0, pi * g.wavelength() * drift) * h[e];
    acc -= 0.5 * k2 * lam * static_cast<double>(rank) * h[e];
    for (unsigned p = 0; p < rank; ++p) {
      for (unsigned q = p + 1; q < rank; ++q) {
        const bool cross = p < m && q >= m;
        const double coef = cross ? k2 : -k2;
        const int sign_q = cross ? +1 : -1;
        for (std::size_t s = 0; s < ns; ++s) {
          auto moved = idx;
          moved[p] = shift_site(g, idx[p], s, +1);
          moved[q] = shift_site(g, idx[q], s, sign_q);
          acc += coef * phi[s] * w * h[join(moved)];
        }
      }
    }
    out[e] = acc;
  }
  return out;
}

std::vector<cplx> direct_to_position(const std::vector<cplx>& spectrum,
                                     const FrequencyGrid& g) {
  const std::size_t ns = g.size();
  const long half = static_cast<long>(g.n()) / 2;
  std::vector<cplx> out(ns);
  for (std::size_t l = 0; l < ns; ++l) {
    const auto dl = digits(g, l);
    cplx acc{};
    for (std::size_t j = 0; j < ns; ++j) {
      const auto dj = digits(g, j);
      double phase = 0.0;
      for (std::size_t ax = 0; ax < axis_count(g); ++ax) {
        const double a = static_cast<double>(dj[ax] - half) * g.delta_a();
        const double x = static_cast<double>(dl[ax] - half) * g.delta_x();
        phase += a * x;
      }
      acc += spectrum[j] * std::polar(1.0, -2.0 * pi * phase);
    }
    out[l] = acc * g.weight();
  }
  return out;
}

cplx fresnel_gaussian_1d(double x, double waist, double wavelength, double z) {
  const cplx p(pi * waist * waist, -wavelength * z);
  return std::sqrt(pi) * waist / std::sqrt(p) * std::exp(-pi * x * x / p);
}

using big = boost::multiprecision::cpp_bin_float_50;

double psd_high_precision(double cn2, double outer_scale, double k) {
  const big pi50 = boost::math::constants::pi<big>();
  const big kappa0 = 2 * pi50 / big(outer_scale);
  const big base = big(k) * big(k) + kappa0 * kappa0;
  const big value = big("0.033") * pow(2 * pi50, 3) * big(cn2) * pow(base, big(-11) / 6);
  return static_cast<double>(value);
}

double lambda_high_precision(double cn2, double outer_scale) {
  const big pi50 = boost::math::constants::pi<big>();
  const big kappa0 = 2 * pi50 / big(outer_scale);
  // (1/2pi) int 0.033 (2pi)^3 cn2 (k^2 + k0^2)^(-11/6) k dk = 0.033 (2pi)^2 cn2 (3/5) k0^(-5/3)
  const big value = big("0.033") * pow(2 * pi50, 2) * big(cn2) * big(3) / 5 *
                    pow(kappa0, big(-5) / 3);
  return static_cast<double>(value);
}

cplx quadratic_form(const std::vector<cplx>& k, const std::vector<cplx>& alpha,
                    const FrequencyGrid& g) {
  const std::size_t n = alpha.size();
  cplx acc{};
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      acc += std::conj(alpha[i]) * k[i * n + j] * alpha[j];
  return acc * g.weight() * g.weight();
}

cplx linear_process_log_wigner(const std::vector<cplx>& t, const std::vector<cplx>& alpha,
                               const FrequencyGrid& g) {
  using M = Eigen::MatrixXcd;
  const auto n = static_cast<Eigen::Index>(alpha.size());
  const double w = g.weight();
  M top(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      top(i, j) = t[static_cast<std::size_t>(i * n + j)] * w;
  const Eigen::SelfAdjointEigenSolver<M> eig(top);
  const auto& lam = eig.eigenvalues();
  const M& u = eig.eigenvectors();
  cplx log_norm{};
  Eigen::VectorXcd b_diag(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    log_norm -= std::log(cplx(1.0 + lam(i)));
    b_diag(i) = 2.0 * (1.0 - lam(i)) / (1.0 + lam(i));
  }
  Eigen::VectorXcd a(n);
  for (Eigen::Index i = 0; i < n; ++i)
    a(i) = alpha[static_cast<std::size_t>(i)];
  // alpha* <> (B_op / w) <> alpha = w alpha^dag B_op alpha.
  const Eigen::VectorXcd c = u.adjoint() * a;
  cplx quad{};
  for (Eigen::Index i = 0; i < n; ++i)
    quad += std::norm(c(i)) * b_diag(i);
  return log_norm - w * quad;
}

cplx fourth_order_bracket(const std::vector<cplx>& a, const std::vector<cplx>& alpha,
                          const TurbulenceModel& m, const FrequencyGrid& g) {
  const std::size_t n = g.size();
  const double w = g.weight();
  const double k2 = g.wavenumber() * g.wavenumber();
  const auto phi = shift_psd(m, g);
  auto A = [&](std::size_t i, std::size_t j) { return a[i * n + j]; };
  auto al = [&](std::size_t i) { return alpha[i]; };
  auto alc = [&](std::size_t i) { return std::conj(alpha[i]); };
  auto mn = [&](std::size_t i, std::size_t s) { return shift_site(g, i, s, -1); };
  auto pl = [&](std::size_t i, std::size_t s) { return shift_site(g, i, s, +1); };
  cplx total{};
  for (std::size_t a0 = 0; a0 < n; ++a0) {
    cplx acc{};
    for (std::size_t a1 = 0; a1 < n; ++a1)
      for (std::size_t a2 = 0; a2 < n; ++a2)
        for (std::size_t a3 = 0; a3 < n; ++a3)
          for (std::size_t a4 = 0; a4 < n; ++a4) {
            acc += alc(a3) * A(a3, a1) * al(mn(a1, a0)) * alc(a4) * A(a4, a2) *
                   al(pl(a2, a0));
            acc += alc(mn(a1, a0)) * A(a1, a3) * al(a3) * alc(pl(a2, a0)) * A(a2, a4) *
                   al(a4);
            acc -= 2.0 * alc(mn(a2, a0)) * A(a2, a4) * al(a4) * alc(a3) * A(a3, a1) *
                   al(mn(a1, a0));
          }
    total += phi[a0] * acc;
  }
  return 0.5 * k2 * total * std::pow(w, 5);
}

double laguerre(unsigned n, double x) {
  double l0 = 1.0;
  if (n == 0)
    return l0;
  double l1 = 1.0 - x;
  for (unsigned k = 1; k < n; ++k) {
    const double l2 = ((2.0 * k + 1.0 - x) * l1 - k * l0) / (k + 1.0);
    l0 = l1;
    l1 = l2;
  }
  return l1;
}

} // namespace oracle
