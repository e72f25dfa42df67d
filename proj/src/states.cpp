#include "ipfe/states.hpp"

#include "ipfe/error.hpp"
#include "ipfe/moments.hpp"
#include "ipfe/phase_screen.hpp"
#include "ipfe/rng.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

namespace ipfe {

using std::numbers::pi;
using Matrix = Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::Matrix<cplx, Eigen::Dynamic, 1>;

namespace {

Eigen::Map<const Matrix> as_matrix(const std::vector<cplx>& v, std::size_t n) {
  if (v.size() != n * n)
    throw ShapeError("kernel is not N x N");
  return {v.data(), static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n)};
}

std::vector<cplx> to_vector(const Matrix& m) {
  return std::vector<cplx>(m.data(), m.data() + m.size());
}

bool all_zero(const std::vector<cplx>& v) {
  return std::all_of(v.begin(), v.end(), [](cplx c) { return c == cplx{}; });
}

cplx log_det(const Matrix& m) {
  const Eigen::PartialPivLU<Matrix> lu(m);
  const Matrix& u = lu.matrixLU();
  cplx sum{};
  for (Eigen::Index i = 0; i < u.rows(); ++i)
    sum += std::log(u(i, i));
  if (lu.permutationP().determinant() < 0)
    sum += cplx(0.0, pi);
  return sum;
}

void require_isotropic(const GaussianState& s, const char* what) {
  if (!s.is_isotropic())
    throw DomainError(std::string(what) + " requires B = C = beta = eta = 0");
}

// alpha* <> K <> alpha for an N x N kernel.
cplx quadratic(const std::vector<cplx>& k, const Spectrum& alpha) {
  const std::size_t n = alpha.size();
  cplx sum{};
  for (std::size_t i = 0; i < n; ++i) {
    cplx row{};
    for (std::size_t j = 0; j < n; ++j)
      row += k[i * n + j] * alpha[j];
    sum += std::conj(alpha[i]) * row;
  }
  const double w = alpha.grid.weight();
  return sum * w * w;
}

} // namespace

GaussianState::GaussianState(FrequencyGrid g)
    : grid(std::move(g)), A(grid.size() * grid.size()),
      B(grid.size() * grid.size()), C(grid.size() * grid.size()), beta(grid),
      eta(grid) {}

bool GaussianState::is_isotropic() const {
  return all_zero(B) && all_zero(C) && all_zero(beta.values) &&
         all_zero(eta.values);
}

GaussianState thermal_state(const FrequencyGrid& grid, double c) {
  GaussianState s(grid);
  const std::size_t n = grid.size();
  for (std::size_t i = 0; i < n; ++i)
    s.A[i * n + i] = c / grid.weight();
  return s;
}

GaussianState vacuum_state(const FrequencyGrid& grid) {
  return thermal_state(grid, 2.0);
}

cplx evaluate_gaussian(const GaussianState& s, const Spectrum& alpha) {
  require_same_grid(s.grid, alpha.grid, "evaluate_gaussian");
  const cplx shifts = contract(conj(alpha), s.beta) + contract(conj(s.eta), alpha);
  return std::exp(-quadratic(s.A, alpha) - shifts);
}

GaussianState free_space_gaussian(const GaussianState& s, double z) {
  GaussianState out = s;
  const std::size_t n = s.sites();
  const double c = pi * s.grid.wavelength() * z;
  const auto a2 = s.grid.frequency_sq();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      out.A[i * n + j] *= std::polar(1.0, c * (a2[i] - a2[j]));
      out.B[i * n + j] *= std::polar(1.0, -c * (a2[i] + a2[j]));
      out.C[i * n + j] *= std::polar(1.0, c * (a2[i] + a2[j]));
    }
    out.beta[i] *= std::polar(1.0, c * a2[i]);
    out.eta[i] *= std::polar(1.0, c * a2[i]);
  }
  out.z = s.z + z;
  return out;
}

cplx fourth_order_bracket(const GaussianState& s, const TurbulenceModel& model,
                          const Spectrum& alpha) {
  require_same_grid(s.grid, alpha.grid, "gaussian_drift");
  const KernelEquation eq(model, s.grid);
  const auto& g = s.grid;
  const std::size_t n = g.size();
  const double w = g.weight();
  const auto a = as_matrix(s.A, n);
  const Eigen::Map<const Vector> alpha_v(alpha.values.data(),
                                         static_cast<Eigen::Index>(n));
  const Vector a_alpha = a * alpha_v;
  const Vector alpha_dag_a = (alpha_v.adjoint() * a).transpose();

  // P(s) = alpha^dag A (alpha shifted by s) w^2, Q(s) = (alpha shifted)^dag A alpha w^2.
  std::vector<cplx> p(n), q(n);
  Vector shifted(static_cast<Eigen::Index>(n));
  for (std::size_t t = 0; t < n; ++t) {
    auto off = g.signed_offset(t);
    off[0] = -off[0];
    off[1] = -off[1];
    for (std::size_t i = 0; i < n; ++i)
      shifted[static_cast<Eigen::Index>(i)] = alpha[g.shifted(i, off)];
    p[t] = (alpha_dag_a.array() * shifted.array()).sum() * w * w;
    q[t] = shifted.dot(a_alpha) * w * w;
  }
  const auto phi = eq.shift_psd();
  cplx sum{};
  for (std::size_t t = 0; t < n; ++t) {
    const std::size_t m = g.mirror(t);
    sum += phi[t] * (p[t] * p[m] + q[t] * q[m] - 2.0 * q[t] * p[t]);
  }
  return 0.5 * eq.k2() * w * sum;
}

DriftResult gaussian_drift(const GaussianState& s, const TurbulenceModel& model,
                           std::uint64_t probe_seed) {
  require_isotropic(s, "gaussian_drift");
  if (!model.has_finite_lambda())
    throw DomainError("Λ divergent for pure Kolmogorov");
  const std::size_t n = s.sites();
  const KernelEquation eq(model, s.grid);

  MomentKernel h(s.grid, 1, 1, s.z);
  h.values() = s.A;
  DriftResult out;
  out.rhs = eq.rhs(h).values();

  const double rate = eq.k2() * eq.lattice_lambda();
  const double scale = rate > 0.0 ? rate : 1.0;
  double a_max = 0.0, rhs_max = 0.0;
  for (std::size_t i = 0; i < n * n; ++i) {
    a_max = std::max(a_max, std::abs(s.A[i]));
    rhs_max = std::max(rhs_max, std::abs(out.rhs[i]));
  }
  out.rhs_norm = a_max > 0.0 ? rhs_max / (scale * a_max) : 0.0;

  Engine rng(derive_seed({probe_seed}));
  std::normal_distribution<double> normal;
  for (std::size_t k = 0; k < kDriftProbes; ++k) {
    Spectrum alpha(s.grid);
    for (auto& v : alpha.values)
      v = cplx(normal(rng), normal(rng));
    const double quad = std::abs(quadratic(s.A, alpha));
    const double r = std::abs(fourth_order_bracket(s, model, alpha));
    const double value = quad > 0.0 ? r / (scale * quad * quad) : r;
    out.probe_residuals.push_back(value);
    out.fourth_order_residual = std::max(out.fourth_order_residual, value);
  }
  return out;
}

ShiftPair shift_decay(const Spectrum& beta0, const Spectrum& eta0,
                      const TurbulenceModel& model, double z) {
  require_same_grid(beta0.grid, eta0.grid, "shift_decay");
  model.validate();
  const auto& g = beta0.grid;
  if (z == 0.0)
    return {beta0, eta0};
  if (!model.has_finite_lambda() && model.cn2 > 0.0 && z > 0.0)
    return {Spectrum(g), Spectrum(g)};
  const double lam = model.has_finite_lambda() ? lattice_lambda(model, g) : 0.0;
  const double decay = g.wavenumber() * g.wavenumber() * lam * z;
  const double c = pi * g.wavelength() * z;
  ShiftPair out{beta0, eta0};
  for (std::size_t i = 0; i < g.size(); ++i) {
    const cplx f = std::exp(cplx(-decay, c * g.frequency_sq(i)));
    out.beta[i] *= f;
    out.eta[i] *= f;
  }
  return out;
}

CharacteristicGaussian characteristic_of_gaussian(const GaussianState& s) {
  require_isotropic(s, "characteristic_of_gaussian");
  const std::size_t n = s.sites();
  const double w = s.grid.weight();
  const Matrix a = as_matrix(s.A, n);
  if (!a.isApprox(a.adjoint(), 1e-12))
    throw DomainError("characteristic_of_gaussian requires Hermitian A");
  const Eigen::LLT<Matrix> llt(a);
  if (llt.info() != Eigen::Success)
    throw DomainError("characteristic_of_gaussian requires positive definite A");
  const Matrix inv = llt.solve(Matrix::Identity(a.rows(), a.cols()));

  CharacteristicGaussian out{GaussianState(s.grid), {}};
  out.state.z = s.z;
  out.state.A = to_vector(inv * (4.0 / (w * w)));
  // log det(2 A^-1 / w) = N log(2/w) - log det A, with log det A from Cholesky.
  double log_det_a = 0.0;
  const Matrix& l = llt.matrixLLT();
  for (Eigen::Index i = 0; i < l.rows(); ++i)
    log_det_a += 2.0 * std::log(l(i, i).real());
  out.log_prefactor = static_cast<double>(n) * std::log(2.0 / w) - log_det_a;
  return out;
}

LinearProcessWigner wigner_linear_process(const LinearProcess& p) {
  const std::size_t n = p.grid.size();
  const double w = p.grid.weight();
  const Matrix t = as_matrix(p.T, n) * w;
  const Matrix id = Matrix::Identity(t.rows(), t.cols());
  const Matrix plus = id + t;

  const Eigen::JacobiSVD<Matrix> svd(plus);
  const auto& sv = svd.singularValues();
  const double smax = sv(0);
  const double smin = sv(sv.size() - 1);
  const double cond = smin > 0.0 ? smax / smin : INFINITY;
  if (!(smin > 1e-13 * smax)) {
    std::ostringstream os;
    os << "wigner_linear_process: (1 + T) is singular (condition estimate "
       << cond << ")";
    throw NumericalError(os.str());
  }

  const Eigen::PartialPivLU<Matrix> lu(plus);
  const Matrix inv = lu.inverse();
  LinearProcessWigner out;
  out.grid = p.grid;
  out.condition = cond;
  out.inverse_residual = (plus * inv - id).cwiseAbs().maxCoeff();
  out.log_norm = -log_det(plus);
  out.B_lin = to_vector(2.0 * (id - t) * inv / w);
  return out;
}

cplx evaluate_linear_process(const LinearProcessWigner& w, const Spectrum& alpha) {
  require_same_grid(w.grid, alpha.grid, "evaluate_linear_process");
  return std::exp(w.log_norm - quadratic(w.B_lin, alpha));
}

Spectrum normalized(const Spectrum& f) {
  const double norm = f.norm_sq();
  if (!(norm > 0.0))
    throw DomainError("cannot normalise a zero spectrum");
  Spectrum out = f;
  for (auto& v : out.values)
    v /= std::sqrt(norm);
  return out;
}

namespace {

struct FockArgs {
  double alpha_norm_sq;
  double overlap_sq;
};

FockArgs fock_args(const FockSpec& f, const Spectrum& alpha) {
  require_same_grid(f.F.grid, alpha.grid, "fock");
  const double norm = f.F.norm_sq();
  if (std::abs(norm - 1.0) > 1e-12) {
    std::ostringstream os;
    os << "FockSpec spectrum not normalised (||F||^2 = " << norm << ")";
    throw DomainError(os.str());
  }
  return {alpha.norm_sq(), std::norm(contract(conj(alpha), f.F))};
}

} // namespace

cplx fock_generating(double eta, const FockSpec& f, const Spectrum& alpha,
                     double n0) {
  if (!(eta > -1.0) || !std::isfinite(eta)) {
    std::ostringstream os;
    os << "fock_generating: eta = " << eta << " outside (-1, inf) (pole at -1)";
    throw DomainError(os.str());
  }
  const auto args = fock_args(f, alpha);
  return n0 / (1.0 + eta) *
         std::exp(-2.0 * args.alpha_norm_sq +
                  4.0 * eta / (1.0 + eta) * args.overlap_sq);
}

cplx fock_wigner(unsigned n, const FockSpec& f, const Spectrum& alpha, double n0) {
  const auto args = fock_args(f, alpha);
  const double sign = (n % 2 == 0) ? 1.0 : -1.0;
  return n0 * sign * std::laguerre(n, 4.0 * args.overlap_sq) *
         std::exp(-2.0 * args.alpha_norm_sq);
}

} // namespace ipfe
