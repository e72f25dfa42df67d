#pragma once

#include "ipfe/grid.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

namespace helpers {

using ipfe::cplx;

inline std::vector<cplx> random_complex(std::mt19937_64& rng, std::size_t n,
                                        double scale = 1.0) {
  std::normal_distribution<double> nd;
  std::vector<cplx> v(n);
  for (auto& x : v)
    x = scale * cplx(nd(rng), nd(rng));
  return v;
}

inline std::vector<cplx> random_hermitian(std::mt19937_64& rng, std::size_t n,
                                          double scale = 1.0) {
  auto v = random_complex(rng, n * n, scale);
  for (std::size_t i = 0; i < n; ++i) {
    v[i * n + i] = v[i * n + i].real();
    for (std::size_t j = i + 1; j < n; ++j)
      v[j * n + i] = std::conj(v[i * n + j]);
  }
  return v;
}

inline double max_abs(const std::vector<cplx>& v) {
  double m = 0.0;
  for (auto x : v)
    m = std::max(m, std::abs(x));
  return m;
}

inline double max_abs_diff(const std::vector<cplx>& a, const std::vector<cplx>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

} // namespace helpers
