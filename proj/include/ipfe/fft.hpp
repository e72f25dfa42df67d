#pragma once

// Thin wrapper over FFTW for in-place, unnormalised transforms of row-major
// complex tensors. Plans are cached per (shape, axes, sign) and shared across
// threads; execution is thread-safe.

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace ipfe::fft {

enum class Direction { Forward = -1, Backward = +1 };

/// Unnormalised DFT along every axis of a row-major tensor:
/// out[l] = sum_j in[j] exp(sign i 2 pi j l / n) per axis.
void transform(std::span<std::complex<double>> data,
               const std::vector<std::size_t>& shape, Direction dir);

/// Unnormalised DFT along axes [first, first + count) of a row-major tensor,
/// batched over all remaining axes.
void transform_axes(std::span<std::complex<double>> data,
                    const std::vector<std::size_t>& shape, std::size_t first,
                    std::size_t count, Direction dir);

} // namespace ipfe::fft
