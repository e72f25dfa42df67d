#pragma once

// Binary tensor files: "IPFE" magic, u32 version, u32 rank, u64 per-axis
// lengths, then little-endian float64 (re, im) pairs in row-major order.
// A JSON sidecar "<file>.json" carries grid metadata and units.

#include "ipfe/grid.hpp"
#include "ipfe/moments.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace ipfe::io {

inline constexpr char kMagic[4] = {'I', 'P', 'F', 'E'};
inline constexpr std::uint32_t kFormatVersion = 1;

struct Array {
  std::vector<std::uint64_t> shape;
  std::vector<cplx> values;
};

std::size_t header_size(std::size_t rank);

void write_array(const std::filesystem::path& path, const Array& array);
/// Throws FormatError on magic/version mismatch, truncation or trailing bytes.
Array read_array(const std::filesystem::path& path);

/// Kernel tensor with axes n repeated (m+n)*D times, plus its sidecar.
void write_kernel(const std::filesystem::path& path, const MomentKernel& h);
/// Reads the tensor and its sidecar and rebuilds the kernel.
MomentKernel read_kernel(const std::filesystem::path& path);

std::filesystem::path sidecar_path(const std::filesystem::path& path);

/// Write text atomically enough for our purposes (truncate + write).
void write_text(const std::filesystem::path& path, const std::string& text);

} // namespace ipfe::io
