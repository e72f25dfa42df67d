#include "ipfe/io.hpp"

#include "ipfe/error.hpp"

#include "json.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>

namespace ipfe::io {

static_assert(std::endian::native == std::endian::little,
              "binary format assumes a little-endian host");

namespace {

template <class T> void put(std::ostream& os, T v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof v);
}

template <class T> T get(std::istream& is, const std::filesystem::path& path) {
  T v{};
  if (!is.read(reinterpret_cast<char*>(&v), sizeof v))
    throw FormatError("truncated header in " + path.string());
  return v;
}

} // namespace

std::size_t header_size(std::size_t rank) { return 4 + 4 + 4 + 8 * rank; }

void write_array(const std::filesystem::path& path, const Array& array) {
  std::uint64_t count = 1;
  for (auto d : array.shape)
    count *= d;
  if (count != array.values.size())
    throw ShapeError("write_array: shape does not match value count");
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os)
    throw FormatError("cannot open " + path.string() + " for writing");
  os.write(kMagic, 4);
  put<std::uint32_t>(os, kFormatVersion);
  put<std::uint32_t>(os, static_cast<std::uint32_t>(array.shape.size()));
  for (auto d : array.shape)
    put<std::uint64_t>(os, d);
  os.write(reinterpret_cast<const char*>(array.values.data()),
           static_cast<std::streamsize>(array.values.size() * sizeof(cplx)));
  if (!os)
    throw FormatError("write failed for " + path.string());
}

Array read_array(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is)
    throw FormatError("cannot open " + path.string());
  char magic[4];
  if (!is.read(magic, 4))
    throw FormatError("truncated header in " + path.string());
  if (std::memcmp(magic, kMagic, 4) != 0)
    throw FormatError("bad magic in " + path.string() + " (expected IPFE)");
  const auto version = get<std::uint32_t>(is, path);
  if (version != kFormatVersion) {
    std::ostringstream os;
    os << "unsupported format version " << version << " in " << path.string();
    throw FormatError(os.str());
  }
  const auto rank = get<std::uint32_t>(is, path);
  Array out;
  std::uint64_t count = 1;
  for (std::uint32_t i = 0; i < rank; ++i) {
    out.shape.push_back(get<std::uint64_t>(is, path));
    count *= out.shape.back();
  }
  const auto here = is.tellg();
  is.seekg(0, std::ios::end);
  const auto remaining = static_cast<std::uint64_t>(is.tellg() - here);
  is.seekg(here);
  const std::uint64_t expected = count * sizeof(cplx);
  if (remaining != expected) {
    std::ostringstream os;
    os << (remaining < expected ? "truncated payload" : "trailing bytes") << " in "
       << path.string() << " (" << remaining << " bytes, expected " << expected
       << ")";
    throw FormatError(os.str());
  }
  out.values.resize(count);
  is.read(reinterpret_cast<char*>(out.values.data()),
          static_cast<std::streamsize>(expected));
  return out;
}

std::filesystem::path sidecar_path(const std::filesystem::path& path) {
  return std::filesystem::path(path.string() + ".json");
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream os(path, std::ios::trunc);
  if (!os)
    throw FormatError("cannot open " + path.string() + " for writing");
  os << text;
}

void write_kernel(const std::filesystem::path& path, const MomentKernel& h) {
  Array a;
  for (auto d : h.tensor_shape())
    a.shape.push_back(d);
  a.values = h.values();
  write_array(path, a);
  const auto& g = h.grid();
  nlohmann::json meta = {
      {"format", "IPFE"},
      {"version", kFormatVersion},
      {"kind", "moment_kernel"},
      {"m", h.m()},
      {"n", h.n()},
      {"z", h.z},
      {"z_units", "m"},
      {"grid",
       {{"dim", g.dim()},
        {"n", g.n()},
        {"delta_a", g.delta_a()},
        {"delta_a_units", "cycles/m"},
        {"wavelength", g.wavelength()},
        {"wavelength_units", "m"}}},
      {"axes", "m ket slots then n bra slots, each D axes of n sites, "
               "site a_j = (j - n/2) delta_a"},
  };
  write_text(sidecar_path(path), meta.dump(2) + "\n");
}

MomentKernel read_kernel(const std::filesystem::path& path) {
  std::ifstream is(sidecar_path(path));
  if (!is)
    throw FormatError("missing sidecar " + sidecar_path(path).string());
  nlohmann::json meta;
  try {
    is >> meta;
    const auto& g = meta.at("grid");
    FrequencyGrid grid(g.at("dim").get<int>(), g.at("n").get<std::size_t>(),
                       g.at("delta_a").get<double>(),
                       g.at("wavelength").get<double>());
    MomentKernel h(grid, meta.at("m").get<unsigned>(), meta.at("n").get<unsigned>(),
                   meta.value("z", 0.0));
    Array a = read_array(path);
    const auto shape = h.tensor_shape();
    const std::vector<std::uint64_t> expected(shape.begin(), shape.end());
    if (a.shape != expected)
      throw FormatError("tensor shape does not match sidecar in " + path.string());
    h.values() = std::move(a.values);
    return h;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError("bad sidecar " + sidecar_path(path).string() + ": " + e.what());
  }
}

} // namespace ipfe::io
