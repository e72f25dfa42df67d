#include "doctest.h"

#include "helpers.hpp"

#include "ipfe/error.hpp"
#include "ipfe/io.hpp"

#include "json.hpp"

#include <cstring>
#include <filesystem>
#include <fstream>
#include <random>

using namespace ipfe;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / "ipfe_test_io";
  fs::create_directories(dir);
  return dir / name;
}

std::vector<char> slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

void spit(const fs::path& p, const std::vector<char>& bytes) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

} // namespace

TEST_CASE("array round trip is bit exact") {
  std::mt19937_64 rng(1);
  io::Array a{{5, 7}, helpers::random_complex(rng, 35)};
  a.values[3] = cplx(-0.0, std::numeric_limits<double>::denorm_min());
  const auto p = scratch("rank2.bin");
  io::write_array(p, a);
  const auto b = io::read_array(p);
  CHECK(b.shape == a.shape);
  REQUIRE(b.values.size() == a.values.size());
  CHECK(std::memcmp(b.values.data(), a.values.data(), a.values.size() * sizeof(cplx)) == 0);

  const auto bytes = slurp(p);
  CHECK(std::memcmp(bytes.data(), "IPFE", 4) == 0);
  CHECK(bytes.size() == io::header_size(2) + 16 * 35);
}

TEST_CASE("rank-4 file size") {
  io::Array a{{8, 8, 8, 8}, std::vector<cplx>(8 * 8 * 8 * 8)};
  const auto p = scratch("rank4.bin");
  io::write_array(p, a);
  CHECK(fs::file_size(p) == 4 + 4 + 4 + 4 * 8 + 2 * 8 * 4096);
}

TEST_CASE("malformed files") {
  io::Array a{{4}, std::vector<cplx>(4, cplx(1.0, 2.0))};
  const auto p = scratch("bad.bin");
  io::write_array(p, a);
  const auto good = slurp(p);

  auto bytes = good;
  bytes[0] = 'X';
  spit(p, bytes);
  CHECK_THROWS_WITH_AS(io::read_array(p), doctest::Contains("magic"), FormatError);

  bytes = good;
  bytes[4] = 9;
  spit(p, bytes);
  CHECK_THROWS_WITH_AS(io::read_array(p), doctest::Contains("version"), FormatError);

  bytes = good;
  bytes.resize(bytes.size() - 3);
  spit(p, bytes);
  CHECK_THROWS_AS(io::read_array(p), FormatError);

  bytes = good;
  bytes.resize(10);
  spit(p, bytes);
  CHECK_THROWS_AS(io::read_array(p), FormatError);

  bytes = good;
  bytes.push_back(0);
  spit(p, bytes);
  CHECK_THROWS_AS(io::read_array(p), FormatError);

  CHECK_THROWS_AS(io::write_array(p, io::Array{{3}, std::vector<cplx>(4)}), ShapeError);
  CHECK_THROWS(io::read_array(scratch("missing.bin")));
}

TEST_CASE("kernel files carry a sidecar") {
  const FrequencyGrid g(2, 4, 12.5, 1.55e-6);
  std::mt19937_64 rng(2);
  MomentKernel h(g, 1, 1, 3.25);
  h.values() = helpers::random_complex(rng, h.size());
  const auto p = scratch("kernel.bin");
  io::write_kernel(p, h);
  CHECK(io::read_array(p).shape == std::vector<std::uint64_t>{4, 4, 4, 4});

  const auto meta = nlohmann::json::parse(std::ifstream(io::sidecar_path(p)));
  CHECK(meta.at("grid").at("n") == 4);
  CHECK(meta.at("m") == 1);

  const auto back = io::read_kernel(p);
  CHECK(back.grid() == g);
  CHECK(back.m() == 1);
  CHECK(back.n() == 1);
  CHECK(back.z == 3.25);
  CHECK(back.values() == h.values());
}
