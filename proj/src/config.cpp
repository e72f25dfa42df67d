#include "ipfe/config.hpp"

#include "ipfe/diagnostics.hpp"
#include "ipfe/error.hpp"

#include "json.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <optional>
#include <set>
#include <sstream>

namespace ipfe {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& msg) {
  throw ConfigError("config " + path + ": " + msg);
}

void check_keys(const json& obj, const std::string& path,
                const std::set<std::string>& allowed) {
  if (!obj.is_object())
    fail(path.empty() ? "<root>" : path, "expected an object");
  for (const auto& [key, _] : obj.items())
    if (!allowed.count(key))
      fail(path.empty() ? key : path + "." + key, "unknown key");
}

const json* find(const json& obj, const char* key) {
  auto it = obj.find(key);
  return it == obj.end() ? nullptr : &*it;
}

double number(const json& obj, const std::string& path, const char* key,
              std::optional<double> fallback) {
  const json* v = find(obj, key);
  const std::string field = path + "." + key;
  if (!v) {
    if (!fallback)
      fail(field, "required field missing");
    return *fallback;
  }
  if (!v->is_number())
    fail(field, "expected a number");
  const double d = v->get<double>();
  if (!std::isfinite(d))
    fail(field, "must be finite");
  return d;
}

std::uint64_t integer(const json& obj, const std::string& path, const char* key,
                      std::optional<std::uint64_t> fallback) {
  const json* v = find(obj, key);
  const std::string field = path + "." + key;
  if (!v) {
    if (!fallback)
      fail(field, "required field missing");
    return *fallback;
  }
  if (!v->is_number_integer() ||
      (!v->is_number_unsigned() && v->get<long long>() < 0))
    fail(field, "expected a non-negative integer");
  return v->get<std::uint64_t>();
}

std::string string(const json& obj, const std::string& path, const char* key,
                   const std::string& fallback) {
  const json* v = find(obj, key);
  if (!v)
    return fallback;
  if (!v->is_string())
    fail(path + "." + key, "expected a string");
  return v->get<std::string>();
}

const json& section(const json& root, const char* key, bool required) {
  static const json empty = json::object();
  const json* v = find(root, key);
  if (!v) {
    if (required)
      fail(key, "required section missing");
    return empty;
  }
  return *v;
}

} // namespace

RunConfig parse_config(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config: malformed JSON: ") + e.what());
  }
  check_keys(root, "", {"model", "grid", "plan", "source", "kernel", "states",
                        "task", "output_dir", "tolerances"});
  RunConfig cfg;

  const json& m = section(root, "model", true);
  check_keys(m, "model",
             {"kind", "cn2", "outer_scale", "inner_scale", "inner_scale_constant"});
  TurbulenceModel model;
  try {
    model.kind = spectrum_kind_from_string(string(m, "model", "kind", "von_karman"));
  } catch (const Error& e) {
    fail("model.kind", e.what());
  }
  model.cn2 = number(m, "model", "cn2", std::nullopt);
  if (model.cn2 < 0.0)
    fail("model.cn2", "must be >= 0");
  model.outer_scale = number(m, "model", "outer_scale", 1.0);
  if (!(model.outer_scale > 0.0))
    fail("model.outer_scale", "must be > 0");
  model.inner_scale = number(m, "model", "inner_scale", 0.0);
  if (model.inner_scale < 0.0)
    fail("model.inner_scale", "must be >= 0");
  model.inner_scale_constant = number(m, "model", "inner_scale_constant", 35.0);
  if (!(model.inner_scale_constant > 0.0))
    fail("model.inner_scale_constant", "must be > 0");

  const json& g = section(root, "grid", true);
  check_keys(g, "grid", {"dim", "n", "delta_a", "wavelength"});
  const auto dim = integer(g, "grid", "dim", 1);
  const auto n = integer(g, "grid", "n", std::nullopt);
  const double delta_a = number(g, "grid", "delta_a", std::nullopt);
  const double wavelength = number(g, "grid", "wavelength", std::nullopt);
  if (dim != 1 && dim != 2)
    fail("grid.dim", "must be 1 or 2");
  if (n < 2 || (n & (n - 1)) != 0)
    fail("grid.n", "must be a power of two >= 2");
  if (!(delta_a > 0.0))
    fail("grid.delta_a", "must be > 0");
  if (!(wavelength > 0.0))
    fail("grid.wavelength", "must be > 0");
  FrequencyGrid grid(static_cast<int>(dim), n, delta_a, wavelength);

  const json& p = section(root, "plan", true);
  check_keys(p, "plan", {"z_total", "n_slabs", "n_realizations", "master_seed"});
  cfg.plan.grid = grid;
  cfg.plan.model = model;
  cfg.plan.z_total = number(p, "plan", "z_total", std::nullopt);
  if (cfg.plan.z_total < 0.0)
    fail("plan.z_total", "must be >= 0");
  cfg.plan.n_slabs = integer(p, "plan", "n_slabs", 64);
  if (cfg.plan.n_slabs < 1)
    fail("plan.n_slabs", "must be >= 1");
  cfg.plan.n_realizations = integer(p, "plan", "n_realizations", 500);
  if (cfg.plan.n_realizations < 1)
    fail("plan.n_realizations", "must be >= 1");
  cfg.plan.master_seed = integer(p, "plan", "master_seed", 0);

  const json& s = section(root, "source", false);
  check_keys(s, "source", {"waist"});
  cfg.source_waist = number(s, "source", "waist", 0.004);
  if (!(cfg.source_waist > 0.0))
    fail("source.waist", "must be > 0");

  const json& k = section(root, "kernel", false);
  check_keys(k, "kernel", {"n_steps", "snapshots", "input"});
  cfg.kernel.n_steps = integer(k, "kernel", "n_steps", 0);
  cfg.kernel.input = string(k, "kernel", "input", "");
  if (const json* snaps = find(k, "snapshots")) {
    if (!snaps->is_array())
      fail("kernel.snapshots", "expected an array of distances");
    for (std::size_t i = 0; i < snaps->size(); ++i) {
      const json& v = (*snaps)[i];
      const std::string field = "kernel.snapshots[" + std::to_string(i) + "]";
      if (!v.is_number())
        fail(field, "expected a number");
      const double z = v.get<double>();
      if (z < 0.0 || z > cfg.plan.z_total)
        fail(field, "must lie in [0, plan.z_total]");
      cfg.kernel.snapshots.push_back(z);
    }
  }

  const json& st = section(root, "states", false);
  check_keys(st, "states", {"photon_numbers", "alpha_max", "points"});
  if (const json* pn = find(st, "photon_numbers")) {
    if (!pn->is_array())
      fail("states.photon_numbers", "expected an array");
    cfg.states.photon_numbers.clear();
    for (const auto& v : *pn) {
      if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<long long>() >= 0))
        fail("states.photon_numbers", "expected non-negative integers");
      cfg.states.photon_numbers.push_back(v.get<unsigned>());
    }
  }
  cfg.states.alpha_max = number(st, "states", "alpha_max", 1.0);
  if (!(cfg.states.alpha_max > 0.0))
    fail("states.alpha_max", "must be > 0");
  cfg.states.points = integer(st, "states", "points", 41);
  if (cfg.states.points < 2)
    fail("states.points", "must be >= 2");

  cfg.task = string(root, "", "task", "validate");
  static const std::set<std::string> tasks{"simulate", "evolve-kernel", "states",
                                           "screens", "spectrum-table", "validate"};
  if (!tasks.count(cfg.task))
    fail("task", "unknown task '" + cfg.task + "'");
  cfg.output_dir = string(root, "", "output_dir", "out");

  const json& t = section(root, "tolerances", false);
  check_keys(t, "tolerances", {"sigma", "rms_relative", "conservation", "exact"});
  cfg.tolerances.sigma = number(t, "tolerances", "sigma", 3.0);
  cfg.tolerances.rms_relative = number(t, "tolerances", "rms_relative", 0.05);
  cfg.tolerances.conservation = number(t, "tolerances", "conservation", 1e-8);
  cfg.tolerances.exact = number(t, "tolerances", "exact", 1e-10);
  for (double v : {cfg.tolerances.sigma, cfg.tolerances.rms_relative,
                   cfg.tolerances.conservation, cfg.tolerances.exact})
    if (!(v > 0.0))
      fail("tolerances", "all tolerances must be > 0");

  // Guards and warnings.
  WarningCapture capture;
  if (model.has_finite_lambda()) {
    cfg.plan.validate();
    check_outer_scale(model, grid);
  } else {
    warn("kolmogorov spectrum: Λ divergent, propagation tasks are unavailable");
  }
  cfg.warnings = capture.messages();
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is)
    throw ConfigError("config: cannot open " + path.string());
  std::stringstream ss;
  ss << is.rdbuf();
  return parse_config(ss.str());
}

std::string config_reference() {
  return R"(Config file (JSON, unknown keys rejected):
  model.kind                  "von_karman" | "kolmogorov"   (default von_karman)
  model.cn2                   C_n^2, m^(-2/3), >= 0         (required)
  model.outer_scale           L0, m                         (default 1.0)
  model.inner_scale           l0, m                         (default 0)
  model.inner_scale_constant  inner-scale rolloff constant  (default 35.0)
  grid.dim                    1 or 2                        (default 1)
  grid.n                      sites per axis, power of two  (required)
  grid.delta_a                frequency spacing, cycles/m   (required)
  grid.wavelength             m                             (required)
  plan.z_total                propagation distance, m       (required)
  plan.n_slabs                phase screens                 (default 64)
  plan.n_realizations         Monte-Carlo realizations      (default 500)
  plan.master_seed            u64                           (default 0)
  source.waist                Gaussian beam waist w0, m     (default 0.004)
  kernel.n_steps              RK4 steps, 0 = automatic      (default 0)
  kernel.snapshots            z values to write, m          (default [])
  kernel.input                initial kernel file           (default: source beam)
  states.photon_numbers       Fock orders to tabulate       (default [0,1,2])
  states.alpha_max            sweep end for alpha = t F     (default 1.0)
  states.points               sweep points                  (default 41)
  task                        default subcommand            (default "validate")
  output_dir                  output directory              (default "out")
  tolerances.sigma            standard errors               (default 3)
  tolerances.rms_relative     relative RMS discrepancy      (default 0.05)
  tolerances.conservation     relative trace drift          (default 1e-8)
  tolerances.exact            closed-form agreement         (default 1e-10)
)";
}

Spectrum gaussian_beam(const FrequencyGrid& grid, double waist) {
  using std::numbers::pi;
  Spectrum s(grid);
  const double amp = std::pow(std::sqrt(pi) * waist, grid.dim());
  for (std::size_t i = 0; i < grid.size(); ++i)
    s[i] = amp * std::exp(-pi * pi * waist * waist * grid.frequency_sq(i));
  return s;
}

} // namespace ipfe
