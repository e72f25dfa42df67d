#pragma once

// JSON run configuration with a strict schema: unknown keys are errors, and
// the propagation guards are checked at load time.
//
// {
//   "model":  {"kind": "von_karman", "cn2": ..., "outer_scale": 1.0,
//              "inner_scale": 0.0, "inner_scale_constant": 35.0},
//   "grid":   {"dim": 1, "n": 64, "delta_a": ..., "wavelength": ...},
//   "plan":   {"z_total": ..., "n_slabs": 64, "n_realizations": 500,
//              "master_seed": 0},
//   "source": {"waist": 0.004},
//   "kernel": {"n_steps": 0, "snapshots": [], "input": ""},
//   "states": {"photon_numbers": [0, 1, 2], "alpha_max": 1.0, "points": 41},
//   "task": "validate",
//   "output_dir": "out",
//   "tolerances": {"sigma": 3.0, "rms_relative": 0.05,
//                  "conservation": 1e-8, "exact": 1e-10}
// }
//
// Required: model.cn2, grid.n, grid.delta_a, grid.wavelength, plan.z_total.

#include "ipfe/splitstep.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace ipfe {

struct Tolerances {
  double sigma = 3.0;          ///< statistical agreement, standard errors
  double rms_relative = 0.05;  ///< relative RMS discrepancy
  double conservation = 1e-8;  ///< relative trace drift
  double exact = 1e-10;        ///< closed-form agreement
};

struct KernelSettings {
  std::size_t n_steps = 0;  ///< 0 selects the smallest step count within the guard
  std::vector<double> snapshots;  ///< z values (m) at which to write kernels
  std::string input;              ///< initial kernel file; empty = source beam
};

struct StatesSettings {
  std::vector<unsigned> photon_numbers{0, 1, 2};
  double alpha_max = 1.0;
  std::size_t points = 41;
};

struct RunConfig {
  PropagationPlan plan;  ///< owns grid and model
  double source_waist = 0.004;
  KernelSettings kernel;
  StatesSettings states;
  std::string task = "validate";
  std::filesystem::path output_dir = "out";
  Tolerances tolerances;
  std::vector<std::string> warnings;

  const FrequencyGrid& grid() const { return plan.grid; }
  const TurbulenceModel& model() const { return plan.model; }
};

/// Throws ConfigError naming the offending field path.
RunConfig parse_config(const std::string& json_text);
RunConfig load_config(const std::filesystem::path& path);

/// Help text listing every key and its default.
std::string config_reference();

/// Gaussian source beam G0(a) = sqrt(pi) w0 exp(-pi^2 w0^2 |a|^2) (per axis).
Spectrum gaussian_beam(const FrequencyGrid& grid, double waist);

} // namespace ipfe
