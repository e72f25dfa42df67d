// ipfe command-line driver.
#include "validation/checks.hpp"

#include "ipfe/config.hpp"
#include "ipfe/diagnostics.hpp"
#include "ipfe/error.hpp"
#include "ipfe/io.hpp"
#include "ipfe/moments.hpp"
#include "ipfe/parallel.hpp"
#include "ipfe/phase_screen.hpp"
#include "ipfe/splitstep.hpp"
#include "ipfe/states.hpp"

#include "CLI11.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <numbers>
#include <optional>
#include <random>
#include <sstream>

using namespace ipfe;
namespace fs = std::filesystem;

namespace {

struct Common {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::size_t threads = 0;
  std::string out;
};

RunConfig load(const Common& c) {
  RunConfig cfg = load_config(c.config);
  if (c.seed)
    cfg.plan.master_seed = *c.seed;
  if (!c.out.empty())
    cfg.output_dir = c.out;
  fs::create_directories(cfg.output_dir);
  for (const auto& w : cfg.warnings)
    std::cerr << "warning: " << w << "\n";
  return cfg;
}

std::ofstream open_csv(const fs::path& path) {
  std::ofstream out(path);
  if (!out)
    throw Error("cannot open " + path.string() + " for writing");
  out << std::setprecision(17);
  return out;
}

io::Array as_array(std::vector<std::uint64_t> shape, std::vector<cplx> values) {
  return {std::move(shape), std::move(values)};
}

int cmd_simulate(const Common& c) {
  const RunConfig cfg = load(c);
  const auto& g = cfg.grid();
  const auto s0 = gaussian_beam(g, cfg.source_waist);
  const auto st = ensemble_moments(s0, cfg.plan, resolve_threads(c.threads));
  const std::uint64_t n = g.size();
  io::write_array(cfg.output_dir / "mean.bin", as_array({n}, st.mean));
  io::write_array(cfg.output_dir / "coherence.bin", as_array({n, n}, st.coherence));
  io::write_array(cfg.output_dir / "anomalous.bin", as_array({n, n}, st.anomalous));

  auto csv = open_csv(cfg.output_dir / "simulate.csv");
  csv << "site,a_x [cycles/m],a_y [cycles/m],mean_re,mean_im,mean_se,intensity [m^2],"
         "intensity_se [m^2]\n";
  for (std::size_t i = 0; i < n; ++i) {
    const auto a = g.frequency(i);
    csv << i << ',' << a[0] << ',' << a[1] << ',' << st.mean[i].real() << ','
        << st.mean[i].imag() << ',' << st.mean_se(i) << ',' << st.coherence[i * n + i].real()
        << ',' << st.coherence_se(i, i) << '\n';
  }
  std::cout << "simulate: " << st.n_samples << " realizations, " << cfg.plan.n_slabs
            << " slabs, output in " << cfg.output_dir << "\n";
  return 0;
}

int cmd_evolve_kernel(const Common& c, bool biphoton_form) {
  const RunConfig cfg = load(c);
  const auto& g = cfg.grid();
  const double z_total = cfg.plan.z_total;
  MomentKernel h = cfg.kernel.input.empty()
                       ? outer_product(gaussian_beam(g, cfg.source_waist))
                       : io::read_kernel(cfg.kernel.input);
  require_same_grid(h.grid(), g, "evolve-kernel input");
  const std::size_t steps =
      cfg.kernel.n_steps > 0 ? cfg.kernel.n_steps : minimum_steps(cfg.model(), g, z_total);
  const double dz = z_total / static_cast<double>(steps);

  auto csv = open_csv(cfg.output_dir / "evolve_kernel.csv");
  csv << "z [m],trace,hermiticity_residual,boundary_mass\n";
  const bool square = h.m() == h.n() && h.m() > 0;
  auto record = [&](const MomentKernel& k) {
    csv << k.z << ',';
    if (square)
      csv << kernel_trace(k) << ',' << hermiticity_residual(k) << ',' << boundary_mass(k);
    else
      csv << ",,";
    csv << '\n';
  };
  record(h);

  std::vector<double> stops = cfg.kernel.snapshots;
  stops.push_back(z_total);
  std::sort(stops.begin(), stops.end());
  stops.erase(std::unique(stops.begin(), stops.end()), stops.end());
  EvolveOptions opt;
  opt.biphoton_form = biphoton_form;
  opt.on_step = record;
  for (double stop : stops) {
    const double len = stop - h.z;
    if (len > 0.0) {
      opt.n_steps = static_cast<std::size_t>(std::ceil(len / dz - 1e-9));
      h = evolve_kernel(h, cfg.model(), len, opt);
      h.z = stop;
    }
    std::ostringstream name;
    name << "kernel_z" << std::fixed << std::setprecision(4) << stop << ".bin";
    io::write_kernel(cfg.output_dir / name.str(), h);
  }
  std::cout << "evolve-kernel: (" << h.m() << "," << h.n() << ") kernel to z = " << h.z
            << " m with dz = " << dz << " m, output in " << cfg.output_dir << "\n";
  return 0;
}

int cmd_states(const Common& c, bool stationarity) {
  const RunConfig cfg = load(c);
  const auto& g = cfg.grid();
  if (stationarity) {
    auto csv = open_csv(cfg.output_dir / "stationarity.csv");
    csv << "state,parameter,perturbation,rhs_norm,fourth_order_residual\n";
    const FrequencyGrid small(1, std::min<std::size_t>(g.n(), 16), g.delta_a(), g.wavelength());
    for (double c_th : {2.0, 0.5, 4.0}) {
      const auto d = gaussian_drift(thermal_state(small, c_th), cfg.model());
      csv << (c_th == 2.0 ? "vacuum" : "thermal") << ',' << c_th << ",0," << d.rhs_norm << ','
          << d.fourth_order_residual << '\n';
    }
    std::mt19937_64 rng(cfg.plan.master_seed);
    std::normal_distribution<double> nd;
    const std::size_t n = small.size();
    std::vector<cplx> p(n * n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) {
        p[i * n + j] = cplx(nd(rng), nd(rng));
        p[j * n + i] = std::conj(p[i * n + j]);
      }
    for (double eps : {1e-1, 1e-2, 1e-3, 1e-4}) {
      auto s = vacuum_state(small);
      for (std::size_t i = 0; i < n * n; ++i)
        s.A[i] += eps * p[i] / small.weight();
      const auto d = gaussian_drift(s, cfg.model());
      csv << "perturbed_vacuum,2," << eps << ',' << d.rhs_norm << ',' << d.fourth_order_residual
          << '\n';
    }
    std::cout << "states: stationarity table in " << cfg.output_dir / "stationarity.csv" << "\n";
    return 0;
  }

  const FockSpec f{normalized(gaussian_beam(g, cfg.source_waist)), 0};
  auto csv = open_csv(cfg.output_dir / "states.csv");
  csv << "r,abs_overlap_sq,norm_sq";
  for (unsigned n : cfg.states.photon_numbers)
    csv << ",W_" << n;
  csv << ",generating_eta_0.5\n";
  for (std::size_t k = 0; k < cfg.states.points; ++k) {
    const double r = cfg.states.alpha_max * static_cast<double>(k) /
                     static_cast<double>(cfg.states.points - 1);
    Spectrum alpha = f.F;
    for (auto& v : alpha.values)
      v *= r;
    csv << r << ',' << std::norm(contract(conj(alpha), f.F)) << ',' << alpha.norm_sq();
    for (unsigned n : cfg.states.photon_numbers)
      csv << ',' << fock_wigner(n, f, alpha).real();
    csv << ',' << fock_generating(0.5, f, alpha).real() << '\n';
  }
  std::cout << "states: Fock Wigner sweep in " << cfg.output_dir / "states.csv" << "\n";
  return 0;
}

int cmd_screens(const Common& c, bool validate, std::size_t samples) {
  const RunConfig cfg = load(c);
  const auto& g = cfg.grid();
  const double dz = cfg.plan.slab_thickness();
  if (validate) {
    const auto st = screen_statistics(cfg.model(), g, dz, samples, cfg.plan.master_seed);
    auto csv = open_csv(cfg.output_dir / "screen_statistics.csv");
    csv << "site,|a| [cycles/m],target_variance,sample_variance,standard_error,"
           "relative_deviation\n";
    for (const auto& m : st.modes)
      csv << m.site << ',' << m.frequency << ',' << m.target_variance << ','
          << m.sample_variance << ',' << m.standard_error << ',' << m.relative_deviation << '\n';
    const bool pass = st.max_relative_deviation < 0.05 && st.max_cross_z_score < 4.0;
    std::cout << "screens: " << st.n_samples << " samples, max relative deviation "
              << st.max_relative_deviation << " (< 0.05), max cross z-score "
              << st.max_cross_z_score << " (< 4): " << (pass ? "PASS" : "FAIL") << "\n";
    return pass ? 0 : 1;
  }
  std::vector<cplx> all;
  std::vector<cplx> phases;
  for (std::size_t s = 0; s < cfg.plan.n_slabs; ++s) {
    const auto screen = draw_screen(cfg.model(), g, dz, screen_seed(cfg.plan.master_seed, 0, s));
    all.insert(all.end(), screen.n_tilde_hat.begin(), screen.n_tilde_hat.end());
    for (double phi : phase_screen_position(screen, g.wavenumber()))
      phases.emplace_back(phi, 0.0);
  }
  const std::uint64_t slabs = cfg.plan.n_slabs, n = g.size();
  io::write_array(cfg.output_dir / "screens.bin", as_array({slabs, n}, all));
  io::write_array(cfg.output_dir / "phases.bin", as_array({slabs, n}, phases));
  std::cout << "screens: " << slabs << " slab screens of realization 0 in " << cfg.output_dir
            << "\n";
  return 0;
}

int cmd_spectrum_table(const Common& c, std::size_t points) {
  const RunConfig cfg = load(c);
  const auto& g = cfg.grid();
  const double a_max = 0.5 * static_cast<double>(g.n()) * g.delta_a();
  auto csv = open_csv(cfg.output_dir / "spectrum.csv");
  csv << "|a| [cycles/m],|k| [rad/m],Phi_n(a,0) [m^3]\n";
  for (std::size_t i = 0; i < points; ++i) {
    const double a = a_max * static_cast<double>(i) / static_cast<double>(points - 1);
    csv << a << ',' << 2.0 * std::numbers::pi * a << ',';
    if (a == 0.0 && !cfg.model().has_finite_lambda())
      csv << "inf\n";
    else
      csv << psd_transverse(cfg.model(), a) << '\n';
  }
  if (cfg.model().has_finite_lambda())
    std::cout << "Lambda_grid = " << lattice_lambda(cfg.model(), g)
              << " m, Lambda (continuum) = " << lambda_total(cfg.model()) << " m\n";
  std::cout << "spectrum-table: " << points << " rows in " << cfg.output_dir / "spectrum.csv"
            << "\n";
  return 0;
}

int cmd_validate(const Common& c, const std::vector<std::string>& only) {
  const RunConfig cfg = load(c);
  const auto report = validation::run_validate(cfg, resolve_threads(c.threads), only);
  for (const auto& r : report.checks)
    std::cout << validation::summary_line(r) << "\n";
  io::write_text(cfg.output_dir / "report.json", validation::to_json(report).dump(2) + "\n");
  io::write_text(cfg.output_dir / "report.txt", validation::to_text(report));
  std::cout << "validate: " << (report.pass ? "PASS" : "FAIL") << ", report in "
            << cfg.output_dir << "\n";
  return report.pass ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Moment-kernel and split-step propagation through Markov turbulence"};
  app.require_subcommand(1);
  app.footer("Configuration keys:\n" + config_reference());

  Common common;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", common.config, "JSON run configuration")
        ->required()
        ->check(CLI::ExistingFile);
    sub->add_option("--seed", common.seed, "override plan.master_seed");
    sub->add_option("--threads", common.threads,
                    "worker threads (default: IPFE_THREADS, else 1)");
    sub->add_option("--out", common.out, "override output_dir");
  };

  auto* simulate = app.add_subcommand("simulate", "Monte-Carlo split-step ensemble moments");
  add_common(simulate);

  bool biphoton_form = false;
  auto* evolve = app.add_subcommand("evolve-kernel", "integrate a moment kernel with RK4");
  add_common(evolve);
  evolve->add_flag("--biphoton-form", biphoton_form,
                   "use the explicit bi-photon right-hand side for (2,2) kernels");

  bool stationarity = false;
  auto* states = app.add_subcommand("states", "Fock Wigner sweep or Gaussian stationarity");
  add_common(states);
  states->add_flag("--stationarity", stationarity, "emit the Gaussian drift residual table");

  bool validate_screens = false;
  std::size_t samples = 10000;
  auto* screens = app.add_subcommand("screens", "draw phase screens or validate their statistics");
  add_common(screens);
  screens->add_flag("--validate", validate_screens, "compare screen statistics with the PSD");
  screens->add_option("--samples", samples, "screens used by --validate")
      ->check(CLI::Range(std::size_t{100}, std::size_t{100000000}));

  std::size_t points = 256;
  auto* spectrum = app.add_subcommand("spectrum-table", "tabulate the refractive-index PSD");
  add_common(spectrum);
  spectrum->add_option("--points", points, "table rows")
      ->check(CLI::Range(std::size_t{2}, std::size_t{1000000}));

  std::vector<std::string> only;
  auto* validate = app.add_subcommand("validate", "run the acceptance checks A1-A9");
  add_common(validate);
  validate->add_option("--only", only, "run only the listed checks (e.g. A3 A8)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*simulate)
      return cmd_simulate(common);
    if (*evolve)
      return cmd_evolve_kernel(common, biphoton_form);
    if (*states)
      return cmd_states(common, stationarity);
    if (*screens)
      return cmd_screens(common, validate_screens, samples);
    if (*spectrum)
      return cmd_spectrum_table(common, points);
    if (*validate)
      return cmd_validate(common, only);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
