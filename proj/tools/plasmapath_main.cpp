// plasmapath command line: batch scenario runs, single-link traces,
// electron-density slices, and config validation.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "plasmapath/engine.hpp"

namespace pp = plasmapath;
using pp::frames::Vec3;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfigError = 1;
constexpr int kExitRuntimeFailure = 2;
constexpr int kExitAllLinksFailed = 3;

Vec3 parse_vec3(const std::string& text) {
  Vec3 v;
  char comma1 = 0, comma2 = 0;
  std::istringstream ss(text);
  if (!(ss >> v.x() >> comma1 >> v.y() >> comma2 >> v.z()) || comma1 != ',' || comma2 != ',') {
    throw CLI::ValidationError("expected 'x,y,z' in km, got '" + text + "'");
  }
  return v;
}

int run_command(const std::string& config_path, int workers_override,
                long long seed_override, const std::string& outdir_override, bool quiet) {
  pp::scenario::ScenarioConfig cfg;
  try {
    cfg = pp::scenario::load_config(config_path);
  } catch (const pp::scenario::ConfigError& e) {
    std::cerr << e.what() << "\n";
    return kExitConfigError;
  }
  if (workers_override > 0) cfg.workers = workers_override;
  if (seed_override >= 0) cfg.seed = static_cast<std::uint64_t>(seed_override);
  const std::string outdir = outdir_override.empty() ? cfg.output_dir : outdir_override;

  try {
    pp::scenario::preflight_output_dir(outdir);
    const pp::scenario::RunResult result = pp::scenario::run_scenario(cfg);
    pp::scenario::emit_outputs(result, cfg, outdir);

    if (!quiet) {
      const auto& c = result.counts;
      std::printf("run '%s': %lld tasks in %.1f s\n", cfg.name.c_str(), c.candidates,
                  result.wall_seconds);
      std::printf("  emitted %lld, occulted earth %lld / moon %lld, untrackable %lld, "
                  "non-converged %lld, failed %lld\n",
                  c.emitted, c.occulted_earth, c.occulted_moon, c.untrackable, c.non_converged,
                  c.failed);
      std::printf("  outputs in %s\n", outdir.c_str());
    }
    if (result.counts.emitted == 0 && result.counts.candidates > 0) {
      std::cerr << "all " << result.counts.candidates << " candidate links were filtered or "
                << "failed (occulted earth " << result.counts.occulted_earth << ", moon "
                << result.counts.occulted_moon << ", untrackable " << result.counts.untrackable
                << ", non-converged " << result.counts.non_converged << ", failed "
                << result.counts.failed << ")\n";
      return kExitAllLinksFailed;
    }
  } catch (const std::exception& e) {
    std::cerr << "run failed: " << e.what() << "\n";
    return kExitRuntimeFailure;
  }
  return kExitOk;
}

int trace_command(const Vec3& tx, const Vec3& rx, const std::string& freq_label, double kp,
                  double r12, double epoch_s, bool vacuum) {
  try {
    const pp::scenario::FrequencyConfig fc = pp::scenario::standard_frequency(freq_label);
    pp::media::SpaceWeather wx;
    wx.kp = kp;
    wx.r12 = r12;
    wx.epoch = pp::frames::Epoch(epoch_s);

    std::shared_ptr<const pp::media::MediumModel> medium;
    if (vacuum) {
      medium = std::make_shared<pp::media::VacuumMedium>();
    } else {
      medium = std::make_shared<pp::media::ReferenceMedium>();
    }

    const auto result = pp::raytrace::solve_initial_direction(tx, rx, fc.hz, *medium, wx);
    std::printf("iter  miss_m        delay_change_m\n");
    for (std::size_t i = 0; i < result.history.size(); ++i) {
      std::printf("%-5zu %-13.6g %-13.6g\n", i + 1, result.history[i].miss_m,
                  result.history[i].delay_change_m);
    }
    std::printf("converged: %s in %d outer iterations, miss %.6g m\n",
                result.converged ? "yes" : "no", result.outer_iterations, result.miss_m);
    if (!result.converged) return kExitRuntimeFailure;

    const auto d = pp::delays::breakdown(result, tx, rx, *medium, wx);
    std::printf("tangential_altitude_km  %.6g\n", pp::frames::tangential_altitude_km(tx, rx));
    std::printf("d_i1_los_m              %.9g\n", d.d_i1_los_m);
    std::printf("d_i2_m                  %.9g\n", d.d_i2_m);
    std::printf("d_i3_m                  %.9g\n", d.d_i3_m);
    std::printf("d_i1_bend_m             %.9g\n", d.d_i1_bend_m);
    std::printf("d_len_m                 %.9g\n", d.d_len_m);
    std::printf("d_total_m               %.9g\n", d.d_total_m);
    std::printf("tec_los_tecu            %.9g\n", d.tec_los_m2 / 1e16);
    std::printf("tec_bend_tecu           %.9g\n", d.tec_bend_m2 / 1e16);
  } catch (const std::exception& e) {
    std::cerr << "trace failed: " << e.what() << "\n";
    return kExitRuntimeFailure;
  }
  return kExitOk;
}

int medium_command(const std::string& slice, double kp, double r12, double epoch_s,
                   double extent_re, int grid, const std::string& out_path) {
  try {
    if (slice != "xy" && slice != "xz") {
      std::cerr << "--slice must be xy or xz\n";
      return kExitConfigError;
    }
    pp::media::ReferenceMedium medium;
    pp::media::SpaceWeather wx;
    wx.kp = kp;
    wx.r12 = r12;
    wx.epoch = pp::frames::Epoch(epoch_s);
    const pp::frames::SmFrameModel sm(medium.params().dipole_axis);

    std::ostream* out = &std::cout;
    std::ofstream file;
    if (!out_path.empty()) {
      file.open(out_path, std::ios::binary);
      if (!file) {
        std::cerr << "cannot open " << out_path << "\n";
        return kExitRuntimeFailure;
      }
      out = &file;
    }

    const double extent_km = extent_re * pp::constants::kEarthRadiusKm;
    (*out) << (slice == "xy" ? "x_sm_km,y_sm_km,n_e_m3\n" : "x_sm_km,z_sm_km,n_e_m3\n");
    char buf[96];
    for (int i = 0; i < grid; ++i) {
      for (int j = 0; j < grid; ++j) {
        const double a = -extent_km + 2.0 * extent_km * i / (grid - 1);
        const double b = -extent_km + 2.0 * extent_km * j / (grid - 1);
        const Vec3 pos_sm = slice == "xy" ? Vec3(a, b, 0.0) : Vec3(a, 0.0, b);
        const Vec3 pos_eci = sm.from_sm(pos_sm, wx.epoch);
        const double ne = medium.sample(pos_eci, wx).electron_density_m3;
        std::snprintf(buf, sizeof(buf), "%.10g,%.10g,%.6g\n", a, b, ne);
        (*out) << buf;
      }
    }
  } catch (const std::exception& e) {
    std::cerr << "medium slice failed: " << e.what() << "\n";
    return kExitRuntimeFailure;
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ionospheric/plasmaspheric group-delay characterization for Earth-to-Moon "
               "GNSS links"};
  app.require_subcommand(1);

  // run
  auto* run = app.add_subcommand("run", "run a full scenario from a config file");
  std::string run_config;
  int run_workers = 0;
  long long run_seed = -1;
  std::string run_outdir;
  bool run_quiet = false;
  run->add_option("config", run_config, "scenario config file (YAML)")->required();
  run->add_option("--workers", run_workers, "worker thread count override");
  run->add_option("--seed", run_seed, "RNG seed override");
  run->add_option("--outdir", run_outdir, "output directory override");
  run->add_flag("--quiet", run_quiet, "suppress progress output");

  // trace
  auto* trace = app.add_subcommand("trace", "solve one transmitter->receiver link and print "
                                            "the delay breakdown and convergence history");
  std::string trace_tx, trace_rx, trace_freq = "L1";
  double trace_kp = 3.0, trace_r12 = 100.0, trace_epoch = 0.0;
  bool trace_vacuum = false;
  trace->add_option("--tx", trace_tx, "transmitter position x,y,z (km, ECI)")->required();
  trace->add_option("--rx", trace_rx, "receiver position x,y,z (km, ECI)")->required();
  trace->add_option("--freq", trace_freq, "frequency label (L1, L5, E1)");
  trace->add_option("--kp", trace_kp, "geomagnetic Kp index");
  trace->add_option("--r12", trace_r12, "12-month smoothed sunspot number");
  trace->add_option("--epoch-s", trace_epoch, "medium epoch, seconds past reference");
  trace->add_flag("--vacuum", trace_vacuum, "use the zero-density medium");

  // medium
  auto* med = app.add_subcommand("medium", "sample the reference medium on an SM-plane grid "
                                           "and emit CSV");
  std::string med_slice = "xy", med_out;
  double med_kp = 3.0, med_r12 = 100.0, med_epoch = 0.0, med_extent = 6.0;
  int med_grid = 201;
  med->add_option("--slice", med_slice, "plane: xy or xz (SM coordinates)");
  med->add_option("--kp", med_kp, "geomagnetic Kp index");
  med->add_option("--r12", med_r12, "12-month smoothed sunspot number");
  med->add_option("--epoch-s", med_epoch, "medium epoch, seconds past reference");
  med->add_option("--extent-re", med_extent, "half extent of the grid in Earth radii");
  med->add_option("--grid", med_grid, "grid points per axis");
  med->add_option("-o,--output", med_out, "output CSV path (default stdout)");

  // validate
  auto* val = app.add_subcommand("validate", "parse and validate a scenario config");
  std::string val_config;
  val->add_option("config", val_config, "scenario config file (YAML)")->required();

  CLI11_PARSE(app, argc, argv);

  if (run->parsed()) return run_command(run_config, run_workers, run_seed, run_outdir, run_quiet);
  if (trace->parsed()) {
    try {
      return trace_command(parse_vec3(trace_tx), parse_vec3(trace_rx), trace_freq, trace_kp,
                           trace_r12, trace_epoch, trace_vacuum);
    } catch (const CLI::ValidationError& e) {
      std::cerr << e.what() << "\n";
      return kExitConfigError;
    }
  }
  if (med->parsed()) {
    return medium_command(med_slice, med_kp, med_r12, med_epoch, med_extent, med_grid, med_out);
  }
  if (val->parsed()) {
    try {
      pp::scenario::load_config(val_config);
      std::cout << "OK\n";
      return kExitOk;
    } catch (const pp::scenario::ConfigError& e) {
      std::cerr << e.what() << "\n";
      return kExitConfigError;
    }
  }
  return kExitOk;
}
