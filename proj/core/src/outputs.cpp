#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "plasmapath/constants.hpp"
#include "plasmapath/engine.hpp"

namespace plasmapath::scenario {

namespace {

namespace fs = std::filesystem;

std::string fmt(double v) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

std::ofstream open_out(const fs::path& p) {
  std::ofstream f(p, std::ios::binary);  // '\n' line endings on every platform
  if (!f) throw std::runtime_error("cannot open output file: " + p.string());
  return f;
}

void write_records_csv(const RunResult& result, const fs::path& path) {
  std::ofstream f = open_out(path);
  f << "epoch_index,epoch_s,kp,r12,freq,tx,rx,tangential_altitude_km,"
       "c_n0_dbhz,tx_off_boresight_deg,rx_off_boresight_deg,"
       "d_i1_los_m,d_i2_m,d_i3_m,d_i1_bend_m,d_len_m,d_total_m,"
       "tec_los_m2,tec_bend_m2,dll_sigma_m,uere_mean_m,uere_p95_m,uere_p99_m,"
       "outer_iterations,miss_m\n";
  for (const LinkRecord& r : result.records) {
    f << r.epoch_index << ',' << fmt(r.epoch_s) << ',' << fmt(r.kp) << ',' << fmt(r.r12) << ','
      << r.freq_label << ',' << r.tx_id << ',' << r.rx_id << ','
      << fmt(r.tangential_altitude_km) << ',' << fmt(r.budget.c_n0_dbhz) << ','
      << fmt(r.budget.tx_off_boresight_deg) << ',' << fmt(r.budget.rx_off_boresight_deg) << ','
      << fmt(r.delay.d_i1_los_m) << ',' << fmt(r.delay.d_i2_m) << ',' << fmt(r.delay.d_i3_m)
      << ',' << fmt(r.delay.d_i1_bend_m) << ',' << fmt(r.delay.d_len_m) << ','
      << fmt(r.delay.d_total_m) << ',' << fmt(r.delay.tec_los_m2) << ','
      << fmt(r.delay.tec_bend_m2) << ',' << fmt(r.dll_sigma_m) << ',' << fmt(r.uere.mean_m)
      << ',' << fmt(r.uere.p95_m) << ',' << fmt(r.uere.p99_m) << ',' << r.outer_iterations
      << ',' << fmt(r.miss_m) << '\n';
  }
}

void write_summary_csv(const SummaryBlock& block, const fs::path& path) {
  std::ofstream f = open_out(path);
  f << "bin_lo_km,bin_hi_km,count";
  const char* metrics[] = {"d_total_m", "d_i1_los_m", "d_i2_m",   "d_i3_m", "d_len_m",
                           "d_i1_bend_m", "c_n0_dbhz", "noise_m", "uere_m"};
  for (const char* m : metrics) {
    f << ',' << m << "_mean," << m << "_p95," << m << "_p99";
  }
  f << '\n';
  for (const BinSummary& b : block.bins) {
    f << fmt(b.lo_km) << ',' << fmt(b.hi_km) << ',' << b.count;
    const MetricStat* stats[] = {&b.d_total, &b.d_i1_los, &b.d_i2,  &b.d_i3, &b.d_len,
                                 &b.d_i1_bend, &b.c_n0,   &b.noise, &b.uere};
    for (const MetricStat* s : stats) {
      f << ',' << fmt(s->mean) << ',' << fmt(s->p95) << ',' << fmt(s->p99);
    }
    f << '\n';
  }
}

void write_histogram_csv(const std::vector<double>& values, const fs::path& path) {
  // Log-spaced bins, 10 per decade over [1e-6, 1e4) m; out-of-range values
  // land in the underflow/overflow rows.
  constexpr int kPerDecade = 10;
  constexpr double kLo = 1e-6, kHi = 1e4;
  const int n_bins = static_cast<int>(std::round(std::log10(kHi / kLo))) * kPerDecade;
  std::vector<long long> counts(static_cast<std::size_t>(n_bins) + 2, 0);
  for (double v : values) {
    if (!(v >= kLo)) {
      counts.front()++;
    } else if (v >= kHi) {
      counts.back()++;
    } else {
      int idx = static_cast<int>(std::floor(std::log10(v / kLo) * kPerDecade));
      idx = std::clamp(idx, 0, n_bins - 1);
      counts[static_cast<std::size_t>(idx) + 1]++;
    }
  }
  std::ofstream f = open_out(path);
  f << "bin_lo_m,bin_hi_m,count\n";
  f << "-inf," << fmt(kLo) << ',' << counts.front() << '\n';
  for (int i = 0; i < n_bins; ++i) {
    const double lo = kLo * std::pow(10.0, static_cast<double>(i) / kPerDecade);
    const double hi = kLo * std::pow(10.0, static_cast<double>(i + 1) / kPerDecade);
    f << fmt(lo) << ',' << fmt(hi) << ',' << counts[static_cast<std::size_t>(i) + 1] << '\n';
  }
  f << fmt(kHi) << ",inf," << counts.back() << '\n';
}

}  // namespace

void preflight_output_dir(const std::string& outdir) {
  std::error_code ec;
  fs::create_directories(outdir, ec);
  if (ec) {
    throw std::runtime_error("cannot create output directory " + outdir + ": " + ec.message());
  }
  const fs::path probe = fs::path(outdir) / ".write_probe";
  {
    std::ofstream f(probe);
    if (!f) throw std::runtime_error("output directory is not writable: " + outdir);
  }
  fs::remove(probe, ec);
}

void emit_outputs(const RunResult& result, const ScenarioConfig& cfg, const std::string& outdir) {
  preflight_output_dir(outdir);
  const fs::path base(outdir);

  write_records_csv(result, base / "records.csv");

  for (const SummaryBlock& block : result.summaries) {
    const std::string name =
        "summary_" + fmt(block.kp) + "_" + fmt(block.r12) + "_" + block.freq_label + ".csv";
    write_summary_csv(block, base / name);
  }

  if (!result.records.empty()) {
    auto values_of = [&result](auto getter) {
      std::vector<double> v;
      v.reserve(result.records.size());
      for (const LinkRecord& r : result.records) v.push_back(getter(r));
      return v;
    };
    write_histogram_csv(values_of([](const LinkRecord& r) { return r.delay.d_total_m; }),
                        base / "histogram_d_total.csv");
    write_histogram_csv(values_of([](const LinkRecord& r) { return r.delay.d_i1_los_m; }),
                        base / "histogram_d_i1_los.csv");
    write_histogram_csv(values_of([](const LinkRecord& r) { return r.delay.d_len_m; }),
                        base / "histogram_d_len.csv");
    write_histogram_csv(values_of([](const LinkRecord& r) { return r.dll_sigma_m; }),
                        base / "histogram_dll_sigma.csv");
    write_histogram_csv(values_of([](const LinkRecord& r) { return r.uere.mean_m; }),
                        base / "histogram_uere_mean.csv");
  }

  nlohmann::json manifest;
  manifest["name"] = cfg.name;
  manifest["version"] = constants::kVersion;
  manifest["seed"] = cfg.seed;
  manifest["workers"] = cfg.workers;
  manifest["wall_seconds"] = result.wall_seconds;
  manifest["counts"] = {
      {"candidates", result.counts.candidates},
      {"emitted", result.counts.emitted},
      {"occulted_earth", result.counts.occulted_earth},
      {"occulted_moon", result.counts.occulted_moon},
      {"untrackable", result.counts.untrackable},
      {"non_converged", result.counts.non_converged},
      {"failed", result.counts.failed},
  };
  manifest["convergence"] = {
      {"total_outer_iterations", result.total_outer_iterations},
      {"max_outer_iterations", result.max_outer_iterations},
      {"mean_outer_iterations_per_emitted",
       result.counts.emitted > 0
           ? static_cast<double>(result.total_outer_iterations) /
                 static_cast<double>(result.counts.emitted)
           : 0.0},
  };
  if (!result.failure_messages.empty()) manifest["failures"] = result.failure_messages;
  manifest["config_echo"] = cfg.config_text;

  std::ofstream mf = open_out(base / "run_manifest.json");
  mf << manifest.dump(2) << '\n';
}

}  // namespace plasmapath::scenario
