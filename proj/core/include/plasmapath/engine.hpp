#pragma once

#include "plasmapath/delays.hpp"
#include "plasmapath/scenario.hpp"

namespace plasmapath::scenario {

enum class LinkOutcome {
  Emitted,
  OccultedEarth,
  OccultedMoon,
  Untrackable,
  NonConverged,
  Failed,
};

/// One transmitter-receiver geometry at one receive epoch (weather- and
/// frequency-independent).
struct CandidateLink {
  int epoch_index = 0;
  Epoch t_rx;
  int tx_index = 0;
  int rx_index = 0;  // orbiters first, then surface users
  std::string rx_name;
  Vec3 tx_position_km = Vec3::Zero();  // at the transmit event
  Vec3 rx_position_km = Vec3::Zero();
  double light_time_s = 0.0;
  double tangential_altitude_km = 0.0;
  bool earth_occulted = false;
  bool moon_occulted = false;
};

/// One emitted observation; only trackable, converged links become records.
struct LinkRecord {
  int epoch_index = 0;
  double epoch_s = 0.0;
  double kp = 0.0;
  double r12 = 0.0;
  std::string freq_label;
  std::string tx_id;
  std::string rx_id;
  double tangential_altitude_km = 0.0;
  delays::DelayBreakdown delay;
  link::LinkBudget budget;
  double dll_sigma_m = 0.0;
  link::UereStats uere;
  int outer_iterations = 0;
  double miss_m = 0.0;
};

struct MetricStat {
  double mean = 0.0;
  double p95 = 0.0;  // nearest-rank
  double p99 = 0.0;
};

struct BinSummary {
  double lo_km = 0.0;
  double hi_km = 0.0;
  int count = 0;
  MetricStat d_total, d_i1_los, d_i2, d_i3, d_len, d_i1_bend;
  MetricStat c_n0, noise, uere;
};

struct SummaryBlock {
  double kp = 0.0;
  double r12 = 0.0;
  std::string freq_label;
  std::vector<BinSummary> bins;  // only populated bins are kept
};

struct RunCounts {
  long long candidates = 0;  // epoch x weather x frequency x pair tasks
  long long emitted = 0;
  long long occulted_earth = 0;
  long long occulted_moon = 0;
  long long untrackable = 0;
  long long non_converged = 0;
  long long failed = 0;
};

struct RunResult {
  std::vector<LinkRecord> records;  // canonical task order
  std::vector<SummaryBlock> summaries;
  RunCounts counts;
  double wall_seconds = 0.0;
  long long total_outer_iterations = 0;
  int max_outer_iterations = 0;
  std::vector<std::string> failure_messages;  // first few, for the manifest
};

/// Geometry screening for every (tx, rx) pair at one epoch: light-time solve,
/// Earth and Moon occultation, boresight geometry.  Filters are recorded as
/// flags, not failures.
std::vector<CandidateLink> enumerate_links(const ScenarioConfig& cfg, int epoch_index);

/**
 * Full batch run: for every epoch x weather x frequency x visible link, the
 * shooting solve, delay breakdown, link budget, and UERE sampling.  Tasks run
 * on `cfg.workers` threads; outputs are merged in task order, so results are
 * identical regardless of worker count.  Failed and non-converged links are
 * counted, never silently dropped.
 */
RunResult run_scenario(const ScenarioConfig& cfg);

/// Throws if the output directory cannot be created or written.
void preflight_output_dir(const std::string& outdir);

/**
 * Write records.csv, per-(kp, r12, frequency) summary CSVs, log-spaced
 * histogram CSVs, and run_manifest.json into `outdir`.  CSV bytes are
 * deterministic for a given seed; the manifest additionally carries wall time.
 */
void emit_outputs(const RunResult& result, const ScenarioConfig& cfg, const std::string& outdir);

}  // namespace plasmapath::scenario
