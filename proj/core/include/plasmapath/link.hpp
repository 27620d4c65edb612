#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "plasmapath/frames.hpp"

namespace plasmapath::link {

using frames::EpochState;
using frames::Vec3;

/**
 * Axisymmetric gain pattern: off-boresight angle (deg) to gain (dBi), linear
 * interpolation between nodes, clamped to the last gain beyond the table.
 */
class AntennaPattern {
 public:
  AntennaPattern(std::string name, std::vector<std::pair<double, double>> nodes);

  /// CSV with header `angle_deg,gain_dbi`.
  static AntennaPattern from_csv(const std::string& path, std::string name = "");
  void to_csv(std::ostream& out) const;

  /// Parabolic main lobe (3 dB down at half the half-power beamwidth) that
  /// transitions to a flat sidelobe shelf, then a backlobe level past 90 deg.
  static AntennaPattern parametric(std::string name, double peak_dbi,
                                   double half_power_beamwidth_deg, double shelf_dbi,
                                   double back_dbi = -30.0);

  double gain_dbi(double off_boresight_deg) const;
  double peak_gain_dbi() const { return nodes_.front().second; }
  const std::string& name() const { return name_; }
  const std::vector<std::pair<double, double>>& nodes() const { return nodes_; }

 private:
  std::string name_;
  std::vector<std::pair<double, double>> nodes_;  // strictly increasing angles from 0
};

/// Delay-lock-loop configuration (chips/seconds/Hz).
struct DllParams {
  double b_dll_hz = 0.1;       // code loop bandwidth
  double spacing_chips = 0.3;  // early-late correlator spacing d
  double t_coh_s = 0.02;       // coherent integration time T
  double t_chip_s = 0.978e-6;  // chipping period
  double b_fe_hz = 2.046e6;    // double-sided front-end bandwidth

  static DllParams l1() { return {}; }
  static DllParams l5() {
    DllParams p;
    p.t_chip_s = 0.0978e-6;
    p.b_fe_hz = 20.46e6;
    return p;
  }
};

/// Which of the three thermal-noise variance regimes applies to d.
int dll_case(const DllParams& p);

/// Thermal-noise variance in chips^2 evaluated with a specific case formula
/// (1 = wide, 2 = narrow, 3 = transition); forced_case 0 selects by dll_case.
double dll_variance_chips2(double c_n0_linear, const DllParams& p, int forced_case = 0);

/// DLL thermal noise sigma in meters at the given C/N0 (dB-Hz).
double dll_sigma_m(double c_n0_dbhz, const DllParams& p);

struct SystemParams {
  double noise_density_dbw_hz = -212.0;     // collapsed G/T-style constant
  double tracking_threshold_dbhz = 18.0;
};

struct LinkBudget {
  double eirp_dbw = 0.0;
  double tx_gain_dbi = 0.0;        // transmit pattern gain at the link angle
  double tx_off_boresight_deg = 0.0;
  double rx_gain_dbi = 0.0;
  double rx_off_boresight_deg = 0.0;
  double free_space_loss_db = 0.0;
  double c_n0_dbhz = 0.0;
  bool trackable = false;
};

/**
 * Received C/N0 from an EIRP-referenced budget.  The transmit pattern enters
 * as a delta from its boresight gain (EIRP already contains the peak), the
 * receive pattern as absolute gain.  Boresight rules: transmitters point at
 * the Earth's center (nadir), lunar receivers point at the Earth.  Both
 * states must be Earth-centered-inertial.
 */
LinkBudget compute_cn0(const EpochState& tx, const EpochState& rx,
                       const AntennaPattern& tx_pattern, const AntennaPattern& rx_pattern,
                       double eirp_dbw, double f_hz, const SystemParams& sys);

struct UereStats {
  double mean_m = 0.0;
  double p95_m = 0.0;
  double p99_m = 0.0;
};

/**
 * Mean absolute sum of the group delay and DLL noise over `n_samples` draws
 * epsilon ~ N(0, sigma); percentiles are nearest-rank over the same draws.
 * Deterministic for a given stream seed.
 */
UereStats total_uere(double d_total_m, double sigma_m, int n_samples, std::uint64_t stream_seed);

}  // namespace plasmapath::link
