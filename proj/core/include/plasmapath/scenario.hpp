#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "plasmapath/ephemeris.hpp"
#include "plasmapath/link.hpp"
#include "plasmapath/media.hpp"
#include "plasmapath/raytrace.hpp"

namespace plasmapath::scenario {

using frames::Epoch;
using frames::Vec3;

/// Configuration-file problem: message lists every offending key with its
/// line number.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct TransmitterConfig {
  std::string name;
  std::shared_ptr<const frames::EphemerisSource> ephemeris;  // Earth-centered
  double eirp_dbw = 27.0;
  link::AntennaPattern pattern = link::AntennaPattern::parametric("gnss-tx", 13.0, 24.0, -7.0);
};

struct OrbiterConfig {
  std::string name;
  frames::KeplerianElements elements;  // about the Moon
};

struct SurfaceUserConfig {
  std::string name;
  double lat_deg = 0.0;
  double lon_deg = 0.0;
  double alt_km = 0.0;
};

struct FrequencyConfig {
  std::string label;  // L1, L5, E1
  double hz = 0.0;
  link::DllParams dll;
};

struct ScenarioConfig {
  std::string name = "scenario";
  std::uint64_t seed = 0;
  int workers = 1;
  std::string output_dir = "out";

  Epoch epoch_start;
  double span_hours = 45.0;
  double step_minutes = 30.0;

  bool vacuum_medium = false;
  media::ReferenceMediumParams medium_params;
  Epoch medium_epoch;
  std::vector<double> kp_values{3.0};
  std::vector<double> r12_values{100.0};

  std::vector<FrequencyConfig> frequencies;

  frames::KeplerianElements moon_elements;
  std::vector<TransmitterConfig> transmitters;
  std::vector<OrbiterConfig> orbiters;
  std::vector<SurfaceUserConfig> surface_users;
  link::AntennaPattern receiver_pattern =
      link::AntennaPattern::parametric("lunar-rx", 14.0, 6.0, -25.0);
  double elevation_mask_deg = 0.0;

  raytrace::SolverOptions solver;
  link::SystemParams system;
  int uere_samples = 100;

  std::vector<double> bin_edges_km{0,    500,  1000, 2000,  3000,  4000,
                                   6000, 8000, 10000, 15000, 20000};

  std::string config_text;  // raw file contents, echoed into the run manifest

  int epoch_count() const;
  Epoch epoch_at(int index) const;

  /// Build the configured medium (pure and safe to share across threads).
  std::shared_ptr<const media::MediumModel> make_medium() const;
};

/**
 * Parse and validate a scenario file (YAML).  Unknown keys are rejected; all
 * schema violations are reported together, each with its line number.
 */
ScenarioConfig load_config(const std::string& path);

/// Frequency label -> (carrier, default DLL parameters).
FrequencyConfig standard_frequency(const std::string& label);

}  // namespace plasmapath::scenario
