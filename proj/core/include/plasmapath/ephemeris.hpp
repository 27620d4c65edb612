#pragma once

#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "plasmapath/frames.hpp"

namespace plasmapath::frames {

class CoverageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Time-indexed state source for one body.
class EphemerisSource {
 public:
  virtual ~EphemerisSource() = default;
  virtual EpochState state_at(Epoch t) const = 0;
  /// Inclusive validity interval.
  virtual std::pair<Epoch, Epoch> span() const = 0;
};

/// Two-body propagation of fixed elements; valid over +-10 years of the
/// element epoch.
class KeplerianEphemeris final : public EphemerisSource {
 public:
  KeplerianEphemeris(KeplerianElements el, Frame frame = Frame::EarthCenteredInertial)
      : el_(std::move(el)), frame_(frame) {}

  EpochState state_at(Epoch t) const override;
  std::pair<Epoch, Epoch> span() const override;
  const KeplerianElements& elements() const { return el_; }

 private:
  KeplerianElements el_;
  Frame frame_;
};

/**
 * Tabulated ephemeris with 4-node Lagrange interpolation in time.
 *
 * CSV format: header `epoch_s,frame,x_km,y_km,z_km,vx_kms,vy_kms,vz_kms`,
 * one row per sample, epochs strictly increasing.  Queries outside the table
 * span throw CoverageError naming the missing interval.
 */
class SampledEphemeris final : public EphemerisSource {
 public:
  SampledEphemeris(std::vector<EpochState> samples);

  static SampledEphemeris from_csv(const std::string& path);

  EpochState state_at(Epoch t) const override;
  std::pair<Epoch, Epoch> span() const override;
  std::size_t size() const { return samples_.size(); }

 private:
  std::vector<EpochState> samples_;
};

struct NamedElements {
  std::string name;
  KeplerianElements elements;
};

/**
 * Element file: one record per satellite, header
 * `name,a_km,e,inc_deg,raan_deg,argp_deg,m0_deg,epoch_s`.  The central-body
 * gm is supplied by the caller.
 */
std::vector<NamedElements> load_elements_csv(const std::string& path, double gm_km3s2);

struct LightTimeSolution {
  Epoch t_tx;
  Vec3 tx_position_km = Vec3::Zero();
  double range_km = 0.0;
  int iterations = 0;
};

/**
 * Solve t_tx = t_rx - |r_rx - r_tx(t_tx)|/c by fixed-point iteration starting
 * from t_tx = t_rx.  Converges to a light-time residual below 1e-12 s.
 */
LightTimeSolution solve_light_time(const EpochState& rx, const EphemerisSource& tx_ephemeris);

}  // namespace plasmapath::frames
