#pragma once

#include <Eigen/Dense>
#include <compare>
#include <stdexcept>
#include <string>

#include "plasmapath/constants.hpp"

namespace plasmapath::frames {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

/**
 * Continuous time tag: seconds past the reference epoch (2000-01-01 12:00 on
 * a TAI-like uniform scale).  Epochs are opaque seconds; no leap-second
 * bookkeeping is performed anywhere in the library.
 */
struct Epoch {
  double sec = 0.0;

  constexpr Epoch() = default;
  constexpr explicit Epoch(double seconds) : sec(seconds) {}

  friend constexpr Epoch operator+(Epoch t, double ds) { return Epoch(t.sec + ds); }
  friend constexpr Epoch operator-(Epoch t, double ds) { return Epoch(t.sec - ds); }
  friend constexpr double operator-(Epoch a, Epoch b) { return a.sec - b.sec; }
  friend constexpr auto operator<=>(Epoch a, Epoch b) { return a.sec <=> b.sec; }
  friend constexpr bool operator==(Epoch a, Epoch b) { return a.sec == b.sec; }
};

enum class Frame {
  EarthCenteredInertial,
  MoonCenteredInertial,
  SolarMagnetic,
};

std::string frame_name(Frame f);
Frame frame_from_name(const std::string& name);

/// Position/velocity at a time tag in a named frame; the unit of ephemeris exchange.
struct EpochState {
  Epoch epoch;
  Frame frame = Frame::EarthCenteredInertial;
  Vec3 position_km = Vec3::Zero();
  Vec3 velocity_kms = Vec3::Zero();
};

/// Classical elliptical elements (angles in degrees).
struct KeplerianElements {
  double a_km = 0.0;
  double e = 0.0;
  double inc_deg = 0.0;
  double raan_deg = 0.0;
  double argp_deg = 0.0;
  double m0_deg = 0.0;
  double gm_km3s2 = constants::kGmEarthKm3S2;
  Epoch epoch;
};

/// Position in solar-magnetic coordinates: Z along the geomagnetic dipole
/// axis, Sun contained in the X-Z half-plane with positive X toward the Sun.
struct SmPosition {
  double x_km = 0.0;
  double y_km = 0.0;
  double z_km = 0.0;
};

class KeplerError : public std::runtime_error {
 public:
  KeplerError(const std::string& what, double residual_rad)
      : std::runtime_error(what), residual_rad(residual_rad) {}
  double residual_rad;
};

class GeometryError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/**
 * Two-body propagation of elliptical elements to epoch `at`.
 * Kepler's equation is solved to |E - e sin E - M| < 1e-12 rad; a KeplerError
 * carrying the final residual is thrown if 50 iterations do not get there.
 */
EpochState kepler_to_state(const KeplerianElements& el, Epoch at,
                           Frame frame = Frame::EarthCenteredInertial);

/// Orbital period 2*pi*sqrt(a^3/gm) in seconds.
double orbital_period_s(const KeplerianElements& el);

/**
 * Minimum altitude of the straight tx-rx chord above the Earth sphere, km.
 *
 * If the foot of the perpendicular from the Earth's center lies within the
 * segment the perpendicular distance is used; otherwise the smaller endpoint
 * radius.  Negative values mean the chord intersects the Earth.
 * Both positions must be Earth-centered.  Throws GeometryError on a
 * zero-length segment.
 */
double tangential_altitude_km(const Vec3& tx_km, const Vec3& rx_km);

/**
 * Low-precision analytic solar ephemeris (mean-longitude polynomial, approx
 * 0.01 deg).  Returns the unit vector from Earth to Sun in the inertial frame.
 */
Vec3 sun_direction_eci(Epoch t);

/**
 * Earth-centered-inertial <-> solar-magnetic rotation.  The dipole axis is
 * fixed in the inertial frame for a run; the Sun position comes from the
 * analytic solar ephemeris at the given epoch.
 */
class SmFrameModel {
 public:
  /// Centered dipole tilted from +Z by `tilt_deg` toward reference longitude
  /// `lon_deg` (measured in the inertial XY plane).
  static Vec3 default_dipole_axis(double tilt_deg = 11.5, double lon_deg = -71.8);

  explicit SmFrameModel(const Vec3& dipole_axis_eci = default_dipole_axis());

  const Vec3& dipole_axis() const { return axis_; }

  /// Proper rotation (det +1) mapping inertial coordinates to SM coordinates.
  /// Throws GeometryError when the Sun direction is parallel to the dipole axis.
  Mat3 rotation_eci_to_sm(Epoch t) const;

  SmPosition to_sm(const EpochState& pos) const;
  Vec3 to_sm(const Vec3& pos_eci_km, Epoch t) const;
  Vec3 from_sm(const Vec3& pos_sm_km, Epoch t) const;

 private:
  Vec3 axis_;  // unit
};

}  // namespace plasmapath::frames
