#pragma once

#include <cmath>
#include <memory>

#include "plasmapath/frames.hpp"

namespace plasmapath::media {

using frames::Epoch;
using frames::Vec3;

/// Geomagnetic/solar driving conditions plus the epoch used for the Sun
/// geometry of the medium.
struct SpaceWeather {
  double kp = 3.0;    // [0, 9]
  double r12 = 100.0; // 12-month smoothed sunspot number, [0, 300]
  Epoch epoch;
};

struct SolarIndices {
  double f107_sfu = 0.0;
  double ig12 = 0.0;
};

/// Empirical F10.7/IG12 polynomials in R12.
SolarIndices solar_indices_from_r12(double r12);

/// Everything the ray integrator needs from the medium at one point.
struct PlasmaSample {
  double electron_density_m3 = 0.0;
  Vec3 b_field_tesla = Vec3::Zero();
};

/**
 * Pluggable electron-density + magnetic-field model.
 *
 * Implementations must be pure functions of (position, weather): callers
 * evaluate concurrently from many threads.  Density tends to zero at and
 * beyond the cutoff radius, where ray propagation is treated as vacuum.
 */
class MediumModel {
 public:
  virtual ~MediumModel() = default;
  virtual PlasmaSample sample(const Vec3& pos_eci_km, const SpaceWeather& wx) const = 0;
  virtual double cutoff_radius_km() const = 0;
};

/// Zero-density medium (propagation reduces to straight chords).
class VacuumMedium final : public MediumModel {
 public:
  explicit VacuumMedium(double cutoff_radius_km = 4.0 * constants::kEarthRadiusKm)
      : cutoff_km_(cutoff_radius_km) {}
  PlasmaSample sample(const Vec3&, const SpaceWeather&) const override { return {}; }
  double cutoff_radius_km() const override { return cutoff_km_; }

 private:
  double cutoff_km_;
};

/**
 * Constants of the analytic reference medium.  All values are overridable
 * from the scenario configuration.
 */
struct ReferenceMediumParams {
  // Chapman ionosphere
  double peak_density_m3 = 2.5e11;  // Nm at f107 = 63.75, overhead Sun
  double peak_height_km = 300.0;    // hm
  double scale_height_km = 60.0;    // H
  double night_floor = 0.05;        // lower clamp on cos(solar zenith)
  double solar_activity_gain = 0.004;  // density scale per sfu above 63.75

  // Plasmasphere along dipole L-shells: n = N1 (R_E L)^-4
  double plasmasphere_coeff = 2.6e25;  // N1, e/m^3 km^4
  double plasma_join_altitude_km = 1000.0;
  double plasma_join_width_km = 200.0;

  // Plasmapause L_pp = base - per_kp * Kp with a tanh falloff to the trough
  double plasmapause_l_base = 5.6;
  double plasmapause_l_per_kp = 0.46;
  double plasmapause_width_l = 0.1;
  double trough_floor_m3 = 1.0e7;

  // Centered dipole field, surface equatorial strength
  double dipole_surface_tesla = 3.12e-5;
  Vec3 dipole_axis = frames::SmFrameModel::default_dipole_axis();

  // Outer boundary: tanh taper toward the cutoff sphere
  double cutoff_radius_km = 4.0 * constants::kEarthRadiusKm;
  double outer_taper_start_frac = 0.88;
  double outer_taper_width_frac = 0.02;
};

/**
 * Analytic stand-in for an empirical core-plasma model: Chapman-layer
 * ionosphere, (R_E L)^-4 plasmasphere with a Kp-dependent plasmapause, a
 * trough floor, and a centered-dipole magnetic field.  Solar activity enters
 * through R12 -> F10.7 as a linear density scale on both the Chapman peak and
 * the plasmasphere coefficient.
 */
class ReferenceMedium final : public MediumModel {
 public:
  explicit ReferenceMedium(ReferenceMediumParams params = {});

  PlasmaSample sample(const Vec3& pos_eci_km, const SpaceWeather& wx) const override;
  double cutoff_radius_km() const override { return params_.cutoff_radius_km; }

  const ReferenceMediumParams& params() const { return params_; }

  /// Electron density only (plotting/diagnostics).
  double electron_density(const Vec3& pos_eci_km, const SpaceWeather& wx) const;

  /// Dipole field at a point, independent of weather.
  Vec3 dipole_field_tesla(const Vec3& pos_eci_km) const;

 private:
  ReferenceMediumParams params_;
  Vec3 axis_;  // unit dipole axis
};

// f_p = kPlasmaFreqCoeff * sqrt(n_e), f_g = kGyroFreqCoeff * B
inline const double kPlasmaFreqCoeff =
    std::sqrt(constants::kElectronChargeC * constants::kElectronChargeC /
              (4.0 * M_PI * M_PI * constants::kVacuumPermittivity * constants::kElectronMassKg));
inline const double kGyroFreqCoeff =
    constants::kElectronChargeC / (2.0 * M_PI * constants::kElectronMassKg);

/// f_p = sqrt(n_e e^2 / (4 pi^2 eps0 m_e))
double plasma_frequency_hz(double electron_density_m3);

/// f_g = e B / (2 pi m_e)
double gyro_frequency_hz(double b_field_tesla);

/**
 * Phase refractive index for a right-hand circularly polarized wave, expanded
 * to third order in 1/f.  cos(theta) is taken between `ray_dir` and the
 * local field; both dispersion terms vanish in vacuum.
 */
double phase_index(const PlasmaSample& sample, const Vec3& ray_dir, double f_hz);

/// Group refractive index, same expansion order as phase_index.
double group_index(const PlasmaSample& sample, const Vec3& ray_dir, double f_hz);

/**
 * Central finite difference of phase_index over position at fixed ray
 * direction, step max(0.1 km, 1e-4 * altitude).  Units 1/km.
 */
Vec3 index_gradient(const MediumModel& medium, const Vec3& pos_km, const Vec3& ray_dir,
                    double f_hz, const SpaceWeather& wx);

}  // namespace plasmapath::media
