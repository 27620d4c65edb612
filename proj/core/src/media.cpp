#include "plasmapath/media.hpp"

#include <algorithm>
#include <cmath>

namespace plasmapath::media {

SolarIndices solar_indices_from_r12(double r12) {
  SolarIndices out;
  out.f107_sfu = 63.75 + 0.728 * r12 + 0.00089 * r12 * r12;
  out.ig12 = -12.349154 + 1.4683266 * r12 - 0.00267690893 * r12 * r12;
  return out;
}

ReferenceMedium::ReferenceMedium(ReferenceMediumParams params)
    : params_(std::move(params)), axis_(params_.dipole_axis.normalized()) {}

Vec3 ReferenceMedium::dipole_field_tesla(const Vec3& pos_km) const {
  const double r = pos_km.norm();
  const Vec3 r_hat = pos_km / r;
  const double sin_lat = axis_.dot(r_hat);  // magnetic latitude sine
  const double scale = constants::kEarthRadiusKm / r;
  const double b0 = params_.dipole_surface_tesla * scale * scale * scale;
  // Equatorial field is parallel to the axis; polar field points inward at
  // twice the equatorial strength.
  return -b0 * (3.0 * sin_lat * r_hat - axis_);
}

double ReferenceMedium::electron_density(const Vec3& pos_km, const SpaceWeather& wx) const {
  const ReferenceMediumParams& p = params_;
  const double r = pos_km.norm();
  if (r <= 1.0) return 0.0;
  const Vec3 r_hat = pos_km / r;
  const double alt = r - constants::kEarthRadiusKm;

  const double f107 = solar_indices_from_r12(wx.r12).f107_sfu;
  const double activity = 1.0 + p.solar_activity_gain * (f107 - 63.75);

  // Chapman layer; alpha-Chapman peak scales with sqrt(cos chi).
  const Vec3 sun = frames::sun_direction_eci(wx.epoch);
  const double cos_chi = r_hat.dot(sun);
  const double daylight = std::sqrt(std::max(cos_chi, p.night_floor));
  const double z = (alt - p.peak_height_km) / p.scale_height_km;
  const double chapman =
      p.peak_density_m3 * activity * daylight * std::exp(0.5 * (1.0 - z - std::exp(-z)));

  // Dipole L-shell (guard the polar singularity; L -> inf has no plasma).
  const double sin_lat = axis_.dot(r_hat);
  const double cos2_lat = std::max(1.0 - sin_lat * sin_lat, 1e-12);
  const double l_shell = r / (constants::kEarthRadiusKm * cos2_lat);

  const double req = constants::kEarthRadiusKm * l_shell;  // equatorial crossing radius, km
  const double req2 = req * req;
  const double plasmasphere = p.plasmasphere_coeff * activity / (req2 * req2);

  const double l_pp = p.plasmapause_l_base - p.plasmapause_l_per_kp * wx.kp;
  const double pp_cut = 0.5 * (1.0 - std::tanh((l_shell - l_pp) / p.plasmapause_width_l));
  const double join =
      0.5 * (1.0 + std::tanh((alt - p.plasma_join_altitude_km) / p.plasma_join_width_km));
  const double outer = 0.5 * (1.0 - std::tanh((r / p.cutoff_radius_km - p.outer_taper_start_frac) /
                                              p.outer_taper_width_frac));

  const double plasma_term =
      (plasmasphere * pp_cut + p.trough_floor_m3 * (1.0 - pp_cut)) * join * outer;
  return chapman + plasma_term;
}

PlasmaSample ReferenceMedium::sample(const Vec3& pos_km, const SpaceWeather& wx) const {
  PlasmaSample out;
  out.electron_density_m3 = electron_density(pos_km, wx);
  out.b_field_tesla = dipole_field_tesla(pos_km);
  return out;
}

double plasma_frequency_hz(double electron_density_m3) {
  return kPlasmaFreqCoeff * std::sqrt(electron_density_m3);
}

double gyro_frequency_hz(double b_field_tesla) { return kGyroFreqCoeff * b_field_tesla; }

namespace {

inline double cos_theta(const PlasmaSample& s, const Vec3& ray_dir) {
  const double b = s.b_field_tesla.norm();
  if (b == 0.0) return 0.0;
  return ray_dir.dot(s.b_field_tesla) / b;
}

}  // namespace

double phase_index(const PlasmaSample& sample, const Vec3& ray_dir, double f_hz) {
  const double fp2 = kPlasmaFreqCoeff * kPlasmaFreqCoeff * sample.electron_density_m3;
  if (fp2 == 0.0) return 1.0;
  const double fg = gyro_frequency_hz(sample.b_field_tesla.norm());
  const double ct = cos_theta(sample, ray_dir);
  const double f2 = f_hz * f_hz;
  const double f3 = f2 * f_hz;
  const double f4 = f2 * f2;
  return 1.0 - fp2 / (2.0 * f2) - fp2 * fg * ct / (2.0 * f3) -
         (fp2 / (4.0 * f4)) * (0.5 * fp2 + fg * fg * (1.0 + ct * ct));
}

double group_index(const PlasmaSample& sample, const Vec3& ray_dir, double f_hz) {
  const double fp2 = kPlasmaFreqCoeff * kPlasmaFreqCoeff * sample.electron_density_m3;
  if (fp2 == 0.0) return 1.0;
  const double fg = gyro_frequency_hz(sample.b_field_tesla.norm());
  const double ct = cos_theta(sample, ray_dir);
  const double f2 = f_hz * f_hz;
  const double f3 = f2 * f_hz;
  const double f4 = f2 * f2;
  return 1.0 + fp2 / (2.0 * f2) + fp2 * fg * ct / f3 +
         (3.0 * fp2 / (4.0 * f4)) * (0.5 * fp2 + fg * fg * (1.0 + ct * ct));
}

Vec3 index_gradient(const MediumModel& medium, const Vec3& pos_km, const Vec3& ray_dir,
                    double f_hz, const SpaceWeather& wx) {
  const double alt = pos_km.norm() - constants::kEarthRadiusKm;
  const double delta = std::max(0.1, 1e-4 * alt);
  Vec3 grad;
  for (int axis = 0; axis < 3; ++axis) {
    Vec3 dp = Vec3::Zero();
    dp[axis] = delta;
    const double n_plus = phase_index(medium.sample(pos_km + dp, wx), ray_dir, f_hz);
    const double n_minus = phase_index(medium.sample(pos_km - dp, wx), ray_dir, f_hz);
    grad[axis] = (n_plus - n_minus) / (2.0 * delta);
  }
  return grad;
}

}  // namespace plasmapath::media
