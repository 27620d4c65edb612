#include "plasmapath/frames.hpp"

#include <cmath>

namespace plasmapath::frames {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kDegToRad = kPi / 180.0;

double wrap_to_pi(double angle_rad) {
  double a = std::fmod(angle_rad + kPi, 2.0 * kPi);
  if (a < 0.0) a += 2.0 * kPi;
  return a - kPi;
}

}  // namespace

std::string frame_name(Frame f) {
  switch (f) {
    case Frame::EarthCenteredInertial: return "earth-centered-inertial";
    case Frame::MoonCenteredInertial: return "moon-centered-inertial";
    case Frame::SolarMagnetic: return "solar-magnetic";
  }
  return "unknown";
}

Frame frame_from_name(const std::string& name) {
  if (name == "earth-centered-inertial" || name == "eci") return Frame::EarthCenteredInertial;
  if (name == "moon-centered-inertial" || name == "mci") return Frame::MoonCenteredInertial;
  if (name == "solar-magnetic" || name == "sm") return Frame::SolarMagnetic;
  throw GeometryError("unknown frame identifier: '" + name + "'");
}

EpochState kepler_to_state(const KeplerianElements& el, Epoch at, Frame frame) {
  if (!(el.a_km > 0.0) || !(el.e >= 0.0 && el.e < 1.0)) {
    throw GeometryError("elliptical elements required: a > 0 and 0 <= e < 1");
  }
  const double n = std::sqrt(el.gm_km3s2 / (el.a_km * el.a_km * el.a_km));
  const double m = wrap_to_pi(el.m0_deg * kDegToRad + n * (at - el.epoch));

  // Newton on Kepler's equation; start at pi for highly eccentric orbits
  // where E = M is a poor guess.
  double E = (el.e > 0.8) ? kPi : m + el.e * std::sin(m);
  double f = E - el.e * std::sin(E) - m;
  int it = 0;
  while (std::abs(f) >= 1e-12) {
    if (++it > 50) {
      throw KeplerError("Kepler solver did not converge after 50 iterations", std::abs(f));
    }
    E -= f / (1.0 - el.e * std::cos(E));
    f = E - el.e * std::sin(E) - m;
  }

  const double cosE = std::cos(E);
  const double sinE = std::sin(E);
  const double r = el.a_km * (1.0 - el.e * cosE);
  const double b_over_a = std::sqrt(1.0 - el.e * el.e);

  // Perifocal position/velocity
  const Vec3 r_pqw(el.a_km * (cosE - el.e), el.a_km * b_over_a * sinE, 0.0);
  const double v_scale = std::sqrt(el.gm_km3s2 * el.a_km) / r;
  const Vec3 v_pqw(-v_scale * sinE, v_scale * b_over_a * cosE, 0.0);

  const Eigen::AngleAxisd rz_raan(el.raan_deg * kDegToRad, Vec3::UnitZ());
  const Eigen::AngleAxisd rx_inc(el.inc_deg * kDegToRad, Vec3::UnitX());
  const Eigen::AngleAxisd rz_argp(el.argp_deg * kDegToRad, Vec3::UnitZ());
  const Mat3 pqw_to_inertial = (rz_raan * rx_inc * rz_argp).toRotationMatrix();

  EpochState out;
  out.epoch = at;
  out.frame = frame;
  out.position_km = pqw_to_inertial * r_pqw;
  out.velocity_kms = pqw_to_inertial * v_pqw;
  return out;
}

double orbital_period_s(const KeplerianElements& el) {
  return 2.0 * kPi * std::sqrt(el.a_km * el.a_km * el.a_km / el.gm_km3s2);
}

double tangential_altitude_km(const Vec3& tx_km, const Vec3& rx_km) {
  const Vec3 d = rx_km - tx_km;
  const double len2 = d.squaredNorm();
  if (len2 == 0.0) {
    throw GeometryError("tangential altitude of a zero-length segment is undefined");
  }
  const double t = -tx_km.dot(d) / len2;
  double dist;
  if (t >= 0.0 && t <= 1.0) {
    dist = (tx_km + t * d).norm();
  } else {
    dist = std::min(tx_km.norm(), rx_km.norm());
  }
  return dist - constants::kEarthRadiusKm;
}

Vec3 sun_direction_eci(Epoch t) {
  // Astronomical Almanac low-precision Sun, ~0.01 deg over +-1 century.
  const double n = t.sec / 86400.0;  // days since the reference epoch
  const double mean_lon = (280.460 + 0.9856474 * n) * kDegToRad;
  const double mean_anom = (357.528 + 0.9856003 * n) * kDegToRad;
  const double ecl_lon =
      mean_lon + (1.915 * std::sin(mean_anom) + 0.020 * std::sin(2.0 * mean_anom)) * kDegToRad;
  const double obliquity = (23.439 - 4.0e-7 * n) * kDegToRad;
  return Vec3(std::cos(ecl_lon),
              std::cos(obliquity) * std::sin(ecl_lon),
              std::sin(obliquity) * std::sin(ecl_lon));
}

SmFrameModel::SmFrameModel(const Vec3& dipole_axis_eci) : axis_(dipole_axis_eci.normalized()) {}

Vec3 SmFrameModel::default_dipole_axis(double tilt_deg, double lon_deg) {
  const double tilt = tilt_deg * kDegToRad;
  const double lon = lon_deg * kDegToRad;
  return Vec3(std::sin(tilt) * std::cos(lon), std::sin(tilt) * std::sin(lon), std::cos(tilt));
}

Mat3 SmFrameModel::rotation_eci_to_sm(Epoch t) const {
  const Vec3 sun = sun_direction_eci(t);
  Vec3 x = sun - sun.dot(axis_) * axis_;
  const double xn = x.norm();
  if (xn < 1e-9) {
    throw GeometryError("SM frame is degenerate: Sun direction is parallel to the dipole axis");
  }
  x /= xn;
  const Vec3 y = axis_.cross(x);
  Mat3 r;
  r.row(0) = x;
  r.row(1) = y;
  r.row(2) = axis_;
  return r;
}

SmPosition SmFrameModel::to_sm(const EpochState& pos) const {
  if (pos.frame != Frame::EarthCenteredInertial) {
    throw GeometryError("SM transform expects an earth-centered-inertial state");
  }
  const Vec3 sm = to_sm(pos.position_km, pos.epoch);
  return SmPosition{sm.x(), sm.y(), sm.z()};
}

Vec3 SmFrameModel::to_sm(const Vec3& pos_eci_km, Epoch t) const {
  return rotation_eci_to_sm(t) * pos_eci_km;
}

Vec3 SmFrameModel::from_sm(const Vec3& pos_sm_km, Epoch t) const {
  return rotation_eci_to_sm(t).transpose() * pos_sm_km;
}

}  // namespace plasmapath::frames
