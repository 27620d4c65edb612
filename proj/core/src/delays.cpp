#include "plasmapath/delays.hpp"

#include <algorithm>
#include <cmath>

#include "plasmapath/constants.hpp"

namespace plasmapath::delays {

PathIntegrals path_integrals(const RayPath& path) {
  if (path.samples.size() < 2) {
    throw frames::GeometryError("path integrals need at least 2 samples");
  }
  const raytrace::RawPathIntegrals raw = raytrace::raw_path_integrals(path);
  PathIntegrals out;
  out.tec_m2 = raw.ne_ds;
  out.q_m_hz3 = constants::kSecondOrderCoeff * raw.ne_b_cos_ds;
  out.u_m_hz4 = constants::kThirdOrderNe2Coeff * raw.ne2_ds +
                constants::kThirdOrderB2Coeff * raw.ne_b2_ds;
  return out;
}

double los_tec_m2(const Vec3& tx_pos_km, const Vec3& rx_pos_km, const MediumModel& medium,
                  const SpaceWeather& wx, const StepTable& table) {
  if (frames::tangential_altitude_km(tx_pos_km, rx_pos_km) <= 0.0) {
    throw raytrace::OccultationError("line-of-sight chord intersects the Earth");
  }
  const Vec3 d = rx_pos_km - tx_pos_km;
  const double chord = d.norm();
  const Vec3 u = d / chord;

  // Only the portion of the chord inside the cutoff sphere sees the medium.
  const double rc = medium.cutoff_radius_km();
  const double b = tx_pos_km.dot(u);
  const double c = tx_pos_km.squaredNorm() - rc * rc;
  const double disc = b * b - c;
  if (disc <= 0.0) return 0.0;
  const double t0 = std::max(0.0, -b - std::sqrt(disc));
  const double t1 = std::min(chord, -b + std::sqrt(disc));
  if (t1 <= t0) return 0.0;

  double tec = 0.0;
  double t = t0;
  Vec3 pos = tx_pos_km + t0 * u;
  double ne_prev = medium.sample(pos, wx).electron_density_m3;
  while (t < t1) {
    const double alt = pos.norm() - constants::kEarthRadiusKm;
    const double t_next = std::min(t + table.step_km(alt), t1);
    pos = tx_pos_km + t_next * u;
    const double ne_next = medium.sample(pos, wx).electron_density_m3;
    tec += 0.5 * (ne_prev + ne_next) * (t_next - t) * 1000.0;
    ne_prev = ne_next;
    t = t_next;
  }
  return tec;
}

double group_delay_m(double p, double q, double u, double f_hz) {
  const double f2 = f_hz * f_hz;
  return p / f2 + q / (f2 * f_hz) + u / (f2 * f2);
}

double phase_advance_m(double p, double q, double u, double f_hz) {
  const double f2 = f_hz * f_hz;
  return p / f2 + q / (2.0 * f2 * f_hz) + u / (3.0 * f2 * f2);
}

namespace {

/// |segment| - segment . u, evaluated through the perpendicular component so
/// collinear segments contribute exactly zero.
double segment_excess_km(const Vec3& seg, const Vec3& u) {
  const double along = seg.dot(u);
  const double norm = seg.norm();
  const double den = norm + along;
  if (den <= 0.0) return norm - along;
  return (seg - along * u).squaredNorm() / den;
}

}  // namespace

DelayBreakdown breakdown(const ShootingResult& result, const Vec3& tx_pos_km,
                         const Vec3& rx_pos_km, const MediumModel& medium,
                         const SpaceWeather& wx, const StepTable& table) {
  if (!result.converged) {
    throw NotConvergedError("delay breakdown requires a converged shooting result", result.miss_m);
  }
  const RayPath& path = result.path;
  const double f = path.frequency_hz;
  const double f2 = f * f;

  const raytrace::RawPathIntegrals raw = raytrace::raw_path_integrals(path);
  const double tec_path = raw.ne_ds;
  const double q = constants::kSecondOrderCoeff * raw.ne_b_cos_ds;
  const double u_term = constants::kThirdOrderNe2Coeff * raw.ne2_ds +
                        constants::kThirdOrderB2Coeff * raw.ne_b2_ds;

  DelayBreakdown out;
  out.tec_los_m2 = los_tec_m2(tx_pos_km, rx_pos_km, medium, wx, table);
  out.tec_bend_m2 = tec_path - out.tec_los_m2;
  out.p_m_hz2 = constants::kFirstOrderCoeff * tec_path;
  out.q_m_hz3 = q;
  out.u_m_hz4 = u_term;

  out.d_i1_los_m = constants::kFirstOrderCoeff * out.tec_los_m2 / f2;
  out.d_i1_bend_m = constants::kFirstOrderCoeff * out.tec_bend_m2 / f2;
  out.d_i2_m = q / (f2 * f);
  out.d_i3_m = u_term / (f2 * f2);

  const Vec3 u_chord = (rx_pos_km - tx_pos_km).normalized();
  double excess_km = 0.0;
  for (std::size_t i = 0; i + 1 < path.samples.size(); ++i) {
    excess_km += segment_excess_km(
        path.samples[i + 1].position_km - path.samples[i].position_km, u_chord);
  }
  const Vec3 terminal =
      path.exit_position_km + (path.s_f_km - path.s_exit_km) * path.exit_direction;
  excess_km += segment_excess_km(terminal - path.exit_position_km, u_chord);
  out.d_len_m = excess_km * 1000.0;

  out.d_total_m = out.d_i1_los_m + out.d_i2_m + out.d_i3_m + out.d_i1_bend_m + out.d_len_m;
  return out;
}

}  // namespace plasmapath::delays
