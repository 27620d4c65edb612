#pragma once

#include "plasmapath/raytrace.hpp"

namespace plasmapath::delays {

using frames::Vec3;
using media::MediumModel;
using media::SpaceWeather;
using raytrace::RayPath;
using raytrace::ShootingResult;
using raytrace::StepTable;

class NotConvergedError : public std::runtime_error {
 public:
  NotConvergedError(const std::string& what, double miss_m)
      : std::runtime_error(what), miss_m(miss_m) {}
  double miss_m;
};

/// Five-term group-delay decomposition of one converged link.
struct DelayBreakdown {
  double d_i1_los_m = 0.0;   // first-order delay along the straight chord
  double d_i2_m = 0.0;       // second-order (magnetic) delay
  double d_i3_m = 0.0;       // third-order delay
  double d_i1_bend_m = 0.0;  // first-order delay from the bending TEC excess
  double d_len_m = 0.0;      // geometric excess path of the bent ray
  double d_total_m = 0.0;

  double tec_los_m2 = 0.0;
  double tec_bend_m2 = 0.0;  // may be negative
  double p_m_hz2 = 0.0;      // 40.3 * path TEC
  double q_m_hz3 = 0.0;
  double u_m_hz4 = 0.0;
};

/// Frequency-independent path integrals over the stored samples.
struct PathIntegrals {
  double tec_m2 = 0.0;
  double q_m_hz3 = 0.0;
  double u_m_hz4 = 0.0;
};

/// Trapezoidal quadrature over the integrator's own nodes (ds in meters).
/// Throws GeometryError when the path has fewer than 2 samples.
PathIntegrals path_integrals(const RayPath& path);

/**
 * Electron content along the straight tx-rx chord, integrated with the same
 * altitude-dependent step table as the ray integrator and clipped to the
 * medium cutoff sphere.  Throws OccultationError for an Earth-occulted chord.
 */
double los_tec_m2(const Vec3& tx_pos_km, const Vec3& rx_pos_km, const MediumModel& medium,
                  const SpaceWeather& wx, const StepTable& table = StepTable::defaults());

/// Group delay p/f^2 + q/f^3 + u/f^4 in meters.
double group_delay_m(double p, double q, double u, double f_hz);

/// Phase advance p/f^2 + q/(2 f^3) + u/(3 f^4) in meters.
double phase_advance_m(double p, double q, double u, double f_hz);

/**
 * Full decomposition for a converged shooting result.  d_len is accumulated
 * segment by segment as the excess of each path element over its projection
 * on the chord direction, which keeps it non-negative and exactly zero for a
 * straight ray.  Throws NotConvergedError (carrying the miss distance) for
 * non-converged input.
 */
DelayBreakdown breakdown(const ShootingResult& result, const Vec3& tx_pos_km,
                         const Vec3& rx_pos_km, const MediumModel& medium,
                         const SpaceWeather& wx, const StepTable& table = StepTable::defaults());

}  // namespace plasmapath::delays
