#pragma once

#include <vector>

#include "plasmapath/media.hpp"

namespace plasmapath::raytrace {

using frames::Vec3;
using media::MediumModel;
using media::PlasmaSample;
using media::SpaceWeather;

class OccultationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class RunawayError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Altitude-dependent arc-length step sizes for the eikonal integrator.
class StepTable {
 public:
  struct Rule {
    double below_altitude_km;  // rule applies while altitude < this bound
    double step_km;
  };

  explicit StepTable(std::vector<Rule> rules);
  /// 10 km below 1000 km altitude, 20 km below 4000 km, 100 km otherwise.
  static StepTable defaults();

  double step_km(double altitude_km) const;
  StepTable halved() const;
  const std::vector<Rule>& rules() const { return rules_; }

 private:
  std::vector<Rule> rules_;  // ascending altitude bounds, last bound is +inf
};

/// One integrator node along a ray.
struct RaySample {
  double s_km = 0.0;
  Vec3 position_km = Vec3::Zero();
  Vec3 direction = Vec3::Zero();      // unit propagation direction
  Vec3 dir_deriv_per_km = Vec3::Zero();  // effective d(dir)/ds over the step starting here
  PlasmaSample plasma;                // medium sample at the node
  double cos_theta = 0.0;             // between direction and local field
};

/**
 * Discretized bent ray from the transmitter to the cutoff sphere, plus the
 * vacuum extension bookkeeping filled in by the solver.
 *
 * `pos_curvatures` holds the per-step quadratic position coefficients that,
 * together with each sample's dir_deriv, reproduce the integration exactly;
 * replay_ray uses both so a replay with the original initial direction is
 * bit-identical to the stored path.
 */
struct RayPath {
  std::vector<RaySample> samples;
  std::vector<double> step_sizes_km;  // size samples.size()-1
  std::vector<Vec3> pos_curvatures;   // size samples.size()-1, units 1/km

  double s_exit_km = 0.0;
  Vec3 exit_position_km = Vec3::Zero();
  Vec3 exit_direction = Vec3::Zero();
  double s_f_km = 0.0;  // arc length to the closest approach of the receiver
  double frequency_hz = 0.0;
};

/**
 * Integrate dr/ds = s_hat, d(s_hat)/ds = (grad n - s_hat (s_hat . grad n))/n
 * with fourth-order Runge-Kutta slopes and the altitude step table, from
 * `tx_pos_km` until the ray leaves the medium cutoff sphere moving outward.
 * The final step is shortened to land on the cutoff sphere.  The direction is
 * renormalized to unit length after every step.
 *
 * Throws OccultationError if the ray reaches the Earth's surface and
 * RunawayError past 10^6 steps.
 */
RayPath integrate_ray(const Vec3& tx_pos_km, const Vec3& dir0, double f_hz,
                      const MediumModel& medium, const SpaceWeather& wx,
                      const StepTable& table = StepTable::defaults());

struct VacuumExtension {
  double s_f_km = 0.0;
  Vec3 terminal_position_km = Vec3::Zero();
  double miss_km = 0.0;
};

/**
 * Extend the exit ray straight to its closest approach to `rx_pos_km`:
 * delta_s = (rx - exit) . exit_dir.  Throws GeometryError when the receiver
 * lies behind the exit point (delta_s < 0).
 */
VacuumExtension vacuum_extension(const RayPath& path, const Vec3& rx_pos_km);

/**
 * Re-run a stored path from a perturbed initial direction reusing the stored
 * per-step derivatives; the step schedule is identical and no medium
 * evaluations are performed.  With the original initial direction the result
 * is bit-identical to `path`.
 */
RayPath replay_ray(const RayPath& path, const Vec3& dir0);

/// Perpendicular distance (m) from every sample to the tx-rx chord.
std::vector<double> chord_displacement_m(const RayPath& path, const Vec3& tx_pos_km,
                                         const Vec3& rx_pos_km);

/// Trapezoidal sums over the stored samples, path element in meters.
struct RawPathIntegrals {
  double ne_ds = 0.0;        // int n_e ds
  double ne_b_cos_ds = 0.0;  // int n_e B cos(theta) ds
  double ne2_ds = 0.0;       // int n_e^2 ds
  double ne_b2_ds = 0.0;     // int n_e B^2 (1 + cos^2 theta) ds
};
RawPathIntegrals raw_path_integrals(const RayPath& path);

struct SolverOptions {
  double miss_threshold_m = 100.0;     // acceptable terminal position error
  double delay_stagnation_m = 1e-3;    // stop when the total delay settles
  double direct_miss_m = 1e-3;         // immediate convergence for straight shots
  int max_outer = 10;
  // Nelder-Mead over (azimuth, elevation) offsets about the line of sight
  double simplex_edge_rad = 5e-4;
  double simplex_min_diameter_rad = 1e-9;
  int max_inner = 200;
  StepTable step_table = StepTable::defaults();
};

struct IterationRecord {
  double miss_m = 0.0;
  double delay_change_m = 0.0;  // NaN on the first outer iteration
};

struct ShootingResult {
  RayPath path;            // last integrated path, s_f filled in
  Vec3 initial_direction;  // solved launch direction
  double miss_m = 0.0;
  int outer_iterations = 0;
  bool converged = false;
  std::vector<IterationRecord> history;
};

/**
 * Two-point shooting solve for the launch direction connecting tx to rx.
 *
 * Each outer iteration integrates the full ray, extends it through vacuum to
 * the receiver, then corrects the launch direction with a 2-D Nelder-Mead
 * minimization of the replayed miss distance.  Outer iterations stop as soon
 * as the miss is below `direct_miss_m`, or the total group delay changes by
 * less than `delay_stagnation_m` between iterations, or `max_outer` is
 * reached (converged then means the miss cleared `miss_threshold_m`).  Three
 * consecutive non-improving iterations above the threshold abort with
 * converged = false.
 */
ShootingResult solve_initial_direction(const Vec3& tx_pos_km, const Vec3& rx_pos_km, double f_hz,
                                       const MediumModel& medium, const SpaceWeather& wx,
                                       const SolverOptions& opts = {});

}  // namespace plasmapath::raytrace
