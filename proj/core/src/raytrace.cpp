#include "plasmapath/raytrace.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include "plasmapath/constants.hpp"

namespace plasmapath::raytrace {

namespace {

constexpr double kCutoffSlackKm = 1e-9;
constexpr std::size_t kMaxSteps = 1000000;

struct DerivativeEval {
  Vec3 grad_n;     // 1/km
  double n = 1.0;  // phase index at the point
  PlasmaSample plasma;
};

DerivativeEval eval_medium_derivative(const MediumModel& medium, const Vec3& pos,
                                      const Vec3& dir, double f, const SpaceWeather& wx) {
  DerivativeEval out;
  out.plasma = medium.sample(pos, wx);
  out.n = media::phase_index(out.plasma, dir, f);
  out.grad_n = media::index_gradient(medium, pos, dir, f, wx);
  return out;
}

inline Vec3 dir_slope(const Vec3& dir, const DerivativeEval& d) {
  return (d.grad_n - dir * dir.dot(d.grad_n)) / d.n;
}

inline double cos_theta_of(const PlasmaSample& plasma, const Vec3& dir) {
  const double b = plasma.b_field_tesla.norm();
  return b == 0.0 ? 0.0 : dir.dot(plasma.b_field_tesla) / b;
}

/// Shared step kernel; full integration and replay must use identical
/// arithmetic so replays of the unchanged direction are bit-identical.
inline void advance(Vec3& pos, Vec3& dir, double ds, const Vec3& dir_deriv,
                    const Vec3& pos_curv) {
  pos += ds * dir + (ds * ds) * pos_curv;
  dir = (dir + ds * dir_deriv).normalized();
}

struct StepSlopes {
  Vec3 dir_deriv;  // (l1 + 2 l2 + 2 l3 + l4)/6
  Vec3 pos_curv;   // (l1 + l2 + l3)/6
};

/// Runge-Kutta slopes for one step; the midpoint medium sample is reused for
/// the two middle stages and the endpoint sample ignores the in-step lateral
/// displacement, which is far below the gradient scale of the medium.
StepSlopes rk4_slopes(const MediumModel& medium, const Vec3& pos, const Vec3& dir, double h,
                      double f, const SpaceWeather& wx, const DerivativeEval& at_node) {
  const Vec3 l1 = dir_slope(dir, at_node);
  const DerivativeEval mid = eval_medium_derivative(medium, pos + 0.5 * h * dir, dir, f, wx);
  const Vec3 l2 = dir_slope(dir + 0.5 * h * l1, mid);
  const Vec3 l3 = dir_slope(dir + 0.5 * h * l2, mid);
  const DerivativeEval end = eval_medium_derivative(medium, pos + h * dir, dir, f, wx);
  const Vec3 l4 = dir_slope(dir + h * l3, end);
  StepSlopes s;
  s.dir_deriv = (l1 + 2.0 * l2 + 2.0 * l3 + l4) / 6.0;
  s.pos_curv = (l1 + l2 + l3) / 6.0;
  return s;
}

}  // namespace

StepTable::StepTable(std::vector<Rule> rules) : rules_(std::move(rules)) {
  if (rules_.empty()) throw frames::GeometryError("step table needs at least one rule");
  for (std::size_t i = 1; i < rules_.size(); ++i) {
    if (!(rules_[i].below_altitude_km > rules_[i - 1].below_altitude_km)) {
      throw frames::GeometryError("step table altitude bounds must be strictly increasing");
    }
  }
  rules_.back().below_altitude_km = std::numeric_limits<double>::infinity();
}

StepTable StepTable::defaults() {
  return StepTable({{1000.0, 10.0}, {4000.0, 20.0},
                    {std::numeric_limits<double>::infinity(), 100.0}});
}

double StepTable::step_km(double altitude_km) const {
  for (const Rule& r : rules_) {
    if (altitude_km < r.below_altitude_km) return r.step_km;
  }
  return rules_.back().step_km;
}

StepTable StepTable::halved() const {
  std::vector<Rule> out = rules_;
  for (Rule& r : out) r.step_km *= 0.5;
  return StepTable(std::move(out));
}

RayPath integrate_ray(const Vec3& tx_pos_km, const Vec3& dir0, double f_hz,
                      const MediumModel& medium, const SpaceWeather& wx,
                      const StepTable& table) {
  const double cutoff = medium.cutoff_radius_km();
  RayPath path;
  path.frequency_hz = f_hz;

  Vec3 pos = tx_pos_km;
  Vec3 dir = dir0.normalized();
  double s = 0.0;

  while (true) {
    const double r = pos.norm();
    if (r < constants::kEarthRadiusKm) {
      throw OccultationError("ray intersects the Earth's surface");
    }
    if (r >= cutoff - kCutoffSlackKm && pos.dot(dir) > 0.0) {
      RaySample exit{};
      exit.s_km = s;
      exit.position_km = pos;
      exit.direction = dir;
      exit.plasma = medium.sample(pos, wx);
      exit.cos_theta = cos_theta_of(exit.plasma, dir);
      path.samples.push_back(exit);
      break;
    }
    if (path.samples.size() >= kMaxSteps) {
      throw RunawayError("ray integration exceeded 1e6 steps");
    }

    double h = table.step_km(r - constants::kEarthRadiusKm);
    const DerivativeEval node = eval_medium_derivative(medium, pos, dir, f_hz, wx);
    StepSlopes slopes = rk4_slopes(medium, pos, dir, h, f_hz, wx, node);

    // Shorten the final step so the exit lands on the cutoff sphere.  Out
    // there the medium has decayed to nothing, so the slopes stay valid.
    if (r < cutoff) {
      const Vec3 full = pos + h * dir + (h * h) * slopes.pos_curv;
      if (full.norm() >= cutoff) {
        double lo = 0.0, hi = 1.0;
        for (int i = 0; i < 60; ++i) {
          const double lm = 0.5 * (lo + hi);
          const double hm = lm * h;
          const Vec3 probe = pos + hm * dir + (hm * hm) * slopes.pos_curv;
          (probe.norm() >= cutoff ? hi : lo) = lm;
        }
        h *= hi;
      }
    }

    RaySample node_sample{};
    node_sample.s_km = s;
    node_sample.position_km = pos;
    node_sample.direction = dir;
    node_sample.dir_deriv_per_km = slopes.dir_deriv;
    node_sample.plasma = node.plasma;
    node_sample.cos_theta = cos_theta_of(node.plasma, dir);
    path.samples.push_back(node_sample);
    path.step_sizes_km.push_back(h);
    path.pos_curvatures.push_back(slopes.pos_curv);

    advance(pos, dir, h, slopes.dir_deriv, slopes.pos_curv);
    s += h;
  }

  path.s_exit_km = s;
  path.exit_position_km = pos;
  path.exit_direction = dir;
  return path;
}

VacuumExtension vacuum_extension(const RayPath& path, const Vec3& rx_pos_km) {
  const double delta_s = (rx_pos_km - path.exit_position_km).dot(path.exit_direction);
  if (delta_s < 0.0) {
    throw frames::GeometryError("receiver lies behind the ray exit point");
  }
  VacuumExtension ext;
  ext.s_f_km = path.s_exit_km + delta_s;
  ext.terminal_position_km = path.exit_position_km + delta_s * path.exit_direction;
  ext.miss_km = (ext.terminal_position_km - rx_pos_km).norm();
  return ext;
}

namespace {

struct ReplayTerminal {
  Vec3 exit_position;
  Vec3 exit_direction;
};

ReplayTerminal replay_terminal(const RayPath& path, const Vec3& dir0) {
  Vec3 pos = path.samples.front().position_km;
  Vec3 dir = dir0.normalized();
  for (std::size_t i = 0; i + 1 < path.samples.size(); ++i) {
    advance(pos, dir, path.step_sizes_km[i], path.samples[i].dir_deriv_per_km,
            path.pos_curvatures[i]);
  }
  return {pos, dir};
}

}  // namespace

RayPath replay_ray(const RayPath& path, const Vec3& dir0) {
  RayPath out;
  out.frequency_hz = path.frequency_hz;
  out.step_sizes_km = path.step_sizes_km;
  out.pos_curvatures = path.pos_curvatures;
  out.samples = path.samples;

  Vec3 pos = path.samples.front().position_km;
  Vec3 dir = dir0.normalized();
  for (std::size_t i = 0; i + 1 < path.samples.size(); ++i) {
    out.samples[i].position_km = pos;
    out.samples[i].direction = dir;
    out.samples[i].cos_theta = cos_theta_of(out.samples[i].plasma, dir);
    advance(pos, dir, path.step_sizes_km[i], path.samples[i].dir_deriv_per_km,
            path.pos_curvatures[i]);
  }
  out.samples.back().position_km = pos;
  out.samples.back().direction = dir;
  out.samples.back().cos_theta = cos_theta_of(out.samples.back().plasma, dir);
  out.s_exit_km = path.s_exit_km;
  out.exit_position_km = pos;
  out.exit_direction = dir;
  return out;
}

std::vector<double> chord_displacement_m(const RayPath& path, const Vec3& tx_pos_km,
                                         const Vec3& rx_pos_km) {
  const Vec3 u = (rx_pos_km - tx_pos_km).normalized();
  std::vector<double> out;
  out.reserve(path.samples.size());
  for (const RaySample& s : path.samples) {
    const Vec3 rel = s.position_km - tx_pos_km;
    out.push_back((rel - rel.dot(u) * u).norm() * 1000.0);
  }
  return out;
}

RawPathIntegrals raw_path_integrals(const RayPath& path) {
  RawPathIntegrals out;
  for (std::size_t i = 0; i + 1 < path.samples.size(); ++i) {
    const RaySample& a = path.samples[i];
    const RaySample& b = path.samples[i + 1];
    const double ds_m = (b.s_km - a.s_km) * 1000.0;
    const double ba = a.plasma.b_field_tesla.norm();
    const double bb = b.plasma.b_field_tesla.norm();
    const double na = a.plasma.electron_density_m3;
    const double nb = b.plasma.electron_density_m3;
    out.ne_ds += 0.5 * (na + nb) * ds_m;
    out.ne_b_cos_ds += 0.5 * (na * ba * a.cos_theta + nb * bb * b.cos_theta) * ds_m;
    out.ne2_ds += 0.5 * (na * na + nb * nb) * ds_m;
    out.ne_b2_ds += 0.5 * (na * ba * ba * (1.0 + a.cos_theta * a.cos_theta) +
                           nb * bb * bb * (1.0 + b.cos_theta * b.cos_theta)) *
                    ds_m;
  }
  return out;
}

namespace {

double group_delay_estimate_m(const RayPath& path, double s_f_km, double chord_km) {
  const RawPathIntegrals raw = raw_path_integrals(path);
  const double f = path.frequency_hz;
  const double f2 = f * f;
  const double p = constants::kFirstOrderCoeff * raw.ne_ds;
  const double q = constants::kSecondOrderCoeff * raw.ne_b_cos_ds;
  const double u = constants::kThirdOrderNe2Coeff * raw.ne2_ds +
                   constants::kThirdOrderB2Coeff * raw.ne_b2_ds;
  return p / f2 + q / (f2 * f) + u / (f2 * f2) + (s_f_km - chord_km) * 1000.0;
}

struct Chart {
  Vec3 u, e1, e2;
  Vec3 dir(double a, double b) const { return (u + a * e1 + b * e2).normalized(); }
};

Chart make_chart(const Vec3& los) {
  Chart c;
  c.u = los.normalized();
  const Vec3 helper = std::abs(c.u.x()) < 0.9 ? Vec3::UnitX() : Vec3::UnitY();
  c.e1 = c.u.cross(helper).normalized();
  c.e2 = c.u.cross(c.e1);
  return c;
}

using Point2 = std::array<double, 2>;

/// Nelder-Mead on two angle offsets.  Standard reflection/expansion/
/// contraction/shrink coefficients; stops on simplex diameter or iterations.
template <typename F>
Point2 nelder_mead_2d(const F& f, Point2 start, double edge, double min_diameter,
                      int max_iterations) {
  struct Vertex {
    Point2 x;
    double fx;
  };
  std::array<Vertex, 3> v{Vertex{start, f(start)},
                          Vertex{{start[0] + edge, start[1]}, 0.0},
                          Vertex{{start[0], start[1] + edge}, 0.0}};
  v[1].fx = f(v[1].x);
  v[2].fx = f(v[2].x);

  auto order = [&v]() {
    std::sort(v.begin(), v.end(), [](const Vertex& a, const Vertex& b) { return a.fx < b.fx; });
  };
  auto diameter = [&v]() {
    double d = 0.0;
    for (int i = 0; i < 3; ++i) {
      for (int j = i + 1; j < 3; ++j) {
        d = std::max(d, std::hypot(v[i].x[0] - v[j].x[0], v[i].x[1] - v[j].x[1]));
      }
    }
    return d;
  };

  order();
  for (int it = 0; it < max_iterations && diameter() >= min_diameter; ++it) {
    const Point2 centroid{0.5 * (v[0].x[0] + v[1].x[0]), 0.5 * (v[0].x[1] + v[1].x[1])};
    auto blend = [&centroid, &v](double t) {
      return Point2{centroid[0] + t * (centroid[0] - v[2].x[0]),
                    centroid[1] + t * (centroid[1] - v[2].x[1])};
    };

    const Point2 xr = blend(1.0);
    const double fr = f(xr);
    if (fr < v[0].fx) {
      const Point2 xe = blend(2.0);
      const double fe = f(xe);
      v[2] = fe < fr ? Vertex{xe, fe} : Vertex{xr, fr};
    } else if (fr < v[1].fx) {
      v[2] = {xr, fr};
    } else {
      const bool outside = fr < v[2].fx;
      const Point2 xc = blend(outside ? 0.5 : -0.5);
      const double fc = f(xc);
      if (fc < (outside ? fr : v[2].fx)) {
        v[2] = {xc, fc};
      } else {
        for (int i = 1; i < 3; ++i) {
          v[i].x = {0.5 * (v[0].x[0] + v[i].x[0]), 0.5 * (v[0].x[1] + v[i].x[1])};
          v[i].fx = f(v[i].x);
        }
      }
    }
    order();
  }
  return v[0].x;
}

}  // namespace

ShootingResult solve_initial_direction(const Vec3& tx_pos_km, const Vec3& rx_pos_km, double f_hz,
                                       const MediumModel& medium, const SpaceWeather& wx,
                                       const SolverOptions& opts) {
  if (frames::tangential_altitude_km(tx_pos_km, rx_pos_km) <= 0.0) {
    throw OccultationError("straight chord from transmitter to receiver intersects the Earth");
  }
  const double chord_km = (rx_pos_km - tx_pos_km).norm();
  const Chart chart = make_chart(rx_pos_km - tx_pos_km);

  ShootingResult result;
  Point2 angles{0.0, 0.0};
  double prev_delay_m = std::numeric_limits<double>::quiet_NaN();

  for (int outer = 1; outer <= opts.max_outer; ++outer) {
    const Vec3 dir0 = chart.dir(angles[0], angles[1]);
    RayPath path = integrate_ray(tx_pos_km, dir0, f_hz, medium, wx, opts.step_table);
    const VacuumExtension ext = vacuum_extension(path, rx_pos_km);
    path.s_f_km = ext.s_f_km;

    const double miss_m = ext.miss_km * 1000.0;
    const double delay_m = group_delay_estimate_m(path, ext.s_f_km, chord_km);
    const double delay_change_m = std::abs(delay_m - prev_delay_m);  // NaN on iteration 1
    prev_delay_m = delay_m;

    result.path = std::move(path);
    result.initial_direction = dir0;
    result.miss_m = miss_m;
    result.outer_iterations = outer;
    result.history.push_back({miss_m, delay_change_m});

    if (miss_m <= opts.direct_miss_m) {
      result.converged = true;
      break;
    }
    if (outer >= 2 && delay_change_m < opts.delay_stagnation_m) {
      result.converged = true;
      break;
    }
    const std::size_t n = result.history.size();
    if (n >= 3 && result.history[n - 1].miss_m >= result.history[n - 2].miss_m &&
        result.history[n - 2].miss_m >= result.history[n - 3].miss_m &&
        miss_m > opts.miss_threshold_m) {
      result.converged = false;
      break;
    }
    if (outer == opts.max_outer) {
      result.converged = miss_m <= opts.miss_threshold_m;
      break;
    }

    const RayPath& frozen = result.path;
    auto objective = [&](const Point2& ab) {
      const ReplayTerminal t = replay_terminal(frozen, chart.dir(ab[0], ab[1]));
      const double delta_s = (rx_pos_km - t.exit_position).dot(t.exit_direction);
      const Vec3 terminal =
          delta_s > 0.0 ? Vec3(t.exit_position + delta_s * t.exit_direction) : t.exit_position;
      return (terminal - rx_pos_km).norm();
    };
    angles = nelder_mead_2d(objective, angles, opts.simplex_edge_rad,
                            opts.simplex_min_diameter_rad, opts.max_inner);
  }
  return result;
}

}  // namespace plasmapath::raytrace
