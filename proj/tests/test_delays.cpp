#include <doctest.h>

#include <cmath>

#include "plasmapath/delays.hpp"
#include "support/test_media.hpp"

using namespace plasmapath;
using frames::Epoch;
using frames::Vec3;
using media::SpaceWeather;
using raytrace::RayPath;
using raytrace::RaySample;
using raytrace::ShootingResult;

namespace {

SpaceWeather weather() {
  SpaceWeather wx;
  wx.kp = 3.0;
  wx.r12 = 167.24;
  wx.epoch = Epoch(789004800.0);
  return wx;
}

/// Straight synthetic path with given density/field, sampled every 100 km.
RayPath synthetic_path(double length_km, double n_e, const Vec3& b_field) {
  RayPath path;
  path.frequency_hz = constants::kFreqL1Hz;
  const Vec3 dir = Vec3::UnitY();
  const Vec3 origin(8000.0, 0.0, 0.0);
  for (double s = 0.0; s <= length_km + 1e-9; s += 100.0) {
    RaySample sample;
    sample.s_km = s;
    sample.position_km = origin + s * dir;
    sample.direction = dir;
    sample.plasma.electron_density_m3 = n_e;
    sample.plasma.b_field_tesla = b_field;
    sample.cos_theta =
        b_field.norm() == 0.0 ? 0.0 : dir.dot(b_field) / b_field.norm();
    path.samples.push_back(sample);
    if (s < length_km) path.pos_curvatures.push_back(Vec3::Zero());
  }
  path.s_exit_km = length_km;
  path.exit_position_km = path.samples.back().position_km;
  path.exit_direction = dir;
  path.s_f_km = length_km;
  return path;
}

}  // namespace

TEST_SUITE("delays.path_integrals") {
  TEST_CASE("constant integrand over 1000 km") {
    const RayPath path = synthetic_path(1000.0, 1e12, Vec3::Zero());
    const auto pi = delays::path_integrals(path);
    CHECK(pi.tec_m2 == doctest::Approx(1e18).epsilon(1e-12));
    CHECK(pi.q_m_hz3 == 0.0);
    CHECK(pi.u_m_hz4 == doctest::Approx(2437.0 * 1e24 * 1e6).epsilon(1e-12));  // 2.437e33
  }

  TEST_CASE("vacuum path integrates to zero") {
    const auto pi = delays::path_integrals(synthetic_path(1000.0, 0.0, Vec3::Zero()));
    CHECK(pi.tec_m2 == 0.0);
    CHECK(pi.q_m_hz3 == 0.0);
    CHECK(pi.u_m_hz4 == 0.0);
  }

  TEST_CASE("flipping the field flips q and leaves u unchanged") {
    const Vec3 b(0.0, 3e-5, 1e-5);
    const auto plus = delays::path_integrals(synthetic_path(2000.0, 5e11, b));
    const auto minus = delays::path_integrals(synthetic_path(2000.0, 5e11, -b));
    CHECK(plus.q_m_hz3 == doctest::Approx(-minus.q_m_hz3).epsilon(1e-14));
    CHECK(plus.q_m_hz3 != 0.0);
    CHECK(plus.u_m_hz4 == doctest::Approx(minus.u_m_hz4).epsilon(1e-14));

    // constant integrands, so both magnetic terms are closed-form
    const double n_e = 5e11, len_m = 2000.0 * 1000.0;
    const double b_mag = b.norm();
    const double cos_theta = Vec3::UnitY().dot(b) / b_mag;
    CHECK(plus.q_m_hz3 ==
          doctest::Approx(-2.2566e12 * n_e * b_mag * cos_theta * len_m).epsilon(1e-12));
    const double u_expected = 2437.0 * n_e * n_e * len_m +
                              4.74e22 * n_e * b_mag * b_mag *
                                  (1.0 + cos_theta * cos_theta) * len_m;
    CHECK(plus.u_m_hz4 == doctest::Approx(u_expected).epsilon(1e-12));
  }

  TEST_CASE("fewer than two samples is an error") {
    RayPath path;
    path.frequency_hz = constants::kFreqL1Hz;
    CHECK_THROWS_AS(delays::path_integrals(path), frames::GeometryError);
    path.samples.emplace_back();
    CHECK_THROWS_AS(delays::path_integrals(path), frames::GeometryError);
  }
}

TEST_SUITE("delays.los_tec") {
  TEST_CASE("vacuum chord has zero content") {
    const media::VacuumMedium vac;
    CHECK(delays::los_tec_m2(Vec3(26560, 0, 0), Vec3(-380000, 150000, 0), vac, weather()) == 0.0);
  }

  TEST_CASE("radial crossing of a constant shell") {
    // 1e11 e/m^3 between 300 and 800 km altitude, crossed radially:
    // slab thickness 5e5 m gives 5e16 e/m^2
    const auto shell = pptest::shell_medium(1e11, 300.0, 800.0, 4.0 * constants::kEarthRadiusKm);
    const Vec3 tx((constants::kEarthRadiusKm + 100.0), 0.0, 0.0);
    const Vec3 rx(8.0 * constants::kEarthRadiusKm, 1.0, 0.0);  // nudged off radial
    const double tec = delays::los_tec_m2(tx, rx, shell, weather());
    CHECK(tec == doctest::Approx(5e16).epsilon(0.02));
  }

  TEST_CASE("occulted chord is rejected") {
    const media::VacuumMedium vac;
    CHECK_THROWS_AS(delays::los_tec_m2(Vec3(26560, 0, 0), Vec3(-400000, 0, 0), vac, weather()),
                    raytrace::OccultationError);
  }

  TEST_CASE("matches the path integral for an unbent ray") {
    // uniform density bends nothing, so the path TEC equals the chord TEC;
    // the transmitter sits inside the cutoff so both quadratures share nodes
    const auto uniform = pptest::uniform_medium(3e10, 1.2e5);
    const auto geo = pptest::grazing_chord(2500.0, Vec3::UnitY(), Vec3::UnitX());
    const ShootingResult res = raytrace::solve_initial_direction(
        geo.tx_km, geo.rx_km, constants::kFreqL1Hz, uniform, weather());
    REQUIRE(res.converged);
    const auto pi = delays::path_integrals(res.path);
    const double los = delays::los_tec_m2(geo.tx_km, geo.rx_km, uniform, weather());
    CHECK(pi.tec_m2 == doctest::Approx(los).epsilon(1e-6));
  }

  TEST_CASE("halving the table reproduces the content to 1e-4") {
    const media::ReferenceMedium medium;
    const auto geo = pptest::grazing_chord(
        400.0, frames::sun_direction_eci(weather().epoch), Vec3::UnitZ());
    const double coarse = delays::los_tec_m2(geo.tx_km, geo.rx_km, medium, weather());
    const double fine = delays::los_tec_m2(geo.tx_km, geo.rx_km, medium, weather(),
                                           raytrace::StepTable::defaults().halved());
    CHECK(std::abs(coarse - fine) / fine < 1e-4);
  }
}

TEST_SUITE("delays.formulas") {
  TEST_CASE("single-term arithmetic at both frequencies") {
    const double p = 40.3 * 1e18;  // 100 TECU
    const double l1 = delays::group_delay_m(p, 0.0, 0.0, constants::kFreqL1Hz);
    const double l5 = delays::group_delay_m(p, 0.0, 0.0, constants::kFreqL5Hz);
    CHECK(l1 == doctest::Approx(16.2376).epsilon(1e-4));
    CHECK(l5 == doctest::Approx(29.1178).epsilon(1e-4));
    const double ratio = std::pow(constants::kFreqL5Hz / constants::kFreqL1Hz, 2);
    CHECK(l1 / l5 == doctest::Approx(ratio).epsilon(1e-14));
  }

  TEST_CASE("frequency power laws from stored integrals") {
    const double p = 3.2e19, q = -4.1e27, u = 5.5e36;
    const double f1 = constants::kFreqL1Hz, f5 = constants::kFreqL5Hz;
    const double r2 = (f5 / f1) * (f5 / f1);
    CHECK((p / (f1 * f1)) / (p / (f5 * f5)) == doctest::Approx(r2).epsilon(1e-12));
    CHECK((q / std::pow(f1, 3)) / (q / std::pow(f5, 3)) ==
          doctest::Approx(r2 * (f5 / f1)).epsilon(1e-12));
    CHECK((u / std::pow(f1, 4)) / (u / std::pow(f5, 4)) ==
          doctest::Approx(r2 * r2).epsilon(1e-12));
  }

  TEST_CASE("phase advance uses the halved and thirded higher orders") {
    const double p = 1e19, q = -1e27, u = 1e36, f = constants::kFreqL1Hz;
    const double f2 = f * f;
    CHECK(delays::phase_advance_m(p, q, u, f) ==
          doctest::Approx(p / f2 + q / (2 * f2 * f) + u / (3 * f2 * f2)).epsilon(1e-14));
    // group and phase first-order terms agree; higher orders differ
    CHECK(delays::group_delay_m(p, 0, 0, f) == delays::phase_advance_m(p, 0, 0, f));
  }
}

TEST_SUITE("delays.breakdown") {
  TEST_CASE("vacuum link yields an all-zero breakdown") {
    const media::VacuumMedium vac;
    const Vec3 tx(26560.0, 0.0, 0.0);
    const Vec3 rx(-380000.0, 150000.0, 20000.0);
    const ShootingResult res =
        raytrace::solve_initial_direction(tx, rx, constants::kFreqL1Hz, vac, weather());
    const auto d = delays::breakdown(res, tx, rx, vac, weather());
    CHECK(d.d_i1_los_m == 0.0);
    CHECK(d.d_i2_m == 0.0);
    CHECK(d.d_i3_m == 0.0);
    CHECK(d.d_i1_bend_m == 0.0);
    CHECK(d.tec_los_m2 == 0.0);
    CHECK(std::abs(d.d_len_m) < 1e-12);
    CHECK(std::abs(d.d_total_m) < 1e-12);
  }

  TEST_CASE("uniform medium reproduces the chord geometry exactly") {
    const double n_e = 3e10;
    const auto uniform = pptest::uniform_medium(n_e, 4.0 * constants::kEarthRadiusKm);
    const auto geo = pptest::grazing_chord(1500.0, Vec3::UnitZ(), Vec3::UnitX());
    const ShootingResult res = raytrace::solve_initial_direction(
        geo.tx_km, geo.rx_km, constants::kFreqL1Hz, uniform, weather());
    REQUIRE(res.converged);
    const auto d = delays::breakdown(res, geo.tx_km, geo.rx_km, uniform, weather());

    // chord length inside the cutoff sphere, from the sphere intersection
    const Vec3 u = (geo.rx_km - geo.tx_km).normalized();
    const double b = geo.tx_km.dot(u);
    const double rc = uniform.cutoff_radius_km();
    const double disc = b * b - (geo.tx_km.squaredNorm() - rc * rc);
    const double inside_km = 2.0 * std::sqrt(disc) -
                             std::max(0.0, -(-b - std::sqrt(disc)));  // clip at tx if inside
    const double expected_tec = n_e * inside_km * 1000.0;
    CHECK(d.tec_los_m2 == doctest::Approx(expected_tec).epsilon(1e-6));
    CHECK(d.d_i1_los_m ==
          doctest::Approx(40.3 * expected_tec /
                          (constants::kFreqL1Hz * constants::kFreqL1Hz)).epsilon(1e-6));
    CHECK(d.d_total_m == d.d_i1_los_m + d.d_i2_m + d.d_i3_m + d.d_i1_bend_m + d.d_len_m);
  }

  TEST_CASE("non-converged input is refused with the miss attached") {
    ShootingResult res;
    res.converged = false;
    res.miss_m = 4242.0;
    const media::VacuumMedium vac;
    try {
      delays::breakdown(res, Vec3(26560, 0, 0), Vec3(-380000, 150000, 0), vac, weather());
      FAIL("expected NotConvergedError");
    } catch (const delays::NotConvergedError& e) {
      CHECK(e.miss_m == 4242.0);
    }
  }

  TEST_CASE("bending terms behave physically on the reference medium") {
    const media::ReferenceMedium medium;
    const auto geo = pptest::grazing_chord(
        200.0, frames::sun_direction_eci(weather().epoch), Vec3::UnitZ());
    const ShootingResult l1 = raytrace::solve_initial_direction(
        geo.tx_km, geo.rx_km, constants::kFreqL1Hz, medium, weather());
    const ShootingResult l5 = raytrace::solve_initial_direction(
        geo.tx_km, geo.rx_km, constants::kFreqL5Hz, medium, weather());
    REQUIRE(l1.converged);
    REQUIRE(l5.converged);
    const auto d1 = delays::breakdown(l1, geo.tx_km, geo.rx_km, medium, weather());
    const auto d5 = delays::breakdown(l5, geo.tx_km, geo.rx_km, medium, weather());

    CHECK(d1.d_len_m >= 0.0);
    CHECK(d5.d_len_m >= d1.d_len_m);
    CHECK(d1.d_i1_los_m > 1.0);
    CHECK(d1.d_total_m ==
          d1.d_i1_los_m + d1.d_i2_m + d1.d_i3_m + d1.d_i1_bend_m + d1.d_len_m);
    // higher-order terms stay far below the first-order delay
    CHECK(std::abs(d1.d_i2_m) + std::abs(d1.d_i3_m) < 0.01 * d1.d_i1_los_m);
  }

  TEST_CASE("fermat: the converged ray minimizes optical path against replays") {
    const media::ReferenceMedium medium;
    const auto geo = pptest::grazing_chord(
        300.0, frames::sun_direction_eci(weather().epoch), Vec3::UnitZ());
    const ShootingResult res = raytrace::solve_initial_direction(
        geo.tx_km, geo.rx_km, constants::kFreqL1Hz, medium, weather());
    REQUIRE(res.converged);

    // optical length of a candidate path, resampling the medium at the
    // candidate's own positions (replays carry frozen samples)
    auto optical_path_m = [&](const raytrace::RayPath& path) {
      double sum_km = 0.0;
      double n_prev = media::phase_index(
          medium.sample(path.samples.front().position_km, weather()),
          path.samples.front().direction, path.frequency_hz);
      for (std::size_t i = 0; i + 1 < path.samples.size(); ++i) {
        const auto& b = path.samples[i + 1];
        const double nb = media::phase_index(medium.sample(b.position_km, weather()),
                                             b.direction, path.frequency_hz);
        sum_km += 0.5 * (n_prev + nb) * (b.s_km - path.samples[i].s_km);
        n_prev = nb;
      }
      // vacuum leg to the receiver
      sum_km += (geo.rx_km - path.exit_position_km).norm();
      return sum_km * 1000.0;
    };

    const double best = optical_path_m(res.path);
    const Vec3 dir0 = res.initial_direction;
    const Vec3 axis = dir0.cross(Vec3::UnitZ()).normalized();
    for (double angle : {-2e-5, -1e-5, 1e-5, 2e-5}) {
      const Vec3 dir = (Eigen::AngleAxisd(angle, axis) * dir0).normalized();
      const double perturbed = optical_path_m(raytrace::replay_ray(res.path, dir));
      CHECK(best <= perturbed + 1e-3);
    }
  }

  TEST_CASE("quadrature refinement leaves every term in place") {
    media::ReferenceMedium medium;
    const auto geo = pptest::grazing_chord(
        350.0, frames::sun_direction_eci(weather().epoch), Vec3::UnitX());
    raytrace::SolverOptions coarse_opts;
    raytrace::SolverOptions fine_opts;
    fine_opts.step_table = raytrace::StepTable::defaults().halved();

    const ShootingResult coarse = raytrace::solve_initial_direction(
        geo.tx_km, geo.rx_km, constants::kFreqL1Hz, medium, weather(), coarse_opts);
    const ShootingResult fine = raytrace::solve_initial_direction(
        geo.tx_km, geo.rx_km, constants::kFreqL1Hz, medium, weather(), fine_opts);
    REQUIRE(coarse.converged);
    REQUIRE(fine.converged);
    const auto dc = delays::breakdown(coarse, geo.tx_km, geo.rx_km, medium, weather(),
                                      coarse_opts.step_table);
    const auto df = delays::breakdown(fine, geo.tx_km, geo.rx_km, medium, weather(),
                                      fine_opts.step_table);

    auto close = [](double a, double b) {
      return std::abs(a - b) < std::max(1e-3 * std::max(std::abs(a), std::abs(b)), 1e-4);
    };
    CHECK(close(dc.d_i1_los_m, df.d_i1_los_m));
    CHECK(close(dc.d_i2_m, df.d_i2_m));
    CHECK(close(dc.d_i3_m, df.d_i3_m));
    CHECK(close(dc.d_i1_bend_m, df.d_i1_bend_m));
    CHECK(close(dc.d_len_m, df.d_len_m));
  }
}
