#include <doctest.h>

#include <cmath>
#include <sstream>

#include "plasmapath/delays.hpp"
#include "plasmapath/link.hpp"
#include "plasmapath/rng.hpp"
#include "support/test_media.hpp"

using namespace plasmapath;
using frames::EpochState;
using frames::Vec3;
using link::AntennaPattern;
using link::DllParams;

namespace {

EpochState state_at(const Vec3& pos) {
  EpochState s;
  s.position_km = pos;
  return s;
}

AntennaPattern lunar_rx() { return AntennaPattern::parametric("lunar-rx", 14.0, 6.0, -25.0); }
AntennaPattern gnss_tx() { return AntennaPattern::parametric("gnss-tx", 13.0, 24.0, -7.0); }

}  // namespace

TEST_SUITE("link.antenna") {
  TEST_CASE("default receiver pattern hits the published numbers") {
    const AntennaPattern rx = lunar_rx();
    CHECK(rx.gain_dbi(0.0) == 14.0);
    CHECK(rx.gain_dbi(3.0) == 11.0);  // -3 dB at half the beamwidth
  }

  TEST_CASE("lookup clamps beyond the last node") {
    const AntennaPattern p("test", {{0.0, 10.0}, {10.0, 0.0}, {60.0, -15.0}});
    CHECK(p.gain_dbi(60.0) == -15.0);
    CHECK(p.gain_dbi(179.0) == -15.0);
    CHECK(p.gain_dbi(5.0) == doctest::Approx(5.0).epsilon(1e-14));  // linear interpolation
  }

  TEST_CASE("empty or malformed tables are rejected") {
    CHECK_THROWS_AS(AntennaPattern("bad", {}), frames::GeometryError);
    CHECK_THROWS_AS(AntennaPattern("bad", {{1.0, 0.0}}), frames::GeometryError);
    CHECK_THROWS_AS(AntennaPattern("bad", {{0.0, 1.0}, {0.0, 2.0}}), frames::GeometryError);
  }

  TEST_CASE("csv round trip") {
    const AntennaPattern p = gnss_tx();
    std::ostringstream out;
    p.to_csv(out);
    const std::string text = out.str();
    CHECK(text.rfind("angle_deg,gain_dbi\n", 0) == 0);
    CHECK(text.find("0,13") != std::string::npos);
  }
}

TEST_SUITE("link.cn0") {
  TEST_CASE("doubling the distance costs 6.02 dB") {
    const AntennaPattern tx_pat("iso", {{0.0, 0.0}, {180.0, 0.0}});
    const AntennaPattern rx_pat("iso", {{0.0, 0.0}, {180.0, 0.0}});
    link::SystemParams sys;
    // ranges 226560 km and 453120 km along the same boresight-aligned line
    const auto near = link::compute_cn0(state_at(Vec3(26560, 0, 0)), state_at(Vec3(-200000, 0, 0)),
                                        tx_pat, rx_pat, 27.0, constants::kFreqL1Hz, sys);
    const auto far = link::compute_cn0(state_at(Vec3(26560, 0, 0)),
                                       state_at(Vec3(-426560.0, 0, 0)), tx_pat, rx_pat,
                                       27.0, constants::kFreqL1Hz, sys);
    CHECK(near.c_n0_dbhz - far.c_n0_dbhz ==
          doctest::Approx(20.0 * std::log10(2.0)).epsilon(1e-9));
  }

  TEST_CASE("an untrackable link is flagged, not an error") {
    const AntennaPattern tx_pat = gnss_tx();
    const AntennaPattern rx_pat = lunar_rx();
    link::SystemParams sys;
    // transmitter on the moon side: the receiver sits in its backlobe
    const auto budget = link::compute_cn0(state_at(Vec3(26560, 0, 0)),
                                          state_at(Vec3(400000, 30000, 0)), tx_pat, rx_pat, 27.0,
                                          constants::kFreqL1Hz, sys);
    CHECK(budget.c_n0_dbhz < sys.tracking_threshold_dbhz);
    CHECK_FALSE(budget.trackable);
  }
}

TEST_SUITE("link.dll") {
  TEST_CASE("hand-evaluated narrow-correlator sigma at 30 dB-Hz") {
    const DllParams p = DllParams::l1();
    CHECK(link::dll_case(p) == 2);

    // oracle evaluated from the narrow-correlator variance expression
    const double rho = 1000.0;  // 30 dB-Hz
    const double inv_tb = 1.0 / (p.t_chip_s * p.b_fe_hz);
    const double var_chips2 =
        p.b_dll_hz / (2.0 * rho) * inv_tb * (1.0 + 1.0 / (p.t_coh_s * rho));
    const double sigma_oracle_m =
        std::sqrt(var_chips2) * constants::kSpeedOfLightMS * p.t_chip_s;

    const double sigma = link::dll_sigma_m(30.0, p);
    CHECK(sigma == doctest::Approx(sigma_oracle_m).epsilon(1e-12));
    CHECK(sigma == doctest::Approx(1.50).epsilon(0.01 / 1.50));
  }

  TEST_CASE("l5 noise is far below l1 noise at the same c/n0") {
    const double l1 = link::dll_sigma_m(25.0, DllParams::l1());
    const double l5 = link::dll_sigma_m(25.0, DllParams::l5());
    CHECK(l5 / l1 == doctest::Approx(0.1).epsilon(0.5));  // about one order of magnitude
  }

  TEST_CASE("exactly one case fires for every spacing") {
    const DllParams base = DllParams::l1();
    const double inv_tb = 1.0 / (base.t_chip_s * base.b_fe_hz);
    for (double d : {0.05, 0.2, inv_tb, 0.6, 1.0, M_PI * inv_tb, 1.6, 2.0}) {
      DllParams p = base;
      p.spacing_chips = d;
      const int which = link::dll_case(p);
      CHECK(which >= 1);
      CHECK(which <= 3);
      const bool wide = d >= M_PI * inv_tb;
      const bool narrow = d <= inv_tb;
      if (wide) CHECK(which == 1);
      if (narrow) CHECK(which == 2);
      if (!wide && !narrow) CHECK(which == 3);
    }
  }

  TEST_CASE("variance is continuous across the narrow boundary") {
    DllParams p = DllParams::l1();
    p.spacing_chips = 1.0 / (p.t_chip_s * p.b_fe_hz);
    const double rho = std::pow(10.0, 3.0);
    const double narrow = link::dll_variance_chips2(rho, p, 2);
    const double transition = link::dll_variance_chips2(rho, p, 3);
    CHECK(std::abs(narrow - transition) / narrow < 1e-9);
  }

  TEST_CASE("sigma decreases strictly with c/n0") {
    const DllParams p = DllParams::l1();
    double prev = link::dll_sigma_m(18.0, p);
    for (double cn0 = 18.5; cn0 <= 45.0 + 1e-9; cn0 += 0.5) {
      const double cur = link::dll_sigma_m(cn0, p);
      CHECK(cur < prev);
      prev = cur;
    }
  }
}

TEST_SUITE("link.uere") {
  TEST_CASE("degenerate noise returns the absolute bias") {
    const auto stats = link::total_uere(-3.5, 0.0, 100, 42);
    CHECK(stats.mean_m == 3.5);
    CHECK(stats.p95_m == 3.5);
    CHECK(stats.p99_m == 3.5);
  }

  TEST_CASE("zero bias approaches the folded-normal mean") {
    double sum = 0.0;
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
      sum += link::total_uere(0.0, 1.0, 100, seed).mean_m;
    }
    const double mean = sum / 50.0;
    CHECK(mean > 0.70);
    CHECK(mean < 0.90);  // sqrt(2/pi) = 0.7979
  }

  TEST_CASE("large bias dominates the noise") {
    const auto stats = link::total_uere(100.0, 1.0, 100, 7);
    CHECK(std::abs(stats.mean_m - 100.0) < 0.5);  // ~3 sigma / sqrt(n)
    CHECK(stats.p99_m > stats.p95_m - 1e-12);
    CHECK(stats.p95_m >= stats.mean_m - 1.0);
  }

  TEST_CASE("same stream seed reproduces the draw") {
    const auto a = link::total_uere(2.0, 0.7, 100, 12345);
    const auto b = link::total_uere(2.0, 0.7, 100, 12345);
    CHECK(a.mean_m == b.mean_m);
    CHECK(a.p95_m == b.p95_m);
    CHECK(a.p99_m == b.p99_m);
    const auto c = link::total_uere(2.0, 0.7, 100, 12346);
    CHECK(a.mean_m != c.mean_m);
  }

  TEST_CASE("bias-variance crossover between frequencies") {
    // low tangential altitude: delay bias dominates and the higher carrier
    // wins; sidelobe altitudes: receiver noise dominates and the wider-band
    // code wins
    const media::ReferenceMedium medium;
    media::SpaceWeather wx;
    wx.kp = 3.0;
    wx.r12 = 167.24;
    wx.epoch = frames::Epoch(789004800.0);
    const AntennaPattern tx_pat = gnss_tx();
    const AntennaPattern rx_pat = lunar_rx();
    link::SystemParams sys;

    auto uere_mean = [&](double altitude_km, const std::string& freq_label, double f_hz,
                         const DllParams& dll) {
      const auto geo = pptest::grazing_chord(
          altitude_km, frames::sun_direction_eci(wx.epoch), Vec3::UnitZ());
      frames::EpochState tx_state, rx_state;
      tx_state.position_km = geo.tx_km;
      rx_state.position_km = geo.rx_km;
      const auto budget =
          link::compute_cn0(tx_state, rx_state, tx_pat, rx_pat, 27.0, f_hz, sys);
      REQUIRE(budget.trackable);
      const auto solved =
          plasmapath::raytrace::solve_initial_direction(geo.tx_km, geo.rx_km, f_hz, medium, wx);
      REQUIRE(solved.converged);
      const auto d = plasmapath::delays::breakdown(solved, geo.tx_km, geo.rx_km, medium, wx);
      const double sigma = link::dll_sigma_m(budget.c_n0_dbhz, dll);
      const auto seed = rng::link_stream_seed(1, 0, "TX", "RX", freq_label);
      return link::total_uere(d.d_total_m, sigma, 100, seed).mean_m;
    };

    const double low_l1 = uere_mean(300.0, "L1", constants::kFreqL1Hz, DllParams::l1());
    const double low_l5 = uere_mean(300.0, "L5", constants::kFreqL5Hz, DllParams::l5());
    CHECK(low_l1 < low_l5);

    const double high_l1 = uere_mean(12000.0, "L1", constants::kFreqL1Hz, DllParams::l1());
    const double high_l5 = uere_mean(12000.0, "L5", constants::kFreqL5Hz, DllParams::l5());
    CHECK(high_l5 < high_l1);
  }

  TEST_CASE("stream derivation separates links") {
    const auto s1 = rng::link_stream_seed(42, 0, "GPS-01", "LCRNS-1", "L1");
    const auto s2 = rng::link_stream_seed(42, 0, "GPS-01", "LCRNS-1", "L5");
    const auto s3 = rng::link_stream_seed(42, 1, "GPS-01", "LCRNS-1", "L1");
    const auto s4 = rng::link_stream_seed(43, 0, "GPS-01", "LCRNS-1", "L1");
    CHECK(s1 != s2);
    CHECK(s1 != s3);
    CHECK(s1 != s4);
    CHECK(s1 == rng::link_stream_seed(42, 0, "GPS-01", "LCRNS-1", "L1"));
  }
}
