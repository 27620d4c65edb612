#include "plasmapath/ephemeris.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace plasmapath::frames {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string field;
  while (std::getline(ss, field, ',')) {
    // trim surrounding whitespace
    const auto a = field.find_first_not_of(" \t\r");
    const auto b = field.find_last_not_of(" \t\r");
    out.push_back(a == std::string::npos ? "" : field.substr(a, b - a + 1));
  }
  return out;
}

}  // namespace

EpochState KeplerianEphemeris::state_at(Epoch t) const {
  const auto [lo, hi] = span();
  if (t < lo || t > hi) {
    throw CoverageError("keplerian ephemeris queried outside +-10 year validity window");
  }
  return kepler_to_state(el_, t, frame_);
}

std::pair<Epoch, Epoch> KeplerianEphemeris::span() const {
  const double ten_years_s = 10.0 * 365.25 * 86400.0;
  return {el_.epoch - ten_years_s, el_.epoch + ten_years_s};
}

SampledEphemeris::SampledEphemeris(std::vector<EpochState> samples)
    : samples_(std::move(samples)) {
  if (samples_.size() < 4) {
    throw CoverageError("sampled ephemeris needs at least 4 rows for Lagrange-4 interpolation");
  }
  for (std::size_t i = 1; i < samples_.size(); ++i) {
    if (!(samples_[i].epoch > samples_[i - 1].epoch)) {
      throw CoverageError("sampled ephemeris epochs must be strictly increasing");
    }
    if (samples_[i].frame != samples_[0].frame) {
      throw CoverageError("sampled ephemeris mixes reference frames");
    }
  }
}

SampledEphemeris SampledEphemeris::from_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw CoverageError("cannot open ephemeris file: " + path);

  std::string line;
  if (!std::getline(in, line)) throw CoverageError("empty ephemeris file: " + path);
  const auto header = split_csv_line(line);
  const std::vector<std::string> expected = {"epoch_s", "frame",  "x_km",   "y_km",
                                             "z_km",    "vx_kms", "vy_kms", "vz_kms"};
  if (header != std::vector<std::string>(expected.begin(), expected.end())) {
    throw CoverageError("ephemeris CSV header mismatch in " + path +
                        " (expected epoch_s,frame,x_km,y_km,z_km,vx_kms,vy_kms,vz_kms)");
  }

  std::vector<EpochState> rows;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto f = split_csv_line(line);
    if (f.size() != 8) {
      throw CoverageError("ephemeris CSV row " + std::to_string(lineno) + " has " +
                          std::to_string(f.size()) + " fields, expected 8");
    }
    EpochState s;
    s.epoch = Epoch(std::stod(f[0]));
    s.frame = frame_from_name(f[1]);
    s.position_km = Vec3(std::stod(f[2]), std::stod(f[3]), std::stod(f[4]));
    s.velocity_kms = Vec3(std::stod(f[5]), std::stod(f[6]), std::stod(f[7]));
    rows.push_back(s);
  }
  return SampledEphemeris(std::move(rows));
}

EpochState SampledEphemeris::state_at(Epoch t) const {
  const Epoch first = samples_.front().epoch;
  const Epoch last = samples_.back().epoch;
  if (t < first || t > last) {
    std::ostringstream msg;
    msg << "ephemeris gap: t=" << t.sec << " s outside coverage [" << first.sec << ", "
        << last.sec << "] s";
    throw CoverageError(msg.str());
  }

  // Bracketing index, then a 4-node stencil clamped to the table ends.
  auto it = std::upper_bound(samples_.begin(), samples_.end(), t,
                             [](Epoch q, const EpochState& s) { return q < s.epoch; });
  std::size_t hi = static_cast<std::size_t>(it - samples_.begin());
  std::size_t start = (hi >= 2) ? hi - 2 : 0;
  start = std::min(start, samples_.size() - 4);

  EpochState out;
  out.epoch = t;
  out.frame = samples_[0].frame;
  out.position_km.setZero();
  out.velocity_kms.setZero();
  for (std::size_t j = start; j < start + 4; ++j) {
    double w = 1.0;
    for (std::size_t k = start; k < start + 4; ++k) {
      if (k == j) continue;
      w *= (t - samples_[k].epoch) / (samples_[j].epoch - samples_[k].epoch);
    }
    out.position_km += w * samples_[j].position_km;
    out.velocity_kms += w * samples_[j].velocity_kms;
  }
  return out;
}

std::pair<Epoch, Epoch> SampledEphemeris::span() const {
  return {samples_.front().epoch, samples_.back().epoch};
}

std::vector<NamedElements> load_elements_csv(const std::string& path, double gm_km3s2) {
  std::ifstream in(path);
  if (!in) throw CoverageError("cannot open element file: " + path);
  std::string line;
  if (!std::getline(in, line) ||
      split_csv_line(line) != std::vector<std::string>{"name", "a_km", "e", "inc_deg", "raan_deg",
                                                       "argp_deg", "m0_deg", "epoch_s"}) {
    throw CoverageError("element file header mismatch in " + path +
                        " (expected name,a_km,e,inc_deg,raan_deg,argp_deg,m0_deg,epoch_s)");
  }
  std::vector<NamedElements> out;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto f = split_csv_line(line);
    if (f.size() != 8) {
      throw CoverageError("element file row " + std::to_string(lineno) + " has " +
                          std::to_string(f.size()) + " fields, expected 8");
    }
    NamedElements rec;
    rec.name = f[0];
    rec.elements.a_km = std::stod(f[1]);
    rec.elements.e = std::stod(f[2]);
    rec.elements.inc_deg = std::stod(f[3]);
    rec.elements.raan_deg = std::stod(f[4]);
    rec.elements.argp_deg = std::stod(f[5]);
    rec.elements.m0_deg = std::stod(f[6]);
    rec.elements.epoch = Epoch(std::stod(f[7]));
    rec.elements.gm_km3s2 = gm_km3s2;
    out.push_back(std::move(rec));
  }
  return out;
}

LightTimeSolution solve_light_time(const EpochState& rx, const EphemerisSource& tx_ephemeris) {
  double tau = 0.0;  // light time, seconds
  LightTimeSolution sol;
  for (int it = 1; it <= 20; ++it) {
    const EpochState tx = tx_ephemeris.state_at(rx.epoch - tau);
    const double range = (rx.position_km - tx.position_km).norm();
    const double tau_next = range / constants::kSpeedOfLightKmS;
    sol.t_tx = rx.epoch - tau_next;
    sol.tx_position_km = tx.position_km;
    sol.range_km = range;
    sol.iterations = it;
    if (std::abs(tau_next - tau) < 1e-13) {
      // One more ephemeris query at the converged epoch so position and time
      // tag are mutually consistent.
      sol.tx_position_km = tx_ephemeris.state_at(sol.t_tx).position_km;
      sol.range_km = (rx.position_km - sol.tx_position_km).norm();
      return sol;
    }
    tau = tau_next;
  }
  throw GeometryError("light-time iteration did not converge in 20 iterations");
}

}  // namespace plasmapath::frames
