#include "plasmapath/link.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>

#include "plasmapath/constants.hpp"
#include "plasmapath/rng.hpp"

namespace plasmapath::link {

AntennaPattern::AntennaPattern(std::string name, std::vector<std::pair<double, double>> nodes)
    : name_(std::move(name)), nodes_(std::move(nodes)) {
  if (nodes_.empty()) throw frames::GeometryError("antenna pattern table is empty");
  if (nodes_.front().first != 0.0) {
    throw frames::GeometryError("antenna pattern must start at 0 deg off-boresight");
  }
  for (std::size_t i = 1; i < nodes_.size(); ++i) {
    if (!(nodes_[i].first > nodes_[i - 1].first)) {
      throw frames::GeometryError("antenna pattern angles must be strictly increasing");
    }
  }
}

AntennaPattern AntennaPattern::from_csv(const std::string& path, std::string name) {
  std::ifstream in(path);
  if (!in) throw frames::GeometryError("cannot open antenna pattern file: " + path);
  std::string line;
  if (!std::getline(in, line) || line.rfind("angle_deg,gain_dbi", 0) != 0) {
    throw frames::GeometryError("antenna pattern CSV must start with header angle_deg,gain_dbi: " +
                                path);
  }
  std::vector<std::pair<double, double>> nodes;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::stringstream ss(line);
    std::string a, g;
    std::getline(ss, a, ',');
    std::getline(ss, g, ',');
    nodes.emplace_back(std::stod(a), std::stod(g));
  }
  if (name.empty()) name = path;
  return AntennaPattern(std::move(name), std::move(nodes));
}

void AntennaPattern::to_csv(std::ostream& out) const {
  out << "angle_deg,gain_dbi\n";
  char buf[64];
  for (const auto& [angle, gain] : nodes_) {
    std::snprintf(buf, sizeof(buf), "%.6g,%.6g\n", angle, gain);
    out << buf;
  }
}

AntennaPattern AntennaPattern::parametric(std::string name, double peak_dbi,
                                          double half_power_beamwidth_deg, double shelf_dbi,
                                          double back_dbi) {
  const double theta_hp = 0.5 * half_power_beamwidth_deg;
  std::vector<std::pair<double, double>> nodes;
  for (double a = 0.0; a <= 90.0 + 1e-9; a += 0.5) {
    const double ratio = a / theta_hp;
    const double lobe = peak_dbi - 3.0 * ratio * ratio;
    nodes.emplace_back(a, std::max(lobe, shelf_dbi));
  }
  nodes.emplace_back(100.0, back_dbi);
  nodes.emplace_back(180.0, back_dbi);
  return AntennaPattern(std::move(name), std::move(nodes));
}

double AntennaPattern::gain_dbi(double off_boresight_deg) const {
  if (off_boresight_deg <= nodes_.front().first) return nodes_.front().second;
  if (off_boresight_deg >= nodes_.back().first) return nodes_.back().second;
  auto it = std::upper_bound(nodes_.begin(), nodes_.end(), off_boresight_deg,
                             [](double a, const auto& n) { return a < n.first; });
  const auto& hi = *it;
  const auto& lo = *(it - 1);
  const double t = (off_boresight_deg - lo.first) / (hi.first - lo.first);
  return lo.second + t * (hi.second - lo.second);
}

int dll_case(const DllParams& p) {
  const double tb = p.t_chip_s * p.b_fe_hz;
  if (p.spacing_chips >= M_PI / tb) return 1;
  if (p.spacing_chips <= 1.0 / tb) return 2;
  return 3;
}

double dll_variance_chips2(double c_n0_linear, const DllParams& p, int forced_case) {
  const int which = forced_case == 0 ? dll_case(p) : forced_case;
  const double rho = c_n0_linear;
  const double a = p.b_dll_hz / (2.0 * rho);
  const double inv_tb = 1.0 / (p.t_chip_s * p.b_fe_hz);
  const double d = p.spacing_chips;
  switch (which) {
    case 1:
      return a * d * (1.0 + 2.0 / (p.t_coh_s * rho * (2.0 - d)));
    case 2:
      return a * inv_tb * (1.0 + 1.0 / (p.t_coh_s * rho));
    case 3: {
      const double band = inv_tb + (p.b_fe_hz * p.t_chip_s / (M_PI - 1.0)) * (d - inv_tb) * (d - inv_tb);
      return a * band * (1.0 + 1.0 / (p.t_coh_s * rho));
    }
    default:
      throw frames::GeometryError("dll_variance_chips2: case must be 0..3");
  }
}

double dll_sigma_m(double c_n0_dbhz, const DllParams& p) {
  const double rho = std::pow(10.0, c_n0_dbhz / 10.0);
  const double sigma_chips = std::sqrt(dll_variance_chips2(rho, p));
  return sigma_chips * constants::kSpeedOfLightMS * p.t_chip_s;
}

LinkBudget compute_cn0(const EpochState& tx, const EpochState& rx,
                       const AntennaPattern& tx_pattern, const AntennaPattern& rx_pattern,
                       double eirp_dbw, double f_hz, const SystemParams& sys) {
  const Vec3 tx_to_rx = rx.position_km - tx.position_km;
  const double range_m = tx_to_rx.norm() * 1000.0;
  const Vec3 u = tx_to_rx.normalized();

  auto off_boresight_deg = [](const Vec3& boresight, const Vec3& dir) {
    const double c = std::clamp(boresight.normalized().dot(dir), -1.0, 1.0);
    return std::acos(c) * 180.0 / M_PI;
  };

  LinkBudget out;
  out.eirp_dbw = eirp_dbw;
  out.tx_off_boresight_deg = off_boresight_deg(-tx.position_km, u);
  out.rx_off_boresight_deg = off_boresight_deg(-rx.position_km, -u);
  out.tx_gain_dbi = tx_pattern.gain_dbi(out.tx_off_boresight_deg);
  out.rx_gain_dbi = rx_pattern.gain_dbi(out.rx_off_boresight_deg);
  out.free_space_loss_db =
      20.0 * std::log10(4.0 * M_PI * range_m * f_hz / constants::kSpeedOfLightMS);
  out.c_n0_dbhz = eirp_dbw + (out.tx_gain_dbi - tx_pattern.peak_gain_dbi()) + out.rx_gain_dbi -
                  out.free_space_loss_db - sys.noise_density_dbw_hz;
  out.trackable = out.c_n0_dbhz >= sys.tracking_threshold_dbhz;
  return out;
}

UereStats total_uere(double d_total_m, double sigma_m, int n_samples, std::uint64_t stream_seed) {
  if (n_samples < 1) throw frames::GeometryError("total_uere needs at least one sample");
  std::uint64_t state = stream_seed;
  std::vector<double> abs_err(static_cast<std::size_t>(n_samples));
  double sum = 0.0;
  for (double& v : abs_err) {
    v = std::abs(d_total_m + sigma_m * rng::standard_normal(state));
    sum += v;
  }
  std::sort(abs_err.begin(), abs_err.end());
  auto nearest_rank = [&abs_err](double pct) {
    const std::size_t n = abs_err.size();
    std::size_t rank = static_cast<std::size_t>(std::ceil(pct / 100.0 * n));
    rank = std::clamp<std::size_t>(rank, 1, n);
    return abs_err[rank - 1];
  };
  UereStats out;
  out.mean_m = sum / n_samples;
  out.p95_m = nearest_rank(95.0);
  out.p99_m = nearest_rank(99.0);
  return out;
}

}  // namespace plasmapath::link
