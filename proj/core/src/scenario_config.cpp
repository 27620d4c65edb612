#include "plasmapath/scenario.hpp"

#include <yaml-cpp/yaml.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "plasmapath/constants.hpp"

namespace plasmapath::scenario {

namespace {

namespace fs = std::filesystem;

struct ParseContext {
  std::vector<std::string> errors;
  fs::path base_dir;

  void fail(const YAML::Node& node, const std::string& msg) {
    std::ostringstream os;
    if (node.IsDefined() && node.Mark().line >= 0) {
      os << "line " << node.Mark().line + 1 << ": ";
    }
    os << msg;
    errors.push_back(os.str());
  }

  void check_keys(const YAML::Node& node, const std::string& section,
                  const std::set<std::string>& allowed) {
    if (!node.IsDefined() || node.IsNull()) return;
    if (!node.IsMap()) {
      fail(node, "section '" + section + "' must be a map");
      return;
    }
    for (auto it : node) {
      const std::string key = it.first.as<std::string>();
      if (!allowed.count(key)) {
        fail(it.first, "unknown key '" + key + "' in section '" + section + "'");
      }
    }
  }

  template <typename T>
  T get_or(const YAML::Node& parent, const std::string& key, T fallback) {
    if (!parent.IsDefined() || parent.IsNull() || !parent[key]) return fallback;
    try {
      return parent[key].as<T>();
    } catch (const YAML::Exception&) {
      fail(parent[key], "key '" + key + "' has the wrong type");
      return fallback;
    }
  }

  template <typename T>
  T require(const YAML::Node& parent, const std::string& parent_name, const std::string& key) {
    if (!parent.IsDefined() || !parent[key]) {
      fail(parent, "missing required key '" + key + "' in section '" + parent_name + "'");
      return T{};
    }
    try {
      return parent[key].as<T>();
    } catch (const YAML::Exception&) {
      fail(parent[key], "key '" + key + "' has the wrong type");
      return T{};
    }
  }
};

frames::KeplerianElements parse_elements(ParseContext& ctx, const YAML::Node& node,
                                         const std::string& section, double gm,
                                         double default_epoch_s) {
  ctx.check_keys(node, section,
                 {"a_km", "e", "inc_deg", "raan_deg", "argp_deg", "m0_deg", "epoch_s"});
  frames::KeplerianElements el;
  el.a_km = ctx.require<double>(node, section, "a_km");
  el.e = ctx.require<double>(node, section, "e");
  el.inc_deg = ctx.require<double>(node, section, "inc_deg");
  el.raan_deg = ctx.get_or<double>(node, "raan_deg", 0.0);
  el.argp_deg = ctx.get_or<double>(node, "argp_deg", 0.0);
  el.m0_deg = ctx.get_or<double>(node, "m0_deg", 0.0);
  el.epoch = Epoch(ctx.get_or<double>(node, "epoch_s", default_epoch_s));
  el.gm_km3s2 = gm;
  if (!(el.a_km > 0.0)) ctx.fail(node, section + ".a_km must be positive");
  if (!(el.e >= 0.0 && el.e < 1.0)) ctx.fail(node, section + ".e must be in [0, 1)");
  if (!(el.inc_deg >= 0.0 && el.inc_deg <= 180.0)) {
    ctx.fail(node, section + ".inc_deg must be in [0, 180]");
  }
  return el;
}

link::AntennaPattern parse_pattern(ParseContext& ctx, const YAML::Node& node,
                                   const std::string& section,
                                   const link::AntennaPattern& fallback) {
  if (!node.IsDefined() || node.IsNull()) return fallback;
  try {
    if (node.IsScalar()) {
      const fs::path p = ctx.base_dir / node.as<std::string>();
      return link::AntennaPattern::from_csv(p.string());
    }
    ctx.check_keys(node, section,
                   {"name", "peak_dbi", "half_power_beamwidth_deg", "shelf_dbi", "back_dbi"});
    const std::string name = ctx.get_or<std::string>(node, "name", section);
    const double peak = ctx.require<double>(node, section, "peak_dbi");
    const double hpbw = ctx.require<double>(node, section, "half_power_beamwidth_deg");
    const double shelf = ctx.get_or<double>(node, "shelf_dbi", peak - 20.0);
    const double back = ctx.get_or<double>(node, "back_dbi", -30.0);
    if (!ctx.errors.empty() && !(hpbw > 0.0)) return fallback;
    return link::AntennaPattern::parametric(name, peak, hpbw, shelf, back);
  } catch (const std::exception& e) {
    ctx.fail(node, section + ": " + e.what());
    return fallback;
  }
}

void parse_medium(ParseContext& ctx, const YAML::Node& node, ScenarioConfig& cfg) {
  ctx.check_keys(node, "medium", {"kind", "epoch_s", "kp", "r12", "overrides"});
  const std::string kind = ctx.get_or<std::string>(node, "kind", "reference");
  if (kind == "vacuum") {
    cfg.vacuum_medium = true;
  } else if (kind != "reference") {
    ctx.fail(node["kind"], "medium.kind must be 'reference' or 'vacuum'");
  }
  cfg.medium_epoch = Epoch(ctx.get_or<double>(node, "epoch_s", cfg.epoch_start.sec));
  if (node["kp"]) cfg.kp_values = ctx.get_or<std::vector<double>>(node, "kp", cfg.kp_values);
  if (node["r12"]) cfg.r12_values = ctx.get_or<std::vector<double>>(node, "r12", cfg.r12_values);
  for (double kp : cfg.kp_values) {
    if (!(kp >= 0.0 && kp <= 9.0)) ctx.fail(node["kp"], "medium.kp values must be in [0, 9]");
  }
  for (double r12 : cfg.r12_values) {
    if (!(r12 >= 0.0 && r12 <= 300.0)) {
      ctx.fail(node["r12"], "medium.r12 values must be in [0, 300]");
    }
  }

  const YAML::Node ov = node["overrides"];
  ctx.check_keys(ov, "medium.overrides",
                 {"peak_density_m3", "peak_height_km", "scale_height_km", "night_floor",
                  "solar_activity_gain", "plasmasphere_coeff", "plasma_join_altitude_km",
                  "plasma_join_width_km", "plasmapause_l_base", "plasmapause_l_per_kp",
                  "plasmapause_width_l", "trough_floor_m3", "dipole_surface_tesla",
                  "cutoff_radius_km", "outer_taper_start_frac", "outer_taper_width_frac",
                  "dipole_tilt_deg", "dipole_lon_deg"});
  media::ReferenceMediumParams& mp = cfg.medium_params;
  mp.peak_density_m3 = ctx.get_or(ov, "peak_density_m3", mp.peak_density_m3);
  mp.peak_height_km = ctx.get_or(ov, "peak_height_km", mp.peak_height_km);
  mp.scale_height_km = ctx.get_or(ov, "scale_height_km", mp.scale_height_km);
  mp.night_floor = ctx.get_or(ov, "night_floor", mp.night_floor);
  mp.solar_activity_gain = ctx.get_or(ov, "solar_activity_gain", mp.solar_activity_gain);
  mp.plasmasphere_coeff = ctx.get_or(ov, "plasmasphere_coeff", mp.plasmasphere_coeff);
  mp.plasma_join_altitude_km = ctx.get_or(ov, "plasma_join_altitude_km", mp.plasma_join_altitude_km);
  mp.plasma_join_width_km = ctx.get_or(ov, "plasma_join_width_km", mp.plasma_join_width_km);
  mp.plasmapause_l_base = ctx.get_or(ov, "plasmapause_l_base", mp.plasmapause_l_base);
  mp.plasmapause_l_per_kp = ctx.get_or(ov, "plasmapause_l_per_kp", mp.plasmapause_l_per_kp);
  mp.plasmapause_width_l = ctx.get_or(ov, "plasmapause_width_l", mp.plasmapause_width_l);
  mp.trough_floor_m3 = ctx.get_or(ov, "trough_floor_m3", mp.trough_floor_m3);
  mp.dipole_surface_tesla = ctx.get_or(ov, "dipole_surface_tesla", mp.dipole_surface_tesla);
  mp.cutoff_radius_km = ctx.get_or(ov, "cutoff_radius_km", mp.cutoff_radius_km);
  mp.outer_taper_start_frac = ctx.get_or(ov, "outer_taper_start_frac", mp.outer_taper_start_frac);
  mp.outer_taper_width_frac = ctx.get_or(ov, "outer_taper_width_frac", mp.outer_taper_width_frac);
  const double tilt = ctx.get_or(ov, "dipole_tilt_deg", 11.5);
  const double lon = ctx.get_or(ov, "dipole_lon_deg", -71.8);
  mp.dipole_axis = frames::SmFrameModel::default_dipole_axis(tilt, lon);
}

void parse_transmitters(ParseContext& ctx, const YAML::Node& node, ScenarioConfig& cfg) {
  ctx.check_keys(node, "transmitters", {"walker", "satellites", "from_elements_csv"});
  const link::AntennaPattern default_tx =
      link::AntennaPattern::parametric("gnss-tx", 13.0, 24.0, -7.0);

  const YAML::Node from_csv = node["from_elements_csv"];
  if (from_csv.IsDefined() && !from_csv.IsNull()) {
    ctx.check_keys(from_csv, "transmitters.from_elements_csv", {"path", "eirp_dbw", "pattern"});
    const double eirp = ctx.get_or<double>(from_csv, "eirp_dbw", 27.0);
    const link::AntennaPattern pat = parse_pattern(
        ctx, from_csv["pattern"], "transmitters.from_elements_csv.pattern", default_tx);
    try {
      const fs::path p =
          ctx.base_dir / ctx.require<std::string>(from_csv, "transmitters.from_elements_csv",
                                                  "path");
      for (auto& rec : frames::load_elements_csv(p.string(), constants::kGmEarthKm3S2)) {
        TransmitterConfig tx;
        tx.name = rec.name;
        tx.ephemeris = std::make_shared<frames::KeplerianEphemeris>(rec.elements);
        tx.eirp_dbw = eirp;
        tx.pattern = pat;
        cfg.transmitters.push_back(std::move(tx));
      }
    } catch (const std::exception& e) {
      ctx.fail(from_csv, e.what());
    }
  }

  const YAML::Node walker = node["walker"];
  if (walker.IsDefined() && !walker.IsNull()) {
    ctx.check_keys(walker, "transmitters.walker",
                   {"name_prefix", "count", "planes", "phasing", "a_km", "e", "inc_deg",
                    "raan0_deg", "epoch_s", "eirp_dbw", "pattern"});
    const std::string prefix = ctx.get_or<std::string>(walker, "name_prefix", "SAT");
    const int count = ctx.require<int>(walker, "transmitters.walker", "count");
    const int planes = ctx.require<int>(walker, "transmitters.walker", "planes");
    const int phasing = ctx.get_or<int>(walker, "phasing", 1);
    if (count <= 0 || planes <= 0 || count % planes != 0) {
      ctx.fail(walker, "walker count must be a positive multiple of planes");
    } else {
      const int per_plane = count / planes;
      const double eirp = ctx.get_or<double>(walker, "eirp_dbw", 27.0);
      const link::AntennaPattern pat =
          parse_pattern(ctx, walker["pattern"], "transmitters.walker.pattern", default_tx);
      frames::KeplerianElements base;
      base.a_km = ctx.require<double>(walker, "transmitters.walker", "a_km");
      base.e = ctx.get_or<double>(walker, "e", 0.0);
      base.inc_deg = ctx.require<double>(walker, "transmitters.walker", "inc_deg");
      base.gm_km3s2 = constants::kGmEarthKm3S2;
      base.epoch = Epoch(ctx.get_or<double>(walker, "epoch_s", cfg.epoch_start.sec));
      const double raan0 = ctx.get_or<double>(walker, "raan0_deg", 0.0);
      for (int k = 0; k < count; ++k) {
        const int plane = k / per_plane;
        const int slot = k % per_plane;
        frames::KeplerianElements el = base;
        el.raan_deg = raan0 + 360.0 * plane / planes;
        el.m0_deg = 360.0 * slot / per_plane + 360.0 * phasing * plane / count;
        TransmitterConfig tx;
        char id[64];
        std::snprintf(id, sizeof(id), "%s-%02d", prefix.c_str(), k + 1);
        tx.name = id;
        tx.ephemeris = std::make_shared<frames::KeplerianEphemeris>(el);
        tx.eirp_dbw = eirp;
        tx.pattern = pat;
        cfg.transmitters.push_back(std::move(tx));
      }
    }
  }

  const YAML::Node sats = node["satellites"];
  if (sats.IsDefined() && !sats.IsNull()) {
    if (!sats.IsSequence()) {
      ctx.fail(sats, "transmitters.satellites must be a list");
      return;
    }
    for (const YAML::Node& s : sats) {
      ctx.check_keys(s, "transmitters.satellites[]",
                     {"name", "elements", "ephemeris_csv", "eirp_dbw", "pattern"});
      TransmitterConfig tx;
      tx.name = ctx.require<std::string>(s, "transmitters.satellites[]", "name");
      tx.eirp_dbw = ctx.get_or<double>(s, "eirp_dbw", 27.0);
      tx.pattern = parse_pattern(ctx, s["pattern"], "transmitters.satellites[].pattern",
                                 default_tx);
      const bool has_elements = s["elements"].IsDefined();
      const bool has_csv = s["ephemeris_csv"].IsDefined();
      if (has_elements == has_csv) {
        ctx.fail(s, "satellite '" + tx.name + "' needs exactly one of elements/ephemeris_csv");
        continue;
      }
      if (has_elements) {
        const frames::KeplerianElements el =
            parse_elements(ctx, s["elements"], "transmitters.satellites[].elements",
                           constants::kGmEarthKm3S2, cfg.epoch_start.sec);
        tx.ephemeris = std::make_shared<frames::KeplerianEphemeris>(el);
      } else {
        try {
          const fs::path p = ctx.base_dir / s["ephemeris_csv"].as<std::string>();
          tx.ephemeris =
              std::make_shared<frames::SampledEphemeris>(frames::SampledEphemeris::from_csv(p.string()));
        } catch (const std::exception& e) {
          ctx.fail(s["ephemeris_csv"], e.what());
          continue;
        }
      }
      cfg.transmitters.push_back(std::move(tx));
    }
  }
}

void parse_receivers(ParseContext& ctx, const YAML::Node& node, ScenarioConfig& cfg) {
  ctx.check_keys(node, "receivers",
                 {"antenna", "orbiters", "orbiters_csv", "surface", "elevation_mask_deg"});
  cfg.receiver_pattern =
      parse_pattern(ctx, node["antenna"], "receivers.antenna", cfg.receiver_pattern);
  cfg.elevation_mask_deg = ctx.get_or<double>(node, "elevation_mask_deg", 0.0);

  if (node["orbiters_csv"]) {
    try {
      const fs::path p = ctx.base_dir / node["orbiters_csv"].as<std::string>();
      for (auto& rec : frames::load_elements_csv(p.string(), constants::kGmMoonKm3S2)) {
        cfg.orbiters.push_back({rec.name, rec.elements});
      }
    } catch (const std::exception& e) {
      ctx.fail(node["orbiters_csv"], e.what());
    }
  }

  const YAML::Node orbs = node["orbiters"];
  if (orbs.IsDefined() && !orbs.IsNull()) {
    if (!orbs.IsSequence()) {
      ctx.fail(orbs, "receivers.orbiters must be a list");
    } else {
      for (const YAML::Node& o : orbs) {
        ctx.check_keys(o, "receivers.orbiters[]", {"name", "elements"});
        OrbiterConfig rc;
        rc.name = ctx.require<std::string>(o, "receivers.orbiters[]", "name");
        rc.elements = parse_elements(ctx, o["elements"], "receivers.orbiters[].elements",
                                     constants::kGmMoonKm3S2, cfg.epoch_start.sec);
        cfg.orbiters.push_back(std::move(rc));
      }
    }
  }
  const YAML::Node surf = node["surface"];
  if (surf.IsDefined() && !surf.IsNull()) {
    if (!surf.IsSequence()) {
      ctx.fail(surf, "receivers.surface must be a list");
    } else {
      for (const YAML::Node& u : surf) {
        ctx.check_keys(u, "receivers.surface[]", {"name", "lat_deg", "lon_deg", "alt_km"});
        SurfaceUserConfig su;
        su.name = ctx.require<std::string>(u, "receivers.surface[]", "name");
        su.lat_deg = ctx.require<double>(u, "receivers.surface[]", "lat_deg");
        su.lon_deg = ctx.get_or<double>(u, "lon_deg", 0.0);
        su.alt_km = ctx.get_or<double>(u, "alt_km", 0.0);
        cfg.surface_users.push_back(std::move(su));
      }
    }
  }
}

void parse_solver(ParseContext& ctx, const YAML::Node& node, ScenarioConfig& cfg) {
  ctx.check_keys(node, "solver",
                 {"miss_threshold_m", "delay_stagnation_m", "direct_miss_m", "max_outer",
                  "simplex_edge_rad", "simplex_min_diameter_rad", "max_inner", "step_table"});
  raytrace::SolverOptions& s = cfg.solver;
  s.miss_threshold_m = ctx.get_or(node, "miss_threshold_m", s.miss_threshold_m);
  s.delay_stagnation_m = ctx.get_or(node, "delay_stagnation_m", s.delay_stagnation_m);
  s.direct_miss_m = ctx.get_or(node, "direct_miss_m", s.direct_miss_m);
  s.max_outer = ctx.get_or(node, "max_outer", s.max_outer);
  s.simplex_edge_rad = ctx.get_or(node, "simplex_edge_rad", s.simplex_edge_rad);
  s.simplex_min_diameter_rad =
      ctx.get_or(node, "simplex_min_diameter_rad", s.simplex_min_diameter_rad);
  s.max_inner = ctx.get_or(node, "max_inner", s.max_inner);
  if (node["step_table"]) {
    try {
      std::vector<raytrace::StepTable::Rule> rules;
      for (const YAML::Node& row : node["step_table"]) {
        const double bound = row[0].as<double>();
        rules.push_back({bound < 0.0 ? std::numeric_limits<double>::infinity() : bound,
                         row[1].as<double>()});
      }
      s.step_table = raytrace::StepTable(std::move(rules));
    } catch (const std::exception& e) {
      ctx.fail(node["step_table"], std::string("solver.step_table: ") + e.what());
    }
  }
}

void parse_link(ParseContext& ctx, const YAML::Node& node, ScenarioConfig& cfg) {
  ctx.check_keys(node, "link",
                 {"tracking_threshold_dbhz", "noise_density_dbw_hz", "uere_samples", "dll"});
  cfg.system.tracking_threshold_dbhz =
      ctx.get_or(node, "tracking_threshold_dbhz", cfg.system.tracking_threshold_dbhz);
  cfg.system.noise_density_dbw_hz =
      ctx.get_or(node, "noise_density_dbw_hz", cfg.system.noise_density_dbw_hz);
  cfg.uere_samples = ctx.get_or(node, "uere_samples", cfg.uere_samples);
  if (cfg.uere_samples < 1) ctx.fail(node["uere_samples"], "link.uere_samples must be >= 1");

  const YAML::Node dll = node["dll"];
  if (dll.IsDefined() && !dll.IsNull()) {
    for (auto it : dll) {
      const std::string label = it.first.as<std::string>();
      FrequencyConfig* fc = nullptr;
      for (FrequencyConfig& f : cfg.frequencies) {
        if (f.label == label) fc = &f;
      }
      if (!fc) {
        ctx.fail(it.first, "link.dll refers to unused frequency '" + label + "'");
        continue;
      }
      ctx.check_keys(it.second, "link.dll." + label,
                     {"b_dll_hz", "spacing_chips", "t_coh_s", "t_chip_s", "b_fe_hz"});
      fc->dll.b_dll_hz = ctx.get_or(it.second, "b_dll_hz", fc->dll.b_dll_hz);
      fc->dll.spacing_chips = ctx.get_or(it.second, "spacing_chips", fc->dll.spacing_chips);
      fc->dll.t_coh_s = ctx.get_or(it.second, "t_coh_s", fc->dll.t_coh_s);
      fc->dll.t_chip_s = ctx.get_or(it.second, "t_chip_s", fc->dll.t_chip_s);
      fc->dll.b_fe_hz = ctx.get_or(it.second, "b_fe_hz", fc->dll.b_fe_hz);
    }
  }
}

}  // namespace

FrequencyConfig standard_frequency(const std::string& label) {
  FrequencyConfig f;
  f.label = label;
  if (label == "L1") {
    f.hz = constants::kFreqL1Hz;
    f.dll = link::DllParams::l1();
  } else if (label == "L5") {
    f.hz = constants::kFreqL5Hz;
    f.dll = link::DllParams::l5();
  } else if (label == "E1") {
    f.hz = constants::kFreqE1Hz;
    f.dll = link::DllParams::l1();
  } else {
    throw ConfigError("unknown frequency label '" + label + "' (expected L1, L5, or E1)");
  }
  return f;
}

int ScenarioConfig::epoch_count() const {
  const double step_s = step_minutes * 60.0;
  if (!(step_s > 0.0)) return 1;
  return static_cast<int>(std::floor(span_hours * 3600.0 / step_s)) + 1;
}

Epoch ScenarioConfig::epoch_at(int index) const {
  return epoch_start + index * step_minutes * 60.0;
}

std::shared_ptr<const media::MediumModel> ScenarioConfig::make_medium() const {
  if (vacuum_medium) {
    return std::make_shared<media::VacuumMedium>(medium_params.cutoff_radius_km);
  }
  return std::make_shared<media::ReferenceMedium>(medium_params);
}

ScenarioConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();

  YAML::Node root;
  try {
    root = YAML::Load(buffer.str());
  } catch (const YAML::Exception& e) {
    throw ConfigError("line " + std::to_string(e.mark.line + 1) + ": " + e.msg);
  }

  ParseContext ctx;
  ctx.base_dir = fs::path(path).parent_path();
  ScenarioConfig cfg;
  cfg.config_text = buffer.str();

  ctx.check_keys(root, "top level",
                 {"name", "seed", "workers", "output_dir", "epochs", "medium", "frequencies",
                  "moon", "transmitters", "receivers", "solver", "link", "bins_km"});

  cfg.name = ctx.get_or<std::string>(root, "name", cfg.name);
  cfg.seed = ctx.get_or<std::uint64_t>(root, "seed", cfg.seed);
  cfg.workers = ctx.get_or<int>(root, "workers", cfg.workers);
  if (cfg.workers < 1) ctx.fail(root["workers"], "workers must be >= 1");
  cfg.output_dir = ctx.get_or<std::string>(root, "output_dir", cfg.output_dir);

  const YAML::Node epochs = root["epochs"];
  ctx.check_keys(epochs, "epochs", {"start_s", "span_hours", "step_minutes"});
  cfg.epoch_start = Epoch(ctx.get_or<double>(epochs, "start_s", 0.0));
  cfg.span_hours = ctx.get_or<double>(epochs, "span_hours", cfg.span_hours);
  cfg.step_minutes = ctx.get_or<double>(epochs, "step_minutes", cfg.step_minutes);
  if (!(cfg.step_minutes > 0.0)) ctx.fail(epochs, "epochs.step_minutes must be positive");
  if (cfg.span_hours < 0.0) ctx.fail(epochs, "epochs.span_hours must be non-negative");

  parse_medium(ctx, root["medium"], cfg);

  if (root["frequencies"]) {
    try {
      for (const YAML::Node& f : root["frequencies"]) {
        cfg.frequencies.push_back(standard_frequency(f.as<std::string>()));
      }
    } catch (const std::exception& e) {
      ctx.fail(root["frequencies"], e.what());
    }
  }
  if (cfg.frequencies.empty()) {
    ctx.fail(root["frequencies"], "at least one frequency is required");
  }

  // Moon orbit about Earth; axes of the Moon-centered frame stay aligned with
  // the inertial frame (fixed rotation).
  cfg.moon_elements.a_km = 384400.0;
  cfg.moon_elements.e = 0.0549;
  cfg.moon_elements.inc_deg = 5.145;
  cfg.moon_elements.gm_km3s2 = constants::kGmEarthKm3S2;
  cfg.moon_elements.epoch = cfg.epoch_start;
  if (root["moon"]) {
    ctx.check_keys(root["moon"], "moon", {"elements"});
    if (root["moon"]["elements"]) {
      cfg.moon_elements = parse_elements(ctx, root["moon"]["elements"], "moon.elements",
                                         constants::kGmEarthKm3S2, cfg.epoch_start.sec);
    }
  }

  if (root["transmitters"]) parse_transmitters(ctx, root["transmitters"], cfg);
  if (cfg.transmitters.empty()) {
    ctx.fail(root["transmitters"], "at least one transmitter is required");
  }

  if (root["receivers"]) parse_receivers(ctx, root["receivers"], cfg);
  if (cfg.orbiters.empty() && cfg.surface_users.empty()) {
    ctx.fail(root["receivers"], "at least one receiver is required");
  }

  if (root["solver"]) parse_solver(ctx, root["solver"], cfg);
  if (root["link"]) parse_link(ctx, root["link"], cfg);

  if (root["bins_km"]) {
    cfg.bin_edges_km = ctx.get_or<std::vector<double>>(root, "bins_km", cfg.bin_edges_km);
  }
  if (cfg.bin_edges_km.size() < 2) {
    ctx.fail(root["bins_km"], "bins_km needs at least two edges");
  }
  for (std::size_t i = 1; i < cfg.bin_edges_km.size(); ++i) {
    if (!(cfg.bin_edges_km[i] > cfg.bin_edges_km[i - 1])) {
      ctx.fail(root["bins_km"], "bins_km edges must be strictly increasing");
      break;
    }
  }

  if (!ctx.errors.empty()) {
    std::string what = "invalid scenario config " + path + ":";
    for (const std::string& e : ctx.errors) what += "\n  " + e;
    throw ConfigError(what);
  }
  return cfg;
}

}  // namespace plasmapath::scenario
