#include "plasmapath/engine.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <mutex>
#include <thread>

#include "plasmapath/rng.hpp"

namespace plasmapath::scenario {

namespace {

constexpr double kDegToRad = M_PI / 180.0;

Vec3 surface_up_direction(const SurfaceUserConfig& u) {
  const double lat = u.lat_deg * kDegToRad;
  const double lon = u.lon_deg * kDegToRad;
  return Vec3(std::cos(lat) * std::cos(lon), std::cos(lat) * std::sin(lon), std::sin(lat));
}

bool segment_intersects_sphere(const Vec3& a, const Vec3& b, const Vec3& center, double radius) {
  const Vec3 d = b - a;
  const double len2 = d.squaredNorm();
  if (len2 == 0.0) return (a - center).norm() < radius;
  const double t = std::clamp((center - a).dot(d) / len2, 0.0, 1.0);
  return (a + t * d - center).norm() < radius - 1e-6;
}

}  // namespace

std::vector<CandidateLink> enumerate_links(const ScenarioConfig& cfg, int epoch_index) {
  const Epoch t = cfg.epoch_at(epoch_index);
  const frames::EpochState moon = frames::kepler_to_state(cfg.moon_elements, t);

  struct Receiver {
    std::string name;
    Vec3 pos_eci;
    bool surface;
    Vec3 up;  // local vertical for surface users
  };
  std::vector<Receiver> receivers;
  for (const OrbiterConfig& o : cfg.orbiters) {
    const frames::EpochState s =
        frames::kepler_to_state(o.elements, t, frames::Frame::MoonCenteredInertial);
    receivers.push_back({o.name, moon.position_km + s.position_km, false, Vec3::Zero()});
  }
  for (const SurfaceUserConfig& u : cfg.surface_users) {
    const Vec3 up = surface_up_direction(u);
    const Vec3 pos = moon.position_km + (constants::kMoonRadiusKm + u.alt_km) * up;
    receivers.push_back({u.name, pos, true, up});
  }

  std::vector<CandidateLink> out;
  out.reserve(receivers.size() * cfg.transmitters.size());
  for (std::size_t ti = 0; ti < cfg.transmitters.size(); ++ti) {
    for (std::size_t ri = 0; ri < receivers.size(); ++ri) {
      const Receiver& rx = receivers[ri];
      frames::EpochState rx_state;
      rx_state.epoch = t;
      rx_state.position_km = rx.pos_eci;
      const frames::LightTimeSolution lt =
          frames::solve_light_time(rx_state, *cfg.transmitters[ti].ephemeris);

      CandidateLink c;
      c.epoch_index = epoch_index;
      c.t_rx = t;
      c.tx_index = static_cast<int>(ti);
      c.rx_index = static_cast<int>(ri);
      c.rx_name = rx.name;
      c.tx_position_km = lt.tx_position_km;
      c.rx_position_km = rx.pos_eci;
      c.light_time_s = t - lt.t_tx;
      c.tangential_altitude_km = frames::tangential_altitude_km(c.tx_position_km, c.rx_position_km);
      c.earth_occulted = c.tangential_altitude_km <= 0.0;
      c.moon_occulted = segment_intersects_sphere(c.tx_position_km, c.rx_position_km,
                                                  moon.position_km, constants::kMoonRadiusKm);
      if (rx.surface && !c.moon_occulted) {
        const double sin_elev = rx.up.dot((c.tx_position_km - c.rx_position_km).normalized());
        if (sin_elev < std::sin(cfg.elevation_mask_deg * kDegToRad)) c.moon_occulted = true;
      }
      out.push_back(std::move(c));
    }
  }
  return out;
}

namespace {

struct Task {
  const CandidateLink* cand;
  int kp_index;
  int r12_index;
  int freq_index;
};

struct TaskResult {
  LinkOutcome outcome = LinkOutcome::Failed;
  LinkRecord record;
  int outer_iterations = 0;
  std::string error;
};

/// Re-validate the breakdown and budget invariants before a record is kept.
bool record_is_valid(const LinkRecord& r, const ScenarioConfig& cfg) {
  const double values[] = {r.tangential_altitude_km, r.delay.d_i1_los_m, r.delay.d_i2_m,
                           r.delay.d_i3_m,           r.delay.d_i1_bend_m, r.delay.d_len_m,
                           r.delay.d_total_m,        r.delay.tec_los_m2,  r.delay.tec_bend_m2,
                           r.budget.c_n0_dbhz,       r.dll_sigma_m,       r.uere.mean_m,
                           r.uere.p95_m,             r.uere.p99_m,        r.miss_m};
  const bool finite = std::all_of(std::begin(values), std::end(values),
                                  [](double v) { return std::isfinite(v); });
  const double sum = r.delay.d_i1_los_m + r.delay.d_i2_m + r.delay.d_i3_m +
                     r.delay.d_i1_bend_m + r.delay.d_len_m;
  return finite && r.delay.d_len_m >= 0.0 && r.delay.tec_los_m2 >= 0.0 &&
         std::abs(r.delay.d_total_m - sum) < 1e-9 && r.budget.trackable &&
         r.budget.c_n0_dbhz >= cfg.system.tracking_threshold_dbhz;
}

TaskResult process_task(const ScenarioConfig& cfg, const media::MediumModel& medium,
                        const Task& task) {
  const CandidateLink& cand = *task.cand;
  TaskResult out;
  if (cand.earth_occulted) {
    out.outcome = LinkOutcome::OccultedEarth;
    return out;
  }
  if (cand.moon_occulted) {
    out.outcome = LinkOutcome::OccultedMoon;
    return out;
  }

  const TransmitterConfig& tx = cfg.transmitters[cand.tx_index];
  const FrequencyConfig& fc = cfg.frequencies[task.freq_index];

  frames::EpochState tx_state, rx_state;
  tx_state.position_km = cand.tx_position_km;
  rx_state.position_km = cand.rx_position_km;
  const link::LinkBudget budget = link::compute_cn0(tx_state, rx_state, tx.pattern,
                                                    cfg.receiver_pattern, tx.eirp_dbw, fc.hz,
                                                    cfg.system);
  if (!budget.trackable) {
    out.outcome = LinkOutcome::Untrackable;
    return out;
  }

  media::SpaceWeather wx;
  wx.kp = cfg.kp_values[task.kp_index];
  wx.r12 = cfg.r12_values[task.r12_index];
  wx.epoch = cfg.medium_epoch;

  raytrace::ShootingResult solved;
  try {
    solved = raytrace::solve_initial_direction(cand.tx_position_km, cand.rx_position_km, fc.hz,
                                               medium, wx, cfg.solver);
  } catch (const raytrace::OccultationError&) {
    out.outcome = LinkOutcome::OccultedEarth;  // the bent ray reached the surface
    return out;
  } catch (const std::exception& e) {
    out.outcome = LinkOutcome::Failed;
    out.error = e.what();
    return out;
  }
  out.outer_iterations = solved.outer_iterations;
  if (!solved.converged) {
    out.outcome = LinkOutcome::NonConverged;
    return out;
  }

  LinkRecord rec;
  rec.epoch_index = cand.epoch_index;
  rec.epoch_s = cand.t_rx.sec;
  rec.kp = wx.kp;
  rec.r12 = wx.r12;
  rec.freq_label = fc.label;
  rec.tx_id = tx.name;
  rec.rx_id = cand.rx_name;
  rec.tangential_altitude_km = cand.tangential_altitude_km;
  try {
    rec.delay = delays::breakdown(solved, cand.tx_position_km, cand.rx_position_km, medium, wx,
                                  cfg.solver.step_table);
  } catch (const std::exception& e) {
    out.outcome = LinkOutcome::Failed;
    out.error = e.what();
    return out;
  }
  rec.budget = budget;
  rec.dll_sigma_m = link::dll_sigma_m(budget.c_n0_dbhz, fc.dll);
  const std::uint64_t stream = rng::link_stream_seed(
      cfg.seed, static_cast<std::uint64_t>(cand.epoch_index), rec.tx_id, rec.rx_id, fc.label);
  rec.uere = link::total_uere(rec.delay.d_total_m, rec.dll_sigma_m, cfg.uere_samples, stream);
  rec.outer_iterations = solved.outer_iterations;
  rec.miss_m = solved.miss_m;

  if (!record_is_valid(rec, cfg)) {
    out.outcome = LinkOutcome::Failed;
    out.error = "link record violates a breakdown or budget invariant";
    return out;
  }
  out.outcome = LinkOutcome::Emitted;
  out.record = std::move(rec);
  return out;
}

MetricStat make_stat(std::vector<double> values) {
  MetricStat s;
  if (values.empty()) return s;
  double sum = 0.0;
  for (double v : values) sum += v;
  s.mean = sum / static_cast<double>(values.size());
  std::sort(values.begin(), values.end());
  auto nearest_rank = [&values](double pct) {
    std::size_t rank = static_cast<std::size_t>(std::ceil(pct / 100.0 * values.size()));
    rank = std::clamp<std::size_t>(rank, 1, values.size());
    return values[rank - 1];
  };
  s.p95 = nearest_rank(95.0);
  s.p99 = nearest_rank(99.0);
  return s;
}

std::vector<BinSummary> summarize_bins(const ScenarioConfig& cfg,
                                       const std::vector<const LinkRecord*>& records) {
  std::vector<BinSummary> bins;
  for (std::size_t b = 0; b + 1 < cfg.bin_edges_km.size(); ++b) {
    const double lo = cfg.bin_edges_km[b];
    const double hi = cfg.bin_edges_km[b + 1];
    std::vector<const LinkRecord*> in_bin;
    for (const LinkRecord* r : records) {
      if (r->tangential_altitude_km >= lo && r->tangential_altitude_km < hi) {
        in_bin.push_back(r);
      }
    }
    if (in_bin.empty()) continue;

    BinSummary s;
    s.lo_km = lo;
    s.hi_km = hi;
    s.count = static_cast<int>(in_bin.size());
    auto collect = [&in_bin](auto getter) {
      std::vector<double> v;
      v.reserve(in_bin.size());
      for (const LinkRecord* r : in_bin) v.push_back(getter(*r));
      return make_stat(std::move(v));
    };
    s.d_total = collect([](const LinkRecord& r) { return r.delay.d_total_m; });
    s.d_i1_los = collect([](const LinkRecord& r) { return r.delay.d_i1_los_m; });
    s.d_i2 = collect([](const LinkRecord& r) { return r.delay.d_i2_m; });
    s.d_i3 = collect([](const LinkRecord& r) { return r.delay.d_i3_m; });
    s.d_len = collect([](const LinkRecord& r) { return r.delay.d_len_m; });
    s.d_i1_bend = collect([](const LinkRecord& r) { return r.delay.d_i1_bend_m; });
    s.c_n0 = collect([](const LinkRecord& r) { return r.budget.c_n0_dbhz; });
    s.noise = collect([](const LinkRecord& r) { return r.dll_sigma_m; });
    s.uere = collect([](const LinkRecord& r) { return r.uere.mean_m; });
    bins.push_back(s);
  }
  return bins;
}

}  // namespace

RunResult run_scenario(const ScenarioConfig& cfg) {
  const auto t0 = std::chrono::steady_clock::now();
  const std::shared_ptr<const media::MediumModel> medium = cfg.make_medium();

  const int n_epochs = cfg.epoch_count();
  std::vector<std::vector<CandidateLink>> candidates(n_epochs);
  for (int e = 0; e < n_epochs; ++e) candidates[e] = enumerate_links(cfg, e);

  // Canonical task order: epoch, kp, r12, frequency, pair.
  std::vector<Task> tasks;
  for (int e = 0; e < n_epochs; ++e) {
    for (int ki = 0; ki < static_cast<int>(cfg.kp_values.size()); ++ki) {
      for (int ri = 0; ri < static_cast<int>(cfg.r12_values.size()); ++ri) {
        for (int fi = 0; fi < static_cast<int>(cfg.frequencies.size()); ++fi) {
          for (const CandidateLink& c : candidates[e]) {
            tasks.push_back({&c, ki, ri, fi});
          }
        }
      }
    }
  }

  std::vector<TaskResult> results(tasks.size());
  std::atomic<std::size_t> cursor{0};
  auto worker = [&]() {
    while (true) {
      const std::size_t i = cursor.fetch_add(1);
      if (i >= tasks.size()) break;
      results[i] = process_task(cfg, *medium, tasks[i]);
    }
  };
  const int n_threads = std::max(1, std::min<int>(cfg.workers, static_cast<int>(tasks.size())));
  if (n_threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(n_threads);
    for (int i = 0; i < n_threads; ++i) pool.emplace_back(worker);
    for (std::thread& th : pool) th.join();
  }

  RunResult out;
  out.counts.candidates = static_cast<long long>(tasks.size());
  for (TaskResult& r : results) {
    switch (r.outcome) {
      case LinkOutcome::Emitted:
        out.counts.emitted++;
        out.records.push_back(std::move(r.record));
        break;
      case LinkOutcome::OccultedEarth: out.counts.occulted_earth++; break;
      case LinkOutcome::OccultedMoon: out.counts.occulted_moon++; break;
      case LinkOutcome::Untrackable: out.counts.untrackable++; break;
      case LinkOutcome::NonConverged: out.counts.non_converged++; break;
      case LinkOutcome::Failed:
        out.counts.failed++;
        if (out.failure_messages.size() < 10) out.failure_messages.push_back(r.error);
        break;
    }
    out.total_outer_iterations += r.outer_iterations;
    out.max_outer_iterations = std::max(out.max_outer_iterations, r.outer_iterations);
  }

  for (double kp : cfg.kp_values) {
    for (double r12 : cfg.r12_values) {
      for (const FrequencyConfig& fc : cfg.frequencies) {
        std::vector<const LinkRecord*> group;
        for (const LinkRecord& r : out.records) {
          if (r.kp == kp && r.r12 == r12 && r.freq_label == fc.label) group.push_back(&r);
        }
        if (group.empty()) continue;
        SummaryBlock block;
        block.kp = kp;
        block.r12 = r12;
        block.freq_label = fc.label;
        block.bins = summarize_bins(cfg, group);
        out.summaries.push_back(std::move(block));
      }
    }
  }

  out.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return out;
}

}  // namespace plasmapath::scenario
