#include <benchmark/benchmark.h>

#include "plasmapath/delays.hpp"
#include "plasmapath/raytrace.hpp"

using namespace plasmapath;
using frames::Vec3;

namespace {

media::SpaceWeather baseline_weather() {
  media::SpaceWeather wx;
  wx.kp = 3.0;
  wx.r12 = 167.24;
  wx.epoch = frames::Epoch(789004800.0);
  return wx;
}

/// Chord grazing the earth at the given altitude, tangent point toward +Y.
std::pair<Vec3, Vec3> grazing_chord(double altitude_km) {
  const Vec3 n = Vec3::UnitY();
  const Vec3 t = Vec3::UnitX();
  const double rt = constants::kEarthRadiusKm + altitude_km;
  const double d_tx = std::sqrt(26560.0 * 26560.0 - rt * rt);
  const double d_rx = std::sqrt(4.0e5 * 4.0e5 - rt * rt);
  return {rt * n - d_tx * t, rt * n + d_rx * t};
}

void MediumSample(benchmark::State& state) {
  const media::ReferenceMedium medium;
  const auto wx = baseline_weather();
  const Vec3 pos(7000.0, 2000.0, 1500.0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(medium.sample(pos, wx));
  }
}
BENCHMARK(MediumSample);

void IndexGradient(benchmark::State& state) {
  const media::ReferenceMedium medium;
  const auto wx = baseline_weather();
  const Vec3 pos(7000.0, 2000.0, 1500.0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        media::index_gradient(medium, pos, Vec3::UnitX(), constants::kFreqL1Hz, wx));
  }
}
BENCHMARK(IndexGradient);

void IntegrateRay(benchmark::State& state) {
  const media::ReferenceMedium medium;
  const auto wx = baseline_weather();
  const auto [tx, rx] = grazing_chord(static_cast<double>(state.range(0)));
  const Vec3 dir = (rx - tx).normalized();
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        raytrace::integrate_ray(tx, dir, constants::kFreqL1Hz, medium, wx));
  }
}
BENCHMARK(IntegrateRay)->Arg(200)->Arg(2000)->Arg(10000)->Unit(benchmark::kMillisecond);

void SolveLink(benchmark::State& state) {
  const media::ReferenceMedium medium;
  const auto wx = baseline_weather();
  const auto [tx, rx] = grazing_chord(static_cast<double>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        raytrace::solve_initial_direction(tx, rx, constants::kFreqL1Hz, medium, wx));
  }
}
BENCHMARK(SolveLink)->Arg(200)->Arg(2000)->Arg(10000)->Unit(benchmark::kMillisecond);

void Breakdown(benchmark::State& state) {
  const media::ReferenceMedium medium;
  const auto wx = baseline_weather();
  const auto [tx, rx] = grazing_chord(500.0);
  const auto solved =
      raytrace::solve_initial_direction(tx, rx, constants::kFreqL1Hz, medium, wx);
  for (auto _ : state) {
    benchmark::DoNotOptimize(delays::breakdown(solved, tx, rx, medium, wx));
  }
}
BENCHMARK(Breakdown)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
