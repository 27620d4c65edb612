#pragma once

#include <cmath>
#include <cstdint>
#include <string_view>

namespace plasmapath::rng {

/// splitmix64: advances the state and returns the next 64-bit value.
inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

/// Uniform double in (0, 1].
inline double uniform_unit(std::uint64_t& state) {
  return static_cast<double>((splitmix64(state) >> 11) + 1) * 0x1.0p-53;
}

/// Standard normal deviate (Box-Muller, one value per call; platform-portable
/// unlike std::normal_distribution).
inline double standard_normal(std::uint64_t& state) {
  const double u1 = uniform_unit(state);
  const double u2 = uniform_unit(state);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

/**
 * Per-link RNG stream id derived from the scenario seed and the task key.
 * Documented contract (README): fold epoch index, transmitter id, receiver
 * id, and frequency label into the seed with FNV-1a over the strings and a
 * splitmix64 scramble between components.
 */
inline std::uint64_t link_stream_seed(std::uint64_t scenario_seed, std::uint64_t epoch_index,
                                      std::string_view tx_id, std::string_view rx_id,
                                      std::string_view freq_label) {
  std::uint64_t h = scenario_seed;
  splitmix64(h);
  h ^= epoch_index;
  splitmix64(h);
  h ^= fnv1a64(tx_id);
  splitmix64(h);
  h ^= fnv1a64(rx_id);
  splitmix64(h);
  h ^= fnv1a64(freq_label);
  splitmix64(h);
  return h;
}

}  // namespace plasmapath::rng
