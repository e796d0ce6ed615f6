#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string_view>

namespace simtrack {

inline constexpr std::uint64_t kDefaultSeed = 42;

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Derives an independent seed for a named consumer ("trainer", "synth",
/// "bench", ...) from the single per-run seed.
inline std::uint64_t substream_seed(std::uint64_t seed, std::string_view stream) {
  std::uint64_t h = 0xcbf29ce484222325ULL;  // FNV-1a
  for (char c : stream) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return splitmix64(seed ^ splitmix64(h));
}

using Rng = std::mt19937_64;

inline Rng make_rng(std::uint64_t seed, std::string_view stream) {
  return Rng(substream_seed(seed, stream));
}

// std::uniform_real_distribution and friends are implementation-defined, so
// anything that must reproduce byte-for-byte across toolchains draws through
// these helpers instead.
inline double uniform01(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline double uniform(Rng& rng, double lo, double hi) {
  return lo + (hi - lo) * uniform01(rng);
}

inline double normal(Rng& rng) {
  // Box-Muller; u1 kept away from zero.
  double u1 = uniform01(rng);
  if (u1 < 1e-300) u1 = 1e-300;
  const double u2 = uniform01(rng);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
}

inline bool bernoulli(Rng& rng, double p) { return uniform01(rng) < p; }

}  // namespace simtrack
