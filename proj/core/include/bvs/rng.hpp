#pragma once

#include <cstdint>
#include <random>

namespace bvs {

using Rng = std::mt19937_64;

// SplitMix64 finalizer. Used to expand one user seed into independent
// sub-streams (chain, cv, sensitivity grid points, folds).
constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Deterministic child seed for stream `stream` of `seed`.
constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) noexcept {
  return splitmix64(splitmix64(seed) ^ splitmix64(stream + 0x632be59bd9b4e019ULL));
}

// Named sub-streams of the manifest seed.
enum class SeedStream : std::uint64_t {
  chain = 1,
  cv = 2,
  sensitivity = 3,
  bma_cv = 4,
};

constexpr std::uint64_t derive_seed(std::uint64_t seed, SeedStream stream) noexcept {
  return derive_seed(seed, static_cast<std::uint64_t>(stream));
}

// Uniform draw on the open interval (0, 1).
inline double uniform_open(Rng& rng) {
  // Midpoints of a 2^-52 grid; both ends are exactly representable.
  const std::uint64_t bits = rng() >> 12;
  return (static_cast<double>(bits) + 0.5) * 0x1.0p-52;
}

inline double standard_normal(Rng& rng) {
  std::normal_distribution<double> dist(0.0, 1.0);
  return dist(rng);
}

}  // namespace bvs
