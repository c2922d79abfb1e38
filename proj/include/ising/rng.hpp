// Seed derivation and uniform-variate helpers.
//
// Every stochastic component in this project draws from an std::mt19937_64
// whose seed is derived from (base_seed, cell_id, replicate_id) by the
// splittable counter scheme below.  Replicates are therefore independent
// streams that do not depend on evaluation order or thread count.
#pragma once

#include <cstdint>
#include <random>

namespace ising {

// splitmix64 finalizer: bijective 64-bit mixer with good avalanche behaviour.
inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

// Counter scheme: seed(base, cell, rep) = mix(mix(mix(base) ^ g1*(cell+1)) ^ g2*(rep+1)).
// The +1 offsets keep cell 0 / replicate 0 from collapsing onto the base stream.
inline std::uint64_t derive_seed(std::uint64_t base_seed, std::uint64_t cell_id,
                                 std::uint64_t replicate_id) {
  constexpr std::uint64_t g1 = 0xD1B54A32D192ED03ULL;
  constexpr std::uint64_t g2 = 0x8CB92BA72F3D8DD7ULL;
  return mix64(mix64(mix64(base_seed) ^ (g1 * (cell_id + 1))) ^ (g2 * (replicate_id + 1)));
}

using Rng = std::mt19937_64;

inline Rng make_rng(std::uint64_t base_seed, std::uint64_t cell_id = 0,
                    std::uint64_t replicate_id = 0) {
  return Rng(derive_seed(base_seed, cell_id, replicate_id));
}

// Uniform in [0, 1) with 53 random bits; avoids distribution-object overhead
// and is identical across platforms for a given engine state.
inline double uniform01(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Uniform integer in [0, bound) by rejection (no modulo bias).
inline std::uint64_t uniform_below(Rng& rng, std::uint64_t bound) {
  const std::uint64_t limit = std::uint64_t(-1) - std::uint64_t(-1) % bound;
  std::uint64_t x;
  do {
    x = rng();
  } while (x >= limit);
  return x % bound;
}

}  // namespace ising
