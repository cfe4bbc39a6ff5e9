#pragma once

#include <cstdint>
#include <random>

namespace ionqec {

using Rng = std::mt19937_64;

// Independent stream for work item `index` under a run seed.
inline Rng make_stream(std::uint64_t seed, std::uint64_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
  return Rng(seq);
}

// Uniform double in [0, 1) with 53 random bits.
inline double uniform01(Rng& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

// Uniform double in (0, 1).
inline double uniform_open01(Rng& rng) {
  double r = 0.0;
  while (r == 0.0) r = uniform01(rng);
  return r;
}

}  // namespace ionqec
