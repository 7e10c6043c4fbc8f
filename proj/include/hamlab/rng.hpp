#pragma once
// Counter-based deterministic random numbers. Every draw is a pure function of
// (seed, stream, counter), so experiments can hand out independent streams to
// grid points or perturbation indices without any shared mutable state, and
// results never depend on evaluation order or thread count.

#include <cstdint>

namespace hamlab {

// SplitMix64 finalizer: good avalanche, standard constants.
inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ull;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

struct CounterRng {
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;

  std::uint64_t bits(std::uint64_t counter) const {
    // Two finalizer rounds decorrelate the three words thoroughly.
    return mix64(mix64(seed ^ 0x5851f42d4c957f2dull * stream) + counter);
  }

  // Uniform in [0, 1): top 53 bits.
  double uniform(std::uint64_t counter) const {
    return static_cast<double>(bits(counter) >> 11) * 0x1.0p-53;
  }

  // Uniform in [lo, hi).
  double uniform(std::uint64_t counter, double lo, double hi) const {
    return lo + (hi - lo) * uniform(counter);
  }

  // Uniform integer in [0, n).
  std::uint64_t pick(std::uint64_t counter, std::uint64_t n) const {
    return bits(counter) % n;
  }
};

// Halton low-discrepancy sequence, radical inverse in the given base.
// Used for quasi-random sampling of oscillation bounds.
inline double halton(std::uint64_t index, unsigned base) {
  double f = 1.0, r = 0.0;
  for (std::uint64_t i = index + 1; i > 0; i /= base) {
    f /= base;
    r += f * static_cast<double>(i % base);
  }
  return r;
}

}  // namespace hamlab
