#pragma once

#include <cstdint>
#include <random>

namespace divsched {

/// Deterministic RNG handle. Every stochastic operation takes one of these
/// explicitly; nothing in the library touches global RNG state.
using Rng = std::mt19937_64;

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Derives an independent seed from a base seed and a stream tag, so that
/// adding runs to an experiment grid never perturbs the streams of existing
/// runs. Chainable: derive_seed(derive_seed(s, a), b).
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t tag) {
  return splitmix64(base ^ splitmix64(tag + 0x9e3779b97f4a7c15ULL));
}

inline Rng make_rng(std::uint64_t seed) { return Rng(seed); }

}  // namespace divsched
