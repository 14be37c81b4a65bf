#pragma once

#include <cstdint>
#include <span>

#include "seqsandbox/sequence.hpp"

namespace seqsandbox {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t hash_combine(std::uint64_t seed, std::uint64_t value) {
  return splitmix64(seed ^ splitmix64(value));
}

inline std::uint64_t hash_symbols(std::span<const std::uint8_t> symbols, std::uint64_t seed = 0) {
  std::uint64_t h = splitmix64(seed ^ symbols.size());
  for (std::uint8_t s : symbols) h = splitmix64(h ^ (static_cast<std::uint64_t>(s) + 1));
  return h;
}

// Uniform double in [0, 1) from the top 53 bits of a hash.
inline double unit_from_hash(std::uint64_t h) {
  return static_cast<double>(h >> 11) * 0x1.0p-53;
}

// Derives an independent stream seed for a named sub-task.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) {
  return hash_combine(base, stream);
}

inline Rng make_rng(std::uint64_t seed, std::uint64_t stream = 0) {
  return Rng(derive_seed(seed, stream));
}

}  // namespace seqsandbox
