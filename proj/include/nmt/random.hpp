#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace nmt {

using Rng = std::mt19937_64;

// Independent stream for a named purpose under one experiment seed, so that
// adding draws to one stream never shifts another.
inline Rng derive_rng(std::uint64_t seed, std::string_view stream) {
  std::uint64_t h = 1469598103934665603ULL;
  for (char c : stream) {
    h ^= static_cast<unsigned char>(c);
    h *= 1099511628211ULL;
  }
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(h), static_cast<std::uint32_t>(h >> 32)};
  return Rng(seq);
}

}  // namespace nmt
