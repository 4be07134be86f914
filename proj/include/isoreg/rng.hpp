#pragma once

#include <cstdint>
#include <random>

namespace isoreg {

/// Private generator for one replicate. Streams depend only on
/// (seed, replicate, lane), never on scheduling.
inline std::mt19937_64 replicate_stream(std::uint64_t seed, std::uint64_t replicate, std::uint32_t lane = 0) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(replicate), static_cast<std::uint32_t>(replicate >> 32), lane};
  return std::mt19937_64(seq);
}

}  // namespace isoreg
