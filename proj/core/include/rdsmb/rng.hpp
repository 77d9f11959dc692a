#pragma once

// Counter-based randomness. Every random quantity in the library is a pure
// function of a 64-bit seed and an integer counter, so results never depend
// on evaluation order or on how work is split across threads.
//
// Stream derivation (part of the external contract):
//   stream_seed(root, i) = mix64(mix64(root) + 0x9E3779B97F4A7C15 * (i + 1))
// where mix64 is the splitmix64 finaliser.

#include <cstdint>
#include <random>

namespace rdsmb {

inline constexpr std::uint64_t kGoldenGamma = 0x9E3779B97F4A7C15ULL;

constexpr std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

constexpr std::uint64_t stream_seed(std::uint64_t root, std::uint64_t index) {
  return mix64(mix64(root) + kGoldenGamma * (index + 1));
}

// Uniform double in [0, 1) from the top 53 bits.
constexpr double to_unit(std::uint64_t bits) {
  return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

// Engine for sequential draws inside one stream (trajectory, cover sample).
using StreamEngine = std::mt19937_64;

inline StreamEngine make_engine(std::uint64_t root, std::uint64_t index) {
  return StreamEngine(stream_seed(root, index));
}

// Uniform double in [0, 1) drawn from an engine without going through
// std::uniform_real_distribution, whose output is implementation-defined.
inline double next_unit(StreamEngine& engine) { return to_unit(engine()); }

}  // namespace rdsmb
