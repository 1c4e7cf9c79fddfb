#pragma once

// Counter-based random numbers: every draw is a pure function of
// (seed, stream, index), so results do not depend on evaluation order or
// thread scheduling. Bits come from two rounds of the SplitMix64 finalizer.

#include <cmath>
#include <cstdint>
#include <numbers>

namespace echoqm::rng {

constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

constexpr std::uint64_t bits(std::uint64_t seed, std::uint64_t stream, std::uint64_t index) noexcept {
  return mix64(mix64(seed ^ mix64(stream * 0xd1b54a32d192ed03ULL)) ^ index);
}

/// Uniform on [0, 1) with 53 random bits.
constexpr double uniform01(std::uint64_t seed, std::uint64_t stream, std::uint64_t index) noexcept {
  return static_cast<double>(bits(seed, stream, index) >> 11) * 0x1.0p-53;
}

/// Uniform on [-bound, bound).
constexpr double uniform_symmetric(double bound, std::uint64_t seed, std::uint64_t stream,
                                   std::uint64_t index) noexcept {
  return bound * (2.0 * uniform01(seed, stream, index) - 1.0);
}

/// Standard normal via Box-Muller on draws 2*index and 2*index + 1.
inline double standard_normal(std::uint64_t seed, std::uint64_t stream, std::uint64_t index) noexcept {
  const double u1 = static_cast<double>((bits(seed, stream, 2 * index) >> 11) + 1) * 0x1.0p-53;  // (0, 1]
  const double u2 = uniform01(seed, stream, 2 * index + 1);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

}  // namespace echoqm::rng
