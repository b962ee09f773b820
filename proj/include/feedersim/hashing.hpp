#pragma once

#include <bit>
#include <cstdint>
#include <span>
#include <string_view>

namespace feedersim {

// SplitMix64 finalizer. Every random quantity in the simulator is a pure
// function of a key run through this mixer, so results never depend on the
// order entities are generated or simulated in.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept
{
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline constexpr std::uint64_t golden_gamma = 0x9e3779b97f4a7c15ULL;

constexpr std::uint64_t combine(std::uint64_t seed, std::uint64_t value) noexcept
{
  return mix64(seed + golden_gamma + mix64(value));
}

constexpr std::uint64_t fnv1a(std::string_view text) noexcept
{
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (char c : text) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

// Uniform double in [0, 1) with 52 bits of resolution. The SIMD kernels
// reproduce this conversion bit-for-bit, so keep the two in sync.
constexpr double to_unit(std::uint64_t bits) noexcept
{
  return static_cast<double>(bits >> 12) * 0x1p-52;
}

// Counter-based stream: draw number `counter` of the stream keyed by `seed`.
constexpr std::uint64_t stream_bits(std::uint64_t seed, std::uint64_t counter) noexcept
{
  return mix64(seed + (counter + 1) * golden_gamma);
}

constexpr double stream_uniform(std::uint64_t seed, std::uint64_t counter) noexcept
{
  return to_unit(stream_bits(seed, counter));
}

/// FNV-1a over the IEEE-754 bit patterns of a series, little-endian byte order.
inline std::uint64_t hash_doubles(std::span<const double> values,
                                  std::uint64_t h = 0xcbf29ce484222325ULL) noexcept
{
  for (double v : values) {
    auto bits = std::bit_cast<std::uint64_t>(v);
    for (int i = 0; i < 8; ++i) {
      h ^= (bits >> (8 * i)) & 0xffU;
      h *= 0x100000001b3ULL;
    }
  }
  return h;
}

} // namespace feedersim
