#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>
#include <string_view>

namespace lpir {

using Rng = std::mt19937_64;

namespace detail {

// splitmix64 finalizer
constexpr std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

constexpr std::uint64_t fnv1a(std::string_view text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (char c : text) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace detail

/// Key of a counter-based random stream: (seed, tag, counters...).
///
/// Every random decision in the library draws from its own stream so that
/// adding or reordering draws elsewhere never shifts an existing schedule.
inline std::uint64_t stream_key(std::uint64_t seed, std::string_view tag,
                                std::initializer_list<std::uint64_t> counters = {}) {
  std::uint64_t h = detail::mix64(seed ^ detail::fnv1a(tag));
  for (std::uint64_t c : counters) {
    h = detail::mix64(h ^ detail::mix64(c + 0x632be59bd9b4e019ULL));
  }
  return h;
}

inline Rng make_stream(std::uint64_t seed, std::string_view tag,
                       std::initializer_list<std::uint64_t> counters = {}) {
  return Rng(stream_key(seed, tag, counters));
}

/// Uniform draw on [0, 1).
inline double uniform01(Rng& rng) { return std::uniform_real_distribution<double>(0.0, 1.0)(rng); }

}  // namespace lpir
