#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace cpsim {

// All stochastic components draw from this engine. libstdc++'s
// mt19937_64 is fully specified by the standard, so streams are
// reproducible across builds.
using Rng = std::mt19937_64;

/// SplitMix64 finalizer; used to decorrelate derived seeds.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Seed of substream `index` under `master`.
constexpr std::uint64_t derive_seed(std::uint64_t master,
                                    std::uint64_t index) noexcept {
  return mix64(master ^ mix64(index + 0x632be59bd9b4e019ULL));
}

/// Named substream (FNV-1a of the tag), e.g. "physical", "cyber".
constexpr std::uint64_t derive_seed(std::uint64_t master,
                                    std::string_view tag) noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (char c : tag) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return derive_seed(master, h);
}

/// Uniform double in [0, 1) built from the top 53 bits. Unlike
/// std::uniform_real_distribution the mapping is fixed, and it consumes
/// exactly one engine output per call.
inline double uniform01(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

/// Uniform integer in [0, bound) by Lemire's multiply-shift with rejection.
inline std::uint64_t uniform_below(Rng& rng, std::uint64_t bound) {
  __uint128_t m = static_cast<__uint128_t>(rng()) * bound;
  auto low = static_cast<std::uint64_t>(m);
  if (low < bound) {
    const std::uint64_t threshold = (0 - bound) % bound;
    while (low < threshold) {
      m = static_cast<__uint128_t>(rng()) * bound;
      low = static_cast<std::uint64_t>(m);
    }
  }
  return static_cast<std::uint64_t>(m >> 64);
}

}  // namespace cpsim
