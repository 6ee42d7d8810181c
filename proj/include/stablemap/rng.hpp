#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace stablemap {

using Engine = std::mt19937_64;

/// Named per-realisation random streams. Each is seeded from
/// (master seed, realisation index, substream) and never shared.
enum class Substream : std::uint64_t {
  initial = 0,  // initial condition of the fast map
  signs = 1,    // skewness signs delta_j
  kicks = 2,    // anti-trapping perturbations
  noise = 3,    // stochastic oracles (CMS draws, Euler-Maruyama increments)
};

namespace detail {

constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace detail

/// Counter-based seed derivation. Injective in practice: each input word is
/// folded through a full-avalanche mixer before the next is absorbed.
constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index,
                                    Substream stream) noexcept {
  std::uint64_t h = detail::splitmix64(master);
  h = detail::splitmix64(h ^ index);
  h = detail::splitmix64(h ^ (static_cast<std::uint64_t>(stream) + 0x632be59bd9b4e019ULL));
  return h;
}

struct RealisationStreams {
  Engine initial;
  Engine signs;
  Engine kicks;
  Engine noise;

  static RealisationStreams derive(std::uint64_t master, std::uint64_t index) {
    return RealisationStreams{Engine{derive_seed(master, index, Substream::initial)},
                              Engine{derive_seed(master, index, Substream::signs)},
                              Engine{derive_seed(master, index, Substream::kicks)},
                              Engine{derive_seed(master, index, Substream::noise)}};
  }
};

/// Uniform on [0, 1) with 53 random bits.
inline double uniform01(Engine& rng) noexcept {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

/// Uniform on the open interval (0, 1).
inline double uniform_open(Engine& rng) noexcept {
  return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53;
}

inline double standard_exponential(Engine& rng) noexcept {
  return -std::log(uniform_open(rng));
}

inline double standard_normal(Engine& rng) {
  std::normal_distribution<double> normal;
  return normal(rng);
}

}  // namespace stablemap
