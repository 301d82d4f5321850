#pragma once

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <random>

namespace invdes {

// A single 64-bit master seed drives every random decision in the library.
// Independent substreams are derived by hashing the seed together with a
// list of integer keys (e.g. {experiment phase, x1 index, trial}), so trial
// r of an experiment always sees the same stream regardless of evaluation
// order or thread count.
struct RngSeed {
  std::uint64_t value = 0;
};

namespace detail {

constexpr std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace detail

inline RngSeed derive(RngSeed seed, std::initializer_list<std::uint64_t> keys) {
  std::uint64_t s = detail::splitmix64(seed.value);
  for (std::uint64_t k : keys) {
    s = detail::splitmix64(s ^ detail::splitmix64(k + 0x632be59bd9b4e019ULL));
  }
  return RngSeed{s};
}

inline std::mt19937_64 make_stream(RngSeed seed,
                                   std::initializer_list<std::uint64_t> keys = {}) {
  return std::mt19937_64(derive(seed, keys).value);
}

// Uniform on [0, 1). Derived directly from the raw generator output so the
// produced sequence does not depend on the standard library's distribution
// implementation.
inline double uniform01(std::mt19937_64& gen) {
  return static_cast<double>(gen() >> 11) * 0x1.0p-53;
}

inline double uniform_in(std::mt19937_64& gen, double lo, double hi) {
  return lo + (hi - lo) * uniform01(gen);
}

// Standard normal via Box-Muller, two uniforms per draw, no cached spare.
inline double standard_normal(std::mt19937_64& gen) {
  double u1 = uniform01(gen);
  while (u1 == 0.0) u1 = uniform01(gen);
  const double u2 = uniform01(gen);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

}  // namespace invdes
