// Apache License, Version 2.0, refer to LICENSE.txt

#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace hbmlab {

// SplitMix64 finalizer (Steele, Lea, Flood 2014). Bijective on 64-bit words.
constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

// 64-bit FNV-1a over raw bytes.
constexpr std::uint64_t fnv1a64(std::string_view bytes) noexcept {
  std::uint64_t h = 0xCBF29CE484222325ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001B3ull;
  }
  return h;
}

/// Seed of an independent stream identified by (base_seed, role, index):
///
///   derive_seed = splitmix64(splitmix64(base_seed XOR fnv1a64(role)) + index)
///
/// with 64-bit wrap-around arithmetic. Distinct roles and indices give
/// distinct streams with overwhelming probability.
constexpr std::uint64_t derive_seed(std::uint64_t base_seed,
                                    std::string_view role,
                                    std::uint64_t index) noexcept {
  return splitmix64(splitmix64(base_seed ^ fnv1a64(role)) + index);
}

/// Seeded pseudo-random stream. One instance per chain / run / replicate;
/// streams are separated by deriving their seeds with replicate_seed().
///
/// The engine is std::mt19937_64. Uniform variates are built from the top
/// 53 bits of each engine output so the mapping does not depend on the
/// standard library's distribution implementations.
class Rng {
 public:
  using engine_type = std::mt19937_64;

  explicit Rng(std::uint64_t seed) : engine_(splitmix64(seed)) {}

  // Uniform on [0, 1) with 2^-53 resolution.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  bool bernoulli(double p) { return uniform() < p; }

  // Uniform integer in [0, bound), modulo with rejection of the biased tail.
  std::uint64_t below(std::uint64_t bound) {
    if (bound <= 1) return 0;
    const std::uint64_t tail = (0 - bound) % bound;  // 2^64 mod bound
    for (;;) {
      const std::uint64_t r = engine_();
      if (r <= ~std::uint64_t{0} - tail) return r % bound;
    }
  }

  engine_type& engine() { return engine_; }

 private:
  engine_type engine_;
};

}  // namespace hbmlab
