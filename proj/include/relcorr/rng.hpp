#pragma once

#include <cstdint>

namespace relcorr {

// Deterministic, seedable randomness used for sampling and property tests.
// The pipeline is fixed so estimates are bit-reproducible across platforms
// and implementations:
//
//   splitmix64(x): x += 0x9E3779B97F4A7C15
//                  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9
//                  x = (x ^ (x >> 27)) * 0x94D049BB133111EB
//                  return x ^ (x >> 31)
//
//   xorshift64*(s): s ^= s >> 12; s ^= s << 25; s ^= s >> 27
//                   return s * 0x2545F4914F6CDD1D
//
// Draw i of a stream keyed by `seed` is xorshift64*(splitmix64(seed + i)),
// so any partition of the draw indices yields the same merged sample set.

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

inline std::uint64_t xorshift64star(std::uint64_t s) {
  if (s == 0) s = 0x9E3779B97F4A7C15ULL;  // the all-zero state is absorbing
  s ^= s >> 12;
  s ^= s << 25;
  s ^= s >> 27;
  return s * 0x2545F4914F6CDD1DULL;
}

/// Draw `i` of the stream keyed by `seed`: 64 uniform bits.
inline std::uint64_t sample_bits(std::uint64_t seed, std::uint64_t i) {
  return xorshift64star(splitmix64(seed + i));
}

/// Maps draw `i` to [0, n) by fixed-point multiply (no rejection; the bias
/// is below 2^-40 for any n representable here).
inline std::uint64_t sample_range(std::uint64_t seed, std::uint64_t i,
                                  std::uint64_t n) {
  return static_cast<std::uint64_t>(
      (static_cast<unsigned __int128>(sample_bits(seed, i)) * n) >> 64);
}

/// Draw in [0, 1) with 53-bit resolution.
inline double sample_unit(std::uint64_t seed, std::uint64_t i) {
  return static_cast<double>(sample_bits(seed, i) >> 11) * 0x1.0p-53;
}

/// Small sequential generator for property tests.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : seed_(seed) {}
  std::uint64_t bits() { return sample_bits(seed_, counter_++); }
  std::uint64_t below(std::uint64_t n) {
    return static_cast<std::uint64_t>(
        (static_cast<unsigned __int128>(bits()) * n) >> 64);
  }
  double unit() { return static_cast<double>(bits() >> 11) * 0x1.0p-53; }
  bool chance(double p) { return unit() < p; }

 private:
  std::uint64_t seed_;
  std::uint64_t counter_ = 0;
};

}  // namespace relcorr
