#pragma once

#include <cstdint>
#include <optional>

namespace relcorr {

// Brute-force arithmetic oracles used to state expected values in the
// bundled case studies. Deliberately independent of the interpreter and of
// the relation machinery: plain loops only.

/// Smallest k >= 0 with k*k >= n.
inline std::int64_t oracle_isqrt_ceil(std::int64_t n) {
  std::int64_t k = 0;
  while (k * k < n) ++k;
  return k;
}

inline bool oracle_perfect_square(std::int64_t n) {
  if (n < 0) return false;
  std::int64_t k = 0;
  while (k * k < n) ++k;
  return k * k == n;
}

/// Smallest x whose square exceeds n by a perfect square, searched up to
/// `bound`; none when no witness exists within the bound.
inline std::optional<std::int64_t> oracle_mu(std::int64_t n,
                                             std::int64_t bound = 1 << 20) {
  for (std::int64_t x = 0; x <= bound; ++x)
    if (x * x >= n && oracle_perfect_square(x * x - n)) return x;
  return std::nullopt;
}

}  // namespace relcorr
