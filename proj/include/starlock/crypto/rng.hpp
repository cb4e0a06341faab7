#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <string_view>

#include "starlock/crypto/bigint.hpp"
#include "starlock/crypto/canonical.hpp"
#include "starlock/crypto/sha256.hpp"

namespace starlock {

// Explicit, seedable randomness for simulations. mt19937_64's output sequence
// is fixed by the standard, and all bounded draws below use rejection
// sampling instead of std distributions (whose algorithms vary by library),
// so a seed reproduces the same run everywhere.
//
// Simulation-grade only: not a CSPRNG.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : seed_(seed), engine_(seed) {}

  // Derives the 64-bit seed from an arbitrary string (scenario seeds).
  static Rng from_string(std::string_view seed) {
    Digest d = sha256(seed);
    std::uint64_t s = 0;
    for (int i = 0; i < 8; ++i) s = (s << 8) | d[i];
    return Rng(s);
  }

  // Independent child stream; the same (seed, label) always yields the same stream.
  Rng fork(std::string_view label) const {
    Digest d = CanonicalWriter().field("starlock/rng-fork").field(seed_).field(label).digest();
    std::uint64_t s = 0;
    for (int i = 0; i < 8; ++i) s = (s << 8) | d[i];
    return Rng(s);
  }

  std::uint64_t next_u64() { return engine_(); }

  // Uniform in [0, bound).
  std::uint64_t below(std::uint64_t bound) {
    if (bound == 0) throw InvalidArgument("Rng::below with zero bound");
    const std::uint64_t limit = UINT64_MAX - (UINT64_MAX % bound);
    std::uint64_t x = 0;
    do {
      x = engine_();
    } while (x >= limit);
    return x % bound;
  }

  // Uniform in [0, bound) for arbitrary-precision bounds.
  BigInt below(const BigInt& bound) {
    if (bound <= 0) throw InvalidArgument("Rng::below with non-positive bound");
    const std::size_t bits = mpz_sizeinbase(bound.get_mpz_t(), 2);
    const std::size_t words = (bits + 63) / 64;
    for (;;) {
      BigInt x = 0;
      for (std::size_t i = 0; i < words; ++i) {
        x <<= 64;
        x += BigInt(static_cast<unsigned long>(engine_()));
      }
      x >>= static_cast<unsigned long>(words * 64 - bits);
      if (x < bound) return x;
    }
  }

  // Uniform in [lo, hi].
  BigInt between(const BigInt& lo, const BigInt& hi) {
    if (hi < lo) throw InvalidArgument("Rng::between with empty range");
    return lo + below(BigInt(hi - lo + 1));
  }

  Bytes bytes(std::size_t n) {
    Bytes out(n);
    for (std::size_t i = 0; i < n; i += 8) {
      std::uint64_t w = engine_();
      for (std::size_t j = 0; j < 8 && i + j < n; ++j) out[i + j] = static_cast<std::uint8_t>(w >> (8 * j));
    }
    return out;
  }

  // Uniform double in [0, 1) from 53 random bits.
  double unit() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  std::uint64_t seed() const noexcept { return seed_; }

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
};

}  // namespace starlock
