#pragma once

#include <cstdint>
#include <span>
#include <string>

#include "starlock/crypto/canonical.hpp"
#include "starlock/crypto/rng.hpp"
#include "starlock/crypto/sha256.hpp"

namespace starlock {

// RFC 4648 base32 of the leading `bits` bits of data, no padding characters.
// A trailing partial group is zero-filled on the right.
inline std::string base32_bits(std::span<const std::uint8_t> data, std::size_t bits) {
  static constexpr char kAlphabet[] = "ABCDEFGHIJKLMNOPQRSTUVWXYZ234567";
  if (bits > data.size() * 8) throw InvalidArgument("base32: not enough input bits");
  std::string out;
  for (std::size_t pos = 0; pos < bits; pos += 5) {
    unsigned v = 0;
    for (std::size_t b = 0; b < 5; ++b) {
      const std::size_t i = pos + b;
      unsigned bit = 0;
      if (i < bits) bit = (data[i / 8] >> (7 - i % 8)) & 1u;
      v = (v << 1) | bit;
    }
    out.push_back(kAlphabet[v]);
  }
  return out;
}

inline constexpr std::size_t kReceiptBits = 100;
inline constexpr std::size_t kReceiptChars = 20;
inline constexpr std::size_t kSerialChars = 26;

// First 100 bits of the chain hash z_i as 20 base32 characters.
inline std::string receipt_code(const Digest& z) { return base32_bits(z, kReceiptBits); }

// 128-bit random ballot serial rendered as 26 base32 characters.
struct BallotSerial {
  std::string text;

  static BallotSerial random(Rng& rng) {
    Bytes raw = rng.bytes(16);
    return {base32_bits(raw, 128)};
  }

  auto operator<=>(const BallotSerial&) const = default;
};

}  // namespace starlock
