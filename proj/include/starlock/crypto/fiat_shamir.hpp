#pragma once

#include <span>
#include <string_view>

#include "starlock/crypto/group.hpp"
#include "starlock/crypto/sha256.hpp"

namespace starlock {

// SHA-256(domain_tag || transcript), big-endian, reduced mod q.
inline BigInt fiat_shamir_challenge(std::string_view domain_tag, std::span<const std::uint8_t> transcript,
                                    const GroupParams& gp) {
  Digest d = Sha256().update(domain_tag).update(transcript).finish();
  return gp.reduce(digest_to_int(d));
}

// Deterministic proof nonce bound to a secret and the statement being proved.
inline BigInt derive_nonce(std::string_view domain_tag, const BigInt& secret,
                           std::span<const std::uint8_t> transcript, const GroupParams& gp) {
  CanonicalWriter w;
  w.field(domain_tag).field(secret).raw_field(transcript);
  for (std::uint64_t counter = 0;; ++counter) {
    CanonicalWriter attempt = w;
    attempt.field(counter);
    BigInt k = gp.reduce(digest_to_int(attempt.digest()));
    if (k != 0) return k;
  }
}

}  // namespace starlock
