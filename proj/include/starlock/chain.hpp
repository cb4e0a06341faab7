#pragma once

#include <string>

#include "starlock/ballot.hpp"

namespace starlock {

// z_i = H(c_v || p_v || m || z_{i-1}) over canonical field encodings.
inline Digest chain_hash(const EncryptedBallot& c_v, const WellFormednessProof& p_v, const std::string& terminal_id,
                         const Digest& z_prev) {
  CanonicalWriter w;
  w.nested(canonical(c_v)).nested(canonical(p_v)).field(terminal_id).field(z_prev);
  return w.digest();
}

}  // namespace starlock
