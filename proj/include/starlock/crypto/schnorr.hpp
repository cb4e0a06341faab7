#pragma once

#include <span>

#include <json.hpp>

#include "starlock/crypto/elgamal.hpp"
#include "starlock/crypto/fiat_shamir.hpp"

namespace starlock {

// Schnorr signature in (hash, response) form. The hash is kept at full
// digest width and compared byte-for-byte on verification, so message
// tampering is caught even in tiny groups.
struct SchnorrSignature {
  Digest commit_hash{};
  BigInt response;

  bool operator==(const SchnorrSignature&) const = default;
};

namespace detail {
inline Digest schnorr_hash(const BigInt& commitment, const BigInt& pk, std::span<const std::uint8_t> msg,
                           const GroupParams& gp) {
  CanonicalWriter w;
  w.field("starlock/schnorr/v1");
  gp.write(w);
  w.field(pk).field(commitment).raw_field(msg);
  return w.digest();
}
}  // namespace detail

inline SchnorrSignature sign(std::span<const std::uint8_t> msg, const Keypair& kp, const GroupParams& gp) {
  const BigInt nonce = derive_nonce("starlock/schnorr-nonce/v1", kp.sk, msg, gp);
  const Digest e = detail::schnorr_hash(gp.gexp(nonce), kp.pk, msg, gp);
  const BigInt e_int = gp.reduce(digest_to_int(e));
  return {e, gp.reduce(nonce - e_int * kp.sk)};
}

inline bool verify_sig(std::span<const std::uint8_t> msg, const SchnorrSignature& sig, const BigInt& pk,
                       const GroupParams& gp) {
  if (!gp.is_element(pk) || !gp.is_exponent(sig.response)) return false;
  const BigInt e_int = gp.reduce(digest_to_int(sig.commit_hash));
  const BigInt commitment = gp.mul(gp.gexp(sig.response), gp.exp(pk, e_int));
  return detail::schnorr_hash(commitment, pk, msg, gp) == sig.commit_hash;
}

inline nlohmann::json to_json(const SchnorrSignature& s) {
  return {{"commit", hex(s.commit_hash)}, {"response", to_hex(s.response)}};
}

inline SchnorrSignature signature_from_json(const nlohmann::json& j) {
  return {digest_from_hex(j.at("commit").get<std::string>()), from_hex(j.at("response").get<std::string>())};
}

}  // namespace starlock
