#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "starlock/crypto/proofs.hpp"

namespace starlock {

// Threshold ("two-step") keys use a dealer-run Feldman VSS polynomial of
// degree k-1; commitments are g^{a_j} for its coefficients.
// Additive ("one-step") keys are used when k == n: each trustee holds its own
// keypair and commitments are the n trustee public keys.
enum class KeyScheme { Threshold, Additive };

inline std::string to_string(KeyScheme s) { return s == KeyScheme::Threshold ? "threshold" : "additive"; }

inline KeyScheme key_scheme_from_string(const std::string& s) {
  if (s == "threshold") return KeyScheme::Threshold;
  if (s == "additive") return KeyScheme::Additive;
  throw ParseError("unknown key scheme '" + s + "'");
}

struct JointPublicKey {
  BigInt K;
  std::uint32_t n = 0;
  std::uint32_t k = 0;
  KeyScheme scheme = KeyScheme::Threshold;
  std::vector<BigInt> commitments;

  // g^{secret share of trustee id}, computable from public data alone.
  BigInt verification_key(std::uint32_t id, const GroupParams& gp) const {
    if (id < 1 || id > n) throw InvalidArgument("trustee id " + std::to_string(id) + " outside [1, n]");
    if (scheme == KeyScheme::Additive) return commitments.at(id - 1);
    BigInt acc = 1;
    BigInt power = 1;  // id^j mod q
    for (const auto& c : commitments) {
      acc = gp.mul(acc, gp.exp(c, power));
      power = gp.reduce(power * id);
    }
    return acc;
  }

  void validate(const GroupParams& gp) const {
    if (k < 1 || k > n) throw InvalidThreshold("k=" + std::to_string(k) + " n=" + std::to_string(n));
    if (!gp.is_element(K)) throw InvalidArgument("joint key not in subgroup");
    for (const auto& c : commitments)
      if (!gp.is_element(c)) throw InvalidArgument("commitment not in subgroup");
    if (scheme == KeyScheme::Threshold) {
      if (commitments.size() != k || commitments.front() != K)
        throw InvalidArgument("threshold key: expected k commitments with C_0 = K");
    } else {
      if (k != n || commitments.size() != n) throw InvalidArgument("additive key: expected k = n commitments");
      BigInt prod = 1;
      for (const auto& c : commitments) prod = gp.mul(prod, c);
      if (prod != K) throw InvalidArgument("additive key: K != product of trustee keys");
    }
  }

  void write(CanonicalWriter& w) const {
    CanonicalWriter cs;
    for (const auto& c : commitments) cs.field(c);
    w.field(K).field(static_cast<std::uint64_t>(n)).field(static_cast<std::uint64_t>(k)).field(to_string(scheme)).nested(cs);
  }

  bool operator==(const JointPublicKey&) const = default;
};

struct TrusteeShare {
  std::uint32_t trustee_id = 0;
  BigInt secret_share;
  std::vector<BigInt> verification_commitments;
};

struct DecryptionShare {
  std::uint32_t trustee_id = 0;
  BigInt share_value;  // a^{secret share}
  ChaumPedersenProof proof;

  bool operator==(const DecryptionShare&) const = default;
};

namespace detail {
inline constexpr std::string_view kDecryptionDomain = "starlock/decryption-share/v1";

inline Bytes decryption_context(std::uint32_t trustee_id, const Ciphertext& c) {
  CanonicalWriter w;
  w.field(static_cast<std::uint64_t>(trustee_id)).field(c.a).field(c.b);
  return w.bytes();
}

inline BigInt eval_poly(const std::vector<BigInt>& coeffs, std::uint32_t x, const GroupParams& gp) {
  BigInt acc = 0;
  for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) acc = gp.reduce(acc * x + *it);
  return acc;
}
}  // namespace detail

// Lagrange coefficient at 0 for evaluation point id over the given id set, mod q.
inline BigInt lagrange_coefficient(std::uint32_t id, std::span<const std::uint32_t> ids, const GroupParams& gp) {
  BigInt num = 1, den = 1;
  for (std::uint32_t j : ids) {
    if (j == id) continue;
    num = gp.reduce(num * j);
    den = gp.reduce(den * (BigInt(j) - BigInt(id)));
  }
  return gp.reduce(num * invert(den, gp.q));
}

inline std::pair<JointPublicKey, std::vector<TrusteeShare>> dkg(std::uint32_t n, std::uint32_t k,
                                                                const GroupParams& gp, Rng& rng) {
  if (k < 1 || k > n || n > 16)
    throw InvalidThreshold("need 1 <= k <= n <= 16, got k=" + std::to_string(k) + " n=" + std::to_string(n));
  if (BigInt(n) >= gp.q) throw InvalidThreshold("n must be below the group order");

  JointPublicKey jpk;
  jpk.n = n;
  jpk.k = k;
  std::vector<TrusteeShare> shares;

  if (k == n) {
    jpk.scheme = KeyScheme::Additive;
    std::vector<BigInt> secrets;
    for (std::uint32_t i = 0; i < n; ++i) {
      Keypair kp = Keypair::generate(gp, rng);
      secrets.push_back(kp.sk);
      jpk.commitments.push_back(kp.pk);
    }
    jpk.K = 1;
    for (const auto& c : jpk.commitments) jpk.K = gp.mul(jpk.K, c);
    for (std::uint32_t i = 0; i < n; ++i) shares.push_back({i + 1, secrets[i], jpk.commitments});
  } else {
    jpk.scheme = KeyScheme::Threshold;
    std::vector<BigInt> coeffs;
    coeffs.push_back(rng.between(1, gp.q - 1));
    for (std::uint32_t j = 1; j < k; ++j) coeffs.push_back(rng.below(gp.q));
    for (const auto& a : coeffs) jpk.commitments.push_back(gp.gexp(a));
    jpk.K = jpk.commitments.front();
    for (std::uint32_t i = 1; i <= n; ++i) shares.push_back({i, detail::eval_poly(coeffs, i, gp), jpk.commitments});
    // The dealer keeps nothing once shares are handed out.
    for (auto& a : coeffs) a = 0;
    coeffs.clear();
  }
  return {std::move(jpk), std::move(shares)};
}

// True iff g^secret_share matches the public verification key for this trustee.
inline bool share_is_consistent(const TrusteeShare& share, const JointPublicKey& jpk, const GroupParams& gp) {
  return share.verification_commitments == jpk.commitments &&
         gp.gexp(share.secret_share) == jpk.verification_key(share.trustee_id, gp);
}

inline DecryptionShare partial_decrypt(const Ciphertext& c, const TrusteeShare& share, const GroupParams& gp) {
  const BigInt value = gp.exp(c.a, share.secret_share);
  const DlogEquality st{gp.g, gp.gexp(share.secret_share), c.a, value};
  const Bytes ctx = detail::decryption_context(share.trustee_id, c);
  const BigInt nonce = derive_nonce("starlock/decryption-nonce/v1", share.secret_share, ctx, gp);
  return {share.trustee_id, value, prove_dlog_equality(st, share.secret_share, nonce, detail::kDecryptionDomain, ctx, gp)};
}

inline bool verify_decryption_share(const Ciphertext& c, const DecryptionShare& ds, const BigInt& verification_key,
                                    const GroupParams& gp) {
  if (!gp.is_element(ds.share_value)) return false;
  const DlogEquality st{gp.g, verification_key, c.a, ds.share_value};
  return verify_dlog_equality(st, ds.proof, detail::kDecryptionDomain, detail::decryption_context(ds.trustee_id, c), gp);
}

// Combines verified shares into a^{joint secret}. Uses the k lowest distinct
// trustee ids supplied (all n for additive keys). Throws InsufficientShares or
// BadShareProof naming the first offending trustee.
inline BigInt combine_decryption_factor(const Ciphertext& c, std::span<const DecryptionShare> shares,
                                        const JointPublicKey& jpk, const GroupParams& gp) {
  std::map<std::uint32_t, const DecryptionShare*> by_id;
  for (const auto& s : shares) by_id.emplace(s.trustee_id, &s);
  const std::uint32_t needed = jpk.scheme == KeyScheme::Additive ? jpk.n : jpk.k;
  if (by_id.size() < needed)
    throw InsufficientShares("have " + std::to_string(by_id.size()) + " distinct shares, need " + std::to_string(needed));

  std::vector<std::uint32_t> ids;
  for (const auto& [id, s] : by_id) {
    if (ids.size() == needed) break;
    if (!verify_decryption_share(c, *s, jpk.verification_key(id, gp), gp)) throw BadShareProof(id);
    ids.push_back(id);
  }
  BigInt factor = 1;
  for (std::uint32_t id : ids) {
    const BigInt exponent = jpk.scheme == KeyScheme::Additive ? BigInt(1) : lagrange_coefficient(id, ids, gp);
    factor = gp.mul(factor, gp.exp(by_id.at(id)->share_value, exponent));
  }
  return factor;
}

inline std::uint64_t combine_shares(const Ciphertext& c, std::span<const DecryptionShare> shares,
                                    const JointPublicKey& jpk, std::uint64_t max_m, const GroupParams& gp) {
  const BigInt factor = combine_decryption_factor(c, shares, jpk, gp);
  return discrete_log_bounded(gp.div(c.b, factor), max_m, gp);
}

// Reconstructs the joint secret from secret shares (test and ceremony-audit use only).
inline BigInt reconstruct_secret(std::span<const TrusteeShare> shares, KeyScheme scheme, const GroupParams& gp) {
  BigInt acc = 0;
  std::vector<std::uint32_t> ids;
  for (const auto& s : shares) ids.push_back(s.trustee_id);
  for (const auto& s : shares) {
    const BigInt lambda = scheme == KeyScheme::Additive ? BigInt(1) : lagrange_coefficient(s.trustee_id, ids, gp);
    acc = gp.reduce(acc + lambda * s.secret_share);
  }
  return acc;
}

// --- JSON file formats -------------------------------------------------------

inline nlohmann::json to_json(const JointPublicKey& jpk, const GroupParams& gp) {
  nlohmann::json cs = nlohmann::json::array();
  for (const auto& c : jpk.commitments) cs.push_back(to_hex(c));
  return {{"K", to_hex(jpk.K)},
          {"n", std::to_string(jpk.n)},
          {"k", std::to_string(jpk.k)},
          {"scheme", to_string(jpk.scheme)},
          {"commitments", cs},
          {"group", to_json(gp)}};
}

namespace detail {
inline std::uint32_t u32_field(const nlohmann::json& j, const char* key) {
  const auto& v = j.at(key);
  if (v.is_number_unsigned()) return v.get<std::uint32_t>();
  return static_cast<std::uint32_t>(std::stoul(v.get<std::string>()));
}
}  // namespace detail

inline JointPublicKey joint_key_from_json(const nlohmann::json& j) {
  try {
    JointPublicKey jpk;
    jpk.K = from_hex(j.at("K").get<std::string>());
    jpk.n = detail::u32_field(j, "n");
    jpk.k = detail::u32_field(j, "k");
    jpk.scheme = key_scheme_from_string(j.at("scheme").get<std::string>());
    for (const auto& c : j.at("commitments")) jpk.commitments.push_back(from_hex(c.get<std::string>()));
    return jpk;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("joint key: ") + e.what());
  }
}

inline nlohmann::json to_json(const TrusteeShare& s) {
  nlohmann::json cs = nlohmann::json::array();
  for (const auto& c : s.verification_commitments) cs.push_back(to_hex(c));
  return {{"trustee_id", std::to_string(s.trustee_id)}, {"secret_share", to_hex(s.secret_share)}, {"commitments", cs}};
}

inline TrusteeShare trustee_share_from_json(const nlohmann::json& j) {
  try {
    TrusteeShare s;
    s.trustee_id = detail::u32_field(j, "trustee_id");
    s.secret_share = from_hex(j.at("secret_share").get<std::string>());
    for (const auto& c : j.at("commitments")) s.verification_commitments.push_back(from_hex(c.get<std::string>()));
    return s;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("trustee share: ") + e.what());
  }
}

inline nlohmann::json to_json(const DecryptionShare& d) {
  return {{"trustee", std::to_string(d.trustee_id)}, {"value", to_hex(d.share_value)}, {"proof", to_json(d.proof)}};
}

inline DecryptionShare decryption_share_from_json(const nlohmann::json& j) {
  return {detail::u32_field(j, "trustee"), from_hex(j.at("value").get<std::string>()), cp_proof_from_json(j.at("proof"))};
}

}  // namespace starlock
