#pragma once

#include <span>
#include <string_view>

#include <json.hpp>

#include "starlock/crypto/elgamal.hpp"
#include "starlock/crypto/fiat_shamir.hpp"

namespace starlock {

// Proof that log_{g1}(h1) = log_{g2}(h2). Used for decryption shares
// (g, vk, a, a^x) and for ballot contest sums (g, A, K, B / g^L).
struct ChaumPedersenProof {
  BigInt commit_a;  // g1^w
  BigInt commit_b;  // g2^w
  BigInt challenge;
  BigInt response;  // w + challenge * x

  void write(CanonicalWriter& w) const { w.field(commit_a).field(commit_b).field(challenge).field(response); }

  bool operator==(const ChaumPedersenProof&) const = default;
};

// Statement (g1, h1, g2, h2) plus caller-provided binding context.
struct DlogEquality {
  BigInt g1, h1, g2, h2;
};

namespace detail {
inline Bytes cp_transcript(const DlogEquality& st, std::span<const std::uint8_t> context, const BigInt& A,
                           const BigInt& B, const GroupParams& gp) {
  CanonicalWriter w;
  gp.write(w);
  w.raw_field(context).field(st.g1).field(st.h1).field(st.g2).field(st.h2).field(A).field(B);
  return w.bytes();
}
}  // namespace detail

inline ChaumPedersenProof prove_dlog_equality(const DlogEquality& st, const BigInt& x, const BigInt& nonce,
                                              std::string_view domain, std::span<const std::uint8_t> context,
                                              const GroupParams& gp) {
  const BigInt A = st.g1 == gp.g ? gp.gexp(nonce) : gp.exp(st.g1, nonce);
  const BigInt B = gp.exp(st.g2, nonce);
  const BigInt c = fiat_shamir_challenge(domain, detail::cp_transcript(st, context, A, B, gp), gp);
  return {A, B, c, gp.reduce(nonce + c * x)};
}

inline bool verify_dlog_equality(const DlogEquality& st, const ChaumPedersenProof& pf, std::string_view domain,
                                 std::span<const std::uint8_t> context, const GroupParams& gp) {
  if (!gp.is_element(pf.commit_a) || !gp.is_element(pf.commit_b)) return false;
  if (!gp.is_exponent(pf.challenge) || !gp.is_exponent(pf.response)) return false;
  const BigInt c = fiat_shamir_challenge(domain, detail::cp_transcript(st, context, pf.commit_a, pf.commit_b, gp), gp);
  if (c != pf.challenge) return false;
  const BigInt lhs = st.g1 == gp.g ? gp.gexp(pf.response) : gp.exp(st.g1, pf.response);
  return lhs == gp.mul(pf.commit_a, gp.exp(st.h1, pf.challenge)) &&
         gp.exp(st.g2, pf.response) == gp.mul(pf.commit_b, gp.exp(st.h2, pf.challenge));
}

// Disjunctive proof that a ciphertext encrypts 0 or 1: an OR of two
// Chaum-Pedersen statements (a, b / g^j) = (g^r, K^r), one of them simulated.
// The branch challenges must sum to the Fiat-Shamir challenge mod q.
struct ZeroOneProof {
  ChaumPedersenProof zero;
  ChaumPedersenProof one;

  void write(CanonicalWriter& w) const {
    CanonicalWriter z, o;
    zero.write(z);
    one.write(o);
    w.nested(z).nested(o);
  }

  bool operator==(const ZeroOneProof&) const = default;
};

namespace detail {
inline Bytes zero_one_transcript(const Ciphertext& c, const BigInt& K, std::span<const std::uint8_t> context,
                                 const BigInt& A0, const BigInt& B0, const BigInt& A1, const BigInt& B1,
                                 const GroupParams& gp) {
  CanonicalWriter w;
  gp.write(w);
  w.raw_field(context).field(K).field(c.a).field(c.b).field(A0).field(B0).field(A1).field(B1);
  return w.bytes();
}
}  // namespace detail

inline constexpr std::string_view kZeroOneDomain = "starlock/zero-one/v1";

// m must be 0 or 1 and c must be encrypt_exp(m, r, K).
inline ZeroOneProof prove_zero_or_one(const Ciphertext& c, int m, const BigInt& r, const BigInt& K,
                                      std::span<const std::uint8_t> context, const GroupParams& gp, Rng& rng) {
  if (m != 0 && m != 1) throw InvalidArgument("zero-one proof of a value other than 0 or 1");
  const BigInt b_over[2] = {c.b, gp.div(c.b, gp.g)};
  const int fake = 1 - m;

  ChaumPedersenProof branch[2];
  // Simulated branch: choose challenge and response, solve for the commitments.
  branch[fake].challenge = rng.below(gp.q);
  branch[fake].response = rng.below(gp.q);
  branch[fake].commit_a = gp.div(gp.gexp(branch[fake].response), gp.exp(c.a, branch[fake].challenge));
  branch[fake].commit_b =
      gp.div(gp.fixed_exp(K, branch[fake].response), gp.exp(b_over[fake], branch[fake].challenge));

  const BigInt w = rng.between(1, gp.q - 1);
  branch[m].commit_a = gp.gexp(w);
  branch[m].commit_b = gp.fixed_exp(K, w);

  const BigInt total = fiat_shamir_challenge(
      kZeroOneDomain,
      detail::zero_one_transcript(c, K, context, branch[0].commit_a, branch[0].commit_b, branch[1].commit_a,
                                  branch[1].commit_b, gp),
      gp);
  branch[m].challenge = gp.reduce(total - branch[fake].challenge);
  branch[m].response = gp.reduce(w + branch[m].challenge * r);
  return {branch[0], branch[1]};
}

inline bool verify_zero_or_one(const Ciphertext& c, const ZeroOneProof& pf, const BigInt& K,
                               std::span<const std::uint8_t> context, const GroupParams& gp) {
  if (!gp.is_element(c.a) || !gp.is_element(c.b)) return false;
  const ChaumPedersenProof* branch[2] = {&pf.zero, &pf.one};
  for (const auto* br : branch) {
    if (!gp.is_element(br->commit_a) || !gp.is_element(br->commit_b)) return false;
    if (!gp.is_exponent(br->challenge) || !gp.is_exponent(br->response)) return false;
  }
  const BigInt total = fiat_shamir_challenge(
      kZeroOneDomain,
      detail::zero_one_transcript(c, K, context, pf.zero.commit_a, pf.zero.commit_b, pf.one.commit_a,
                                  pf.one.commit_b, gp),
      gp);
  if (gp.reduce(pf.zero.challenge + pf.one.challenge) != total) return false;
  const BigInt b_over[2] = {c.b, gp.div(c.b, gp.g)};
  for (int j = 0; j < 2; ++j) {
    const auto& br = *branch[j];
    if (gp.gexp(br.response) != gp.mul(br.commit_a, gp.exp(c.a, br.challenge))) return false;
    if (gp.fixed_exp(K, br.response) != gp.mul(br.commit_b, gp.exp(b_over[j], br.challenge))) return false;
  }
  return true;
}

// JSON forms: all group elements and exponents as lowercase hex.
inline nlohmann::json to_json(const Ciphertext& c) { return {{"a", to_hex(c.a)}, {"b", to_hex(c.b)}}; }

inline Ciphertext ciphertext_from_json(const nlohmann::json& j) {
  return {from_hex(j.at("a").get<std::string>()), from_hex(j.at("b").get<std::string>())};
}

inline nlohmann::json to_json(const ChaumPedersenProof& p) {
  return {{"A", to_hex(p.commit_a)},
          {"B", to_hex(p.commit_b)},
          {"c", to_hex(p.challenge)},
          {"s", to_hex(p.response)}};
}

inline ChaumPedersenProof cp_proof_from_json(const nlohmann::json& j) {
  return {from_hex(j.at("A").get<std::string>()), from_hex(j.at("B").get<std::string>()),
          from_hex(j.at("c").get<std::string>()), from_hex(j.at("s").get<std::string>())};
}

inline nlohmann::json to_json(const ZeroOneProof& p) { return {{"zero", to_json(p.zero)}, {"one", to_json(p.one)}}; }

inline ZeroOneProof zero_one_from_json(const nlohmann::json& j) {
  return {cp_proof_from_json(j.at("zero")), cp_proof_from_json(j.at("one"))};
}

}  // namespace starlock
