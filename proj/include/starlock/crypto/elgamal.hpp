#pragma once

#include <cstdint>
#include <span>

#include "starlock/crypto/group.hpp"
#include "starlock/crypto/rng.hpp"

namespace starlock {

// Exponential ElGamal ciphertext (g^r, g^m K^r).
struct Ciphertext {
  BigInt a;
  BigInt b;

  // Encryption of zero with r = 0; the neutral element of homomorphic_add.
  static Ciphertext identity() { return {BigInt(1), BigInt(1)}; }

  void write(CanonicalWriter& w) const { w.field(a).field(b); }

  bool operator==(const Ciphertext&) const = default;
};

struct Keypair {
  BigInt sk;
  BigInt pk;

  static Keypair from_secret(const BigInt& sk, const GroupParams& gp) {
    if (sk < 1 || sk >= gp.q) throw InvalidArgument("secret key outside [1, q-1]");
    return {sk, gp.gexp(sk)};
  }

  static Keypair generate(const GroupParams& gp, Rng& rng) {
    return from_secret(rng.between(1, gp.q - 1), gp);
  }
};

inline Ciphertext encrypt_exp(std::uint64_t m, const BigInt& r, const BigInt& K, const GroupParams& gp) {
  if (r == 0) throw InvalidArgument("encryption randomness r = 0");
  if (r < 0 || r >= gp.q) throw InvalidArgument("encryption randomness outside [1, q-1]");
  if (BigInt(static_cast<unsigned long>(m)) >= gp.q) throw InvalidArgument("plaintext outside [0, q-1]");
  return {gp.gexp(r), gp.mul(gp.gexp(BigInt(static_cast<unsigned long>(m))), gp.fixed_exp(K, r))};
}

inline Ciphertext homomorphic_add(const Ciphertext& c1, const Ciphertext& c2, const GroupParams& gp) {
  return {gp.mul(c1.a, c2.a), gp.mul(c1.b, c2.b)};
}

inline Ciphertext homomorphic_sum(std::span<const Ciphertext> cs, const GroupParams& gp) {
  Ciphertext acc = Ciphertext::identity();
  for (const auto& c : cs) acc = homomorphic_add(acc, c, gp);
  return acc;
}

// Smallest m in [0, max_m] with g^m = target. The search is linear, which is
// fine for tallies bounded by the number of voters.
inline std::uint64_t discrete_log_bounded(const BigInt& target, std::uint64_t max_m, const GroupParams& gp) {
  BigInt acc = 1;
  for (std::uint64_t m = 0; m <= max_m; ++m) {
    if (acc == target) return m;
    acc = gp.mul(acc, gp.g);
  }
  throw NoDlogInRange("no m <= " + std::to_string(max_m) + " matches");
}

inline std::uint64_t decrypt_dlog(const Ciphertext& c, const BigInt& sk, std::uint64_t max_m, const GroupParams& gp) {
  return discrete_log_bounded(gp.div(c.b, gp.exp(c.a, sk)), max_m, gp);
}

}  // namespace starlock
