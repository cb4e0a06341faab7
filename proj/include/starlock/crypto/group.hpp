#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include <json.hpp>

#include "starlock/crypto/bigint.hpp"
#include "starlock/crypto/canonical.hpp"
#include "starlock/crypto/fixed_base.hpp"

namespace starlock {

// Order-q subgroup of Z_p^* for a safe prime p = 2q + 1.
//
// Three fixed parameter sets are provided:
//   TEST  p = 23, q = 11, g = 4: tiny, used for hand-checkable vectors only.
//   SIM   256-bit safe prime: the default for simulations and acceptance runs.
//   PROD  2048-bit RFC 3526 MODP group 14 prime with g = 4.
struct GroupParams {
  BigInt p;
  BigInt q;
  BigInt g;

  // Throws InvalidArgument unless p, q prime, p = 2q+1, g != 1 and g^q = 1.
  void validate() const {
    if (p != 2 * q + 1) throw InvalidArgument("group: p != 2q+1");
    if (!is_probable_prime(q) || !is_probable_prime(p)) throw InvalidArgument("group: p or q not prime");
    if (g <= 1 || g >= p) throw InvalidArgument("group: g out of range");
    if (powm(g, q, p) != 1) throw InvalidArgument("group: g does not have order q");
  }

  // For a safe prime the order-q subgroup is exactly the quadratic residues,
  // so membership is a Jacobi symbol evaluation rather than x^q.
  bool is_element(const BigInt& x) const {
    return x >= 1 && x < p && mpz_jacobi(x.get_mpz_t(), p.get_mpz_t()) == 1;
  }

  bool is_exponent(const BigInt& x) const { return x >= 0 && x < q; }

  BigInt exp(const BigInt& base, const BigInt& e) const { return powm(base, e, p); }

  BigInt gexp(const BigInt& e) const { return fixed_exp(g, e); }

  // Same value as exp(); goes through a cached comb table for the base.
  BigInt fixed_exp(const BigInt& base, const BigInt& e) const {
    const auto table = fixed_base_table(base, p, mpz_sizeinbase(q.get_mpz_t(), 2));
    return table->covers(e) ? table->pow(e) : powm(base, e, p);
  }

  BigInt mul(const BigInt& a, const BigInt& b) const { return mod(BigInt(a * b), p); }

  BigInt div(const BigInt& a, const BigInt& b) const { return mul(a, invert(b, p)); }

  BigInt reduce(const BigInt& e) const { return mod(e, q); }

  void write(CanonicalWriter& w) const { w.field(p).field(q).field(g); }

  bool operator==(const GroupParams&) const = default;

  static const GroupParams& test() {
    static const GroupParams gp{BigInt(23), BigInt(11), BigInt(4)};
    return gp;
  }

  static const GroupParams& sim() {
    static const GroupParams gp{
        BigInt("57896044618658097711785492504343953989466845404616146788981659669546622519459"),
        BigInt("28948022309329048855892746252171976994733422702308073394490829834773311259729"),
        BigInt(4)};
    return gp;
  }

  static const GroupParams& prod() {
    static const GroupParams gp = [] {
      BigInt p(
          "ffffffffffffffffc90fdaa22168c234c4c6628b80dc1cd129024e088a67cc74020bbea63b139b22514a0879"
          "8e3404ddef9519b3cd3a431b302b0a6df25f14374fe1356d6d51c245e485b576625e7ec6f44c42e9a637ed6b"
          "0bff5cb6f406b7edee386bfb5a899fa5ae9f24117c4b1fe649286651ece45b3dc2007cb8a163bf0598da4836"
          "1c55d39a69163fa8fd24cf5f83655d23dca3ad961c62f356208552bb9ed529077096966d670c354e4abc9804"
          "f1746c08ca18217c32905e462e36ce3be39e772c180e86039b2783a2ec07a28fb5c55df06f4c52c9de2bcbf6"
          "955817183995497cea956ae515d2261898fa051015728e5a8aacaa68ffffffffffffffff",
          16);
      return GroupParams{p, BigInt((p - 1) / 2), BigInt(4)};
    }();
    return gp;
  }

  // "TEST", "SIM" or "PROD" (case-sensitive).
  static const GroupParams& named(std::string_view name) {
    if (name == "TEST") return test();
    if (name == "SIM") return sim();
    if (name == "PROD") return prod();
    throw InvalidArgument("unknown group '" + std::string(name) + "' (expected TEST, SIM or PROD)");
  }
};

// Group parameter files: decimal-string p, q, g.
inline nlohmann::json to_json(const GroupParams& gp) {
  return nlohmann::json{{"p", to_dec(gp.p)}, {"q", to_dec(gp.q)}, {"g", to_dec(gp.g)}};
}

inline GroupParams group_from_json(const nlohmann::json& j) {
  try {
    GroupParams gp{from_dec(j.at("p").get<std::string>()), from_dec(j.at("q").get<std::string>()),
                   from_dec(j.at("g").get<std::string>())};
    gp.validate();
    return gp;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("group params: ") + e.what());
  }
}

}  // namespace starlock
