#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "starlock/errors.hpp"

namespace starlock {

using BigInt = mpz_class;
using Bytes = std::vector<std::uint8_t>;

// Big-endian magnitude with no leading zero bytes; zero encodes as empty.
inline Bytes to_bytes(const BigInt& x) {
  if (sgn(x) < 0) throw InvalidArgument("negative integer has no magnitude encoding");
  if (x == 0) return {};
  std::size_t count = 0;
  Bytes out((mpz_sizeinbase(x.get_mpz_t(), 2) + 7) / 8);
  mpz_export(out.data(), &count, 1, 1, 1, 0, x.get_mpz_t());
  out.resize(count);
  return out;
}

inline BigInt from_bytes(std::span<const std::uint8_t> bytes) {
  BigInt x;
  if (!bytes.empty()) mpz_import(x.get_mpz_t(), bytes.size(), 1, 1, 1, 0, bytes.data());
  return x;
}

inline std::string to_hex(const BigInt& x) { return x.get_str(16); }

inline std::string to_dec(const BigInt& x) { return x.get_str(10); }

namespace detail {
inline BigInt parse_base(std::string_view s, int base, const char* what) {
  if (s.empty()) throw ParseError(std::string("empty ") + what);
  for (char ch : s) {
    bool ok = base == 10 ? (ch >= '0' && ch <= '9')
                         : ((ch >= '0' && ch <= '9') || (ch >= 'a' && ch <= 'f'));
    if (!ok) throw ParseError(std::string("bad ") + what + " '" + std::string(s) + "'");
  }
  return BigInt(std::string(s), base);
}
}  // namespace detail

// Lowercase hex only; the wire formats never emit uppercase.
inline BigInt from_hex(std::string_view s) { return detail::parse_base(s, 16, "hex integer"); }

inline BigInt from_dec(std::string_view s) { return detail::parse_base(s, 10, "decimal integer"); }

inline BigInt powm(const BigInt& base, const BigInt& exp, const BigInt& mod) {
  BigInt r;
  mpz_powm(r.get_mpz_t(), base.get_mpz_t(), exp.get_mpz_t(), mod.get_mpz_t());
  return r;
}

inline BigInt mod(const BigInt& x, const BigInt& m) {
  BigInt r;
  mpz_mod(r.get_mpz_t(), x.get_mpz_t(), m.get_mpz_t());
  return r;
}

inline BigInt invert(const BigInt& x, const BigInt& m) {
  BigInt r;
  if (mpz_invert(r.get_mpz_t(), x.get_mpz_t(), m.get_mpz_t()) == 0)
    throw InvalidArgument("value not invertible");
  return r;
}

inline bool is_probable_prime(const BigInt& x, int reps = 30) {
  return mpz_probab_prime_p(x.get_mpz_t(), reps) > 0;
}

}  // namespace starlock
