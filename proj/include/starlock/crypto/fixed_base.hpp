#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <utility>
#include <vector>

#include "starlock/crypto/bigint.hpp"

namespace starlock {

// Comb table for one base modulo p: entry (i, d) holds base^(d * 2^(w*i)), so
// base^e costs one modular multiplication per w-bit window of e. Worth it for
// bases raised to thousands of exponents (the generator, an election key).
class FixedBaseTable {
 public:
  FixedBaseTable(const BigInt& base, const BigInt& p, std::size_t exp_bits)
      : p_(p), w_(exp_bits <= 512 ? 8 : 4), windows_((exp_bits + w_ - 1) / w_), table_(windows_ << w_) {
    const std::size_t span = std::size_t{1} << w_;
    BigInt step = mod(base, p), tmp;
    for (std::size_t i = 0; i < windows_; ++i) {
      BigInt* row = &table_[i * span];
      row[0] = 1;
      for (std::size_t d = 1; d < span; ++d) mulmod(row[d], row[d - 1], step, tmp);
      mulmod(step, row[span - 1], step, tmp);  // base^(2^(w*(i+1)))
    }
  }

  std::size_t exponent_bits() const { return windows_ * w_; }

  bool covers(const BigInt& e) const { return sgn(e) >= 0 && mpz_sizeinbase(e.get_mpz_t(), 2) <= exponent_bits(); }

  // Caller guarantees covers(e).
  BigInt pow(const BigInt& e) const {
    BigInt r = 1, tmp;
    const std::size_t span = std::size_t{1} << w_;
    const std::size_t per_limb = GMP_NUMB_BITS / w_;
    const mp_limb_t mask = (mp_limb_t{1} << w_) - 1;
    const std::size_t limbs = mpz_size(e.get_mpz_t());
    for (std::size_t i = 0; i < windows_; ++i) {
      const std::size_t limb = i / per_limb;
      if (limb >= limbs) break;
      const mp_limb_t d = (mpz_getlimbn(e.get_mpz_t(), static_cast<mp_size_t>(limb)) >> ((i % per_limb) * w_)) & mask;
      if (d) mulmod(r, r, table_[i * span + d], tmp);
    }
    return r;
  }

 private:
  void mulmod(BigInt& out, const BigInt& a, const BigInt& b, BigInt& tmp) const {
    mpz_mul(tmp.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
    mpz_mod(out.get_mpz_t(), tmp.get_mpz_t(), p_.get_mpz_t());
  }

  BigInt p_;
  std::size_t w_;
  std::size_t windows_;
  std::vector<BigInt> table_;
};

// Process-wide cache keyed by (p, base). Bounded: when full it is emptied,
// which only costs a rebuild for the bases still in use.
inline std::shared_ptr<const FixedBaseTable> fixed_base_table(const BigInt& base, const BigInt& p, std::size_t exp_bits) {
  static constexpr std::size_t kMaxTables = 32;
  static std::mutex mu;
  static std::map<std::pair<BigInt, BigInt>, std::shared_ptr<const FixedBaseTable>> cache;
  std::lock_guard lock(mu);
  auto key = std::make_pair(p, base);
  if (auto it = cache.find(key); it != cache.end()) return it->second;
  if (cache.size() >= kMaxTables) cache.clear();
  auto t = std::make_shared<const FixedBaseTable>(base, p, exp_bits);
  cache.emplace(std::move(key), t);
  return t;
}

}  // namespace starlock
