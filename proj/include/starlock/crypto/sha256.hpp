#pragma once

#include <openssl/evp.h>

#include <array>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <string_view>

#include "starlock/crypto/bigint.hpp"

namespace starlock {

using Digest = std::array<std::uint8_t, 32>;

class Sha256 {
 public:
  Sha256() : ctx_(EVP_MD_CTX_new()) {
    if (!ctx_ || EVP_DigestInit_ex(ctx_.get(), EVP_sha256(), nullptr) != 1)
      throw Error("EVP sha256 init failed");
  }

  Sha256& update(std::span<const std::uint8_t> data) {
    if (!data.empty() && EVP_DigestUpdate(ctx_.get(), data.data(), data.size()) != 1)
      throw Error("EVP sha256 update failed");
    return *this;
  }

  Sha256& update(std::string_view data) {
    return update(std::span(reinterpret_cast<const std::uint8_t*>(data.data()), data.size()));
  }

  Digest finish() {
    Digest out{};
    unsigned int len = 0;
    if (EVP_DigestFinal_ex(ctx_.get(), out.data(), &len) != 1 || len != out.size())
      throw Error("EVP sha256 final failed");
    return out;
  }

 private:
  struct Free {
    void operator()(EVP_MD_CTX* c) const { EVP_MD_CTX_free(c); }
  };
  std::unique_ptr<EVP_MD_CTX, Free> ctx_;
};

inline Digest sha256(std::span<const std::uint8_t> data) { return Sha256().update(data).finish(); }

inline Digest sha256(std::string_view data) { return Sha256().update(data).finish(); }

inline std::string hex(std::span<const std::uint8_t> bytes) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out;
  out.reserve(bytes.size() * 2);
  for (std::uint8_t b : bytes) {
    out.push_back(kDigits[b >> 4]);
    out.push_back(kDigits[b & 0xf]);
  }
  return out;
}

inline Digest digest_from_hex(std::string_view s) {
  if (s.size() != 64) throw ParseError("digest must be 64 hex characters");
  Digest d{};
  auto nibble = [&](char c) -> std::uint8_t {
    if (c >= '0' && c <= '9') return static_cast<std::uint8_t>(c - '0');
    if (c >= 'a' && c <= 'f') return static_cast<std::uint8_t>(c - 'a' + 10);
    throw ParseError("bad digest hex '" + std::string(s) + "'");
  };
  for (std::size_t i = 0; i < d.size(); ++i)
    d[i] = static_cast<std::uint8_t>((nibble(s[2 * i]) << 4) | nibble(s[2 * i + 1]));
  return d;
}

inline BigInt digest_to_int(const Digest& d) { return from_bytes(d); }

}  // namespace starlock
