#pragma once

#include <cstdint>
#include <span>
#include <string_view>

#include "starlock/crypto/bigint.hpp"
#include "starlock/crypto/sha256.hpp"

namespace starlock {

// Canonical byte encoding used for every hash and signature input.
// Each field is a 4-byte big-endian length followed by its bytes; integers
// are big-endian magnitudes. Nested structures are written as a field whose
// content is the nested structure's own canonical encoding.
class CanonicalWriter {
 public:
  CanonicalWriter& raw_field(std::span<const std::uint8_t> data) {
    if (data.size() > 0xffffffffu) throw InvalidArgument("field too long");
    auto n = static_cast<std::uint32_t>(data.size());
    buf_.push_back(static_cast<std::uint8_t>(n >> 24));
    buf_.push_back(static_cast<std::uint8_t>(n >> 16));
    buf_.push_back(static_cast<std::uint8_t>(n >> 8));
    buf_.push_back(static_cast<std::uint8_t>(n));
    buf_.insert(buf_.end(), data.begin(), data.end());
    return *this;
  }

  CanonicalWriter& field(std::string_view text) {
    return raw_field(std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
  }
  // Literals would otherwise be ambiguous between string_view and BigInt.
  CanonicalWriter& field(const char* text) { return field(std::string_view(text)); }

  CanonicalWriter& field(const BigInt& x) { return raw_field(to_bytes(x)); }

  CanonicalWriter& field(std::uint64_t x) { return field(BigInt(static_cast<unsigned long>(x))); }

  CanonicalWriter& field(const Digest& d) { return raw_field(d); }

  CanonicalWriter& nested(const CanonicalWriter& inner) { return raw_field(inner.bytes()); }

  const Bytes& bytes() const noexcept { return buf_; }

  Digest digest() const { return sha256(buf_); }

 private:
  Bytes buf_;
};

}  // namespace starlock
