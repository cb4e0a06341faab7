#pragma once

#include <cstdio>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "starlock/crypto/rng.hpp"
#include "starlock/errors.hpp"

namespace starlock {

enum class TokenState { Active, Redeemed };

struct Token {
  std::string code;  // 5 digits
  std::string ballot_style_id;
  bool provisional = false;
  TokenState state = TokenState::Active;
};

// Judge-station pool of short-lived 5-digit access codes. Only ACTIVE codes
// are tracked; a redeemed code is forgotten and may be issued again. No voter
// identity is ever stored.
class TokenPool {
 public:
  static constexpr std::uint32_t kCodeSpace = 100000;

  Token issue(const std::string& style_id, bool provisional, Rng& rng) {
    if (active_.size() >= kCodeSpace) throw PoolExhausted("all 100000 codes are active");
    std::uint32_t value = 0;
    bool found = false;
    for (int attempt = 0; attempt < 64 && !found; ++attempt) {
      value = static_cast<std::uint32_t>(rng.below(std::uint64_t{kCodeSpace}));
      found = !in_use_[value];
    }
    if (!found) {
      // Dense pool: pick uniformly among the free codes directly.
      std::uint64_t target = rng.below(std::uint64_t{kCodeSpace - active_.size()});
      for (value = 0; value < kCodeSpace; ++value) {
        if (in_use_[value]) continue;
        if (target-- == 0) break;
      }
    }
    in_use_[value] = true;
    Token t{format(value), style_id, provisional, TokenState::Active};
    active_.emplace(t.code, t);
    return t;
  }

  // Invalidates the code and returns the token as it was issued.
  Token redeem(const std::string& code) {
    auto it = active_.find(code);
    if (it == active_.end()) throw UnknownOrSpentToken("code '" + code + "' is not active");
    Token t = it->second;
    t.state = TokenState::Redeemed;
    in_use_[static_cast<std::size_t>(std::stoul(code))] = false;
    active_.erase(it);
    return t;
  }

  bool is_active(const std::string& code) const { return active_.count(code) != 0; }

  std::size_t active_count() const noexcept { return active_.size(); }

 private:
  static std::string format(std::uint32_t v) {
    char buf[8];
    std::snprintf(buf, sizeof buf, "%05u", v);
    return buf;
  }

  std::vector<bool> in_use_ = std::vector<bool>(kCodeSpace, false);
  std::unordered_map<std::string, Token> active_;
};

}  // namespace starlock
