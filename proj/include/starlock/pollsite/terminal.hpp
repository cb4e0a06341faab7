#pragma once

#include <functional>
#include <set>
#include <string>
#include <utility>

#include "starlock/chain.hpp"
#include "starlock/election.hpp"
#include "starlock/pollsite/records.hpp"

namespace starlock {

// Alters a voter's intent before encryption. Only the cheat-injection tests
// and scenarios install one.
using TamperFn = std::function<PlaintextBallot(const PlaintextBallot&, const BallotStyle&)>;

// The canonical rigging strategy: move the first contest's first selection to
// the next unselected option (an abstention becomes a vote for the first
// option). The result always differs from the input.
inline PlaintextBallot shift_first_contest(const PlaintextBallot& pb, const BallotStyle& style) {
  PlaintextBallot out = pb;
  if (style.contests.empty()) return out;
  const Contest& c = style.contests.front();
  std::set<std::string>& sel = out.selections[c.contest_id];
  std::vector<std::size_t> chosen;
  for (std::size_t i = 0; i < c.options.size(); ++i)
    if (sel.count(c.options[i])) chosen.push_back(i);
  if (chosen.empty()) {
    sel.insert(c.options.front());
    return out;
  }
  const std::size_t first = chosen.front();
  for (std::size_t step = 1; step < c.options.size(); ++step) {
    const std::string& cand = c.options[(first + step) % c.options.size()];
    if (!sel.count(cand)) {
      sel.erase(c.options[first]);
      sel.insert(cand);
      return out;
    }
  }
  sel.erase(c.options[first]);
  return out;
}

struct Production {
  EncryptedBallotRecord record;
  PlaintextBallot encrypted_plaintext;  // what the terminal actually encrypted
};

// Holds only its own chain state; one voter session at a time.
class VotingTerminal {
 public:
  VotingTerminal(std::string id, const ElectionParams& params, Rng rng)
      : id_(std::move(id)), params_(&params), rng_(std::move(rng)), z_prev_(params.z0(id_)) {}

  const std::string& id() const noexcept { return id_; }
  const Digest& z_prev() const noexcept { return z_prev_; }
  std::uint64_t ballots_produced() const noexcept { return produced_; }
  bool busy() const noexcept { return busy_; }
  bool rigged() const noexcept { return static_cast<bool>(tamper_); }

  void rig(TamperFn fn) { tamper_ = std::move(fn); }

  void begin_session() {
    if (busy_) throw TerminalBusy("terminal " + id_ + " already has a voter session");
    busy_ = true;
  }
  void end_session() noexcept { busy_ = false; }

  // Encrypts and chains against z_prev without committing; commit() advances
  // the chain once the judge station has accepted the record.
  Production produce(const PlaintextBallot& intent, const std::string& timestamp) {
    const BallotStyle& style = params_->style(intent.style_id);
    PlaintextBallot actual = tamper_ ? tamper_(intent, style) : intent;
    auto [c_v, p_v] = encrypt_ballot(actual, style, params_->joint_key.K, params_->group, rng_, params_->election_id);
    Digest z = chain_hash(c_v, p_v, id_, z_prev_);
    return {{std::move(c_v), std::move(p_v), id_, z, timestamp}, std::move(actual)};
  }

  void commit(const Digest& z) {
    z_prev_ = z;
    ++produced_;
  }

  BallotSerial new_serial() { return BallotSerial::random(rng_); }

 private:
  std::string id_;
  const ElectionParams* params_;
  Rng rng_;
  Digest z_prev_;
  std::uint64_t produced_ = 0;
  bool busy_ = false;
  TamperFn tamper_;
};

}  // namespace starlock
