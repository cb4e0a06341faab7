#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "starlock/chain.hpp"
#include "starlock/election.hpp"
#include "starlock/pollsite/event_log.hpp"
#include "starlock/pollsite/records.hpp"
#include "starlock/pollsite/tokens.hpp"

namespace starlock {

inline constexpr std::uint64_t kDefaultTtl = 600;

// Single serialization point of the polling place: every state transition is
// applied here, advances the logical clock by one, and is logged.
class JudgeStation {
 public:
  explicit JudgeStation(const ElectionParams& params) : params_(&params) {}

  std::uint64_t now() const noexcept { return clock_; }
  const EventLog& log() const noexcept { return log_; }
  const TokenPool& tokens() const noexcept { return tokens_; }
  bool closed() const noexcept { return closed_; }

  Token issue_token(const std::string& style_id, bool provisional, Rng& rng) {
    open_only();
    params_->style(style_id);
    Token t = tokens_.issue(style_id, provisional, rng);
    record_event("token_issued", {{"code", t.code}, {"style", style_id}, {"provisional", provisional}});
    return t;
  }

  Token redeem_token(const std::string& code, const std::string& terminal_id) {
    open_only();
    Token t = tokens_.redeem(code);
    record_event("token_redeemed", {{"code", code}, {"terminal", terminal_id}});
    return t;
  }

  // Returns false if the serial is already taken; the terminal then retries.
  bool receive_ballot(const BallotSerial& serial, const EncryptedBallotRecord& rec, bool provisional,
                      const PlaintextBallot& cvr) {
    open_only();
    if (!params_->has_terminal(rec.terminal_id)) throw InvalidArgument("unknown terminal " + rec.terminal_id);
    if (records_.count(serial)) return false;
    BallotRecord br;
    br.serial = serial;
    br.record = rec;
    br.status = provisional ? BallotStatus::ProvisionalPending : BallotStatus::Pending;
    br.produced_at = clock_;
    br.provisional = provisional;
    record_event("ballot_received", {{"serial", serial.text},
                                     {"record", to_json(rec)},
                                     {"provisional", provisional},
                                     {"status", to_string(br.status)}});
    order_.push_back(serial);
    records_.emplace(serial, std::move(br));
    cvrs_.emplace(serial, cvr);
    ++produced_[rec.terminal_id];
    return true;
  }

  void cast(const BallotSerial& serial) {
    BallotRecord& r = find(serial);
    if (r.status == BallotStatus::ProvisionalPending) throw NotProvisional("provisional ballot " + serial.text + " must be adjudicated");
    if (r.status != BallotStatus::Pending) throw AlreadyFinalized("ballot " + serial.text + " is " + to_string(r.status));
    r.status = BallotStatus::Cast;
    record_event("cast", {{"serial", serial.text}});
  }

  void spoil(const BallotSerial& serial, SpoilReason reason) {
    BallotRecord& r = find(serial);
    if (r.status == BallotStatus::ProvisionalPending) throw NotProvisional("provisional ballot " + serial.text + " must be adjudicated");
    if (r.status != BallotStatus::Pending) throw AlreadyFinalized("ballot " + serial.text + " is " + to_string(r.status));
    r.status = BallotStatus::Spoiled;
    r.spoil_reason = reason;
    record_event("spoiled", {{"serial", serial.text}, {"reason", to_string(reason)}});
  }

  std::vector<BallotSerial> timeout_sweep(std::uint64_t now, std::uint64_t ttl = kDefaultTtl) {
    std::vector<BallotSerial> out;
    for (const auto& s : order_) {
      const BallotRecord& r = records_.at(s);
      if (r.status == BallotStatus::Pending && now > r.produced_at && now - r.produced_at > ttl) out.push_back(s);
    }
    for (const auto& s : out) spoil(s, SpoilReason::Timeout);
    return out;
  }

  BallotStatus provisional_flow(const BallotSerial& serial, Adjudication decision) {
    BallotRecord& r = find(serial);
    if (r.status != BallotStatus::ProvisionalPending) throw NotProvisional("ballot " + serial.text + " is not provisional-pending");
    r.status = decision == Adjudication::Accept ? BallotStatus::Cast : BallotStatus::Spoiled;
    record_event("adjudicated", {{"serial", serial.text},
                                 {"decision", decision == Adjudication::Accept ? "ACCEPT" : "REJECT"},
                                 {"status", to_string(r.status)}});
    return r.status;
  }

  // Polls close: terminals report their final z, and every record still
  // awaiting a decision can no longer be cast.
  void close(const std::map<std::string, std::pair<Digest, std::uint64_t>>& finals) {
    open_only();
    for (const auto& [m, fz] : finals)
      record_event("terminal_closed", {{"terminal", m}, {"final_z", hex(fz.first)}, {"count", std::to_string(fz.second)}});
    for (const auto& s : order_) {
      BallotRecord& r = records_.at(s);
      if (r.status == BallotStatus::Pending || r.status == BallotStatus::ProvisionalPending) {
        r.status = BallotStatus::Untallied;
        record_event("untallied", {{"serial", s.text}, {"cause", "polls_closed"}});
      }
    }
    closed_ = true;
  }

  // Compliance reconciliation: an electronic CAST record with no paper.
  void demote_untallied(const BallotSerial& serial) {
    BallotRecord& r = find(serial);
    if (r.status != BallotStatus::Cast) throw InvalidArgument("only CAST records are demoted");
    r.status = BallotStatus::Untallied;
    record_event("untallied", {{"serial", serial.text}, {"cause", "no_paper"}});
  }

  const BallotRecord& record(const BallotSerial& serial) const {
    auto it = records_.find(serial);
    if (it == records_.end()) throw UnknownSerial("no ballot with serial " + serial.text);
    return it->second;
  }
  bool has_record(const BallotSerial& serial) const { return records_.count(serial) != 0; }

  // Records in production (arrival) order.
  std::vector<const BallotRecord*> records() const {
    std::vector<const BallotRecord*> out;
    for (const auto& s : order_) out.push_back(&records_.at(s));
    return out;
  }

  // The machine interpretation of each record, retained for the audit.
  const PlaintextBallot& cvr(const BallotSerial& serial) const { return cvrs_.at(serial); }

  std::uint64_t produced_by(const std::string& terminal_id) const {
    auto it = produced_.find(terminal_id);
    return it == produced_.end() ? 0 : it->second;
  }

  std::map<BallotStatus, std::uint64_t> status_counts(const std::string& terminal_id) const {
    std::map<BallotStatus, std::uint64_t> out;
    for (const auto& s : order_) {
      const BallotRecord& r = records_.at(s);
      if (r.record.terminal_id == terminal_id) ++out[r.status];
    }
    return out;
  }

 private:
  void open_only() const {
    if (closed_) throw InvariantViolation("polls are closed");
  }

  BallotRecord& find(const BallotSerial& serial) {
    auto it = records_.find(serial);
    if (it == records_.end()) throw UnknownSerial("no ballot with serial " + serial.text);
    return it->second;
  }

  void record_event(std::string type, nlohmann::json payload) { log_.append(std::move(type), std::move(payload), ++clock_); }

  const ElectionParams* params_;
  TokenPool tokens_;
  EventLog log_;
  std::uint64_t clock_ = 0;
  bool closed_ = false;
  std::map<BallotSerial, BallotRecord> records_;
  std::map<BallotSerial, PlaintextBallot> cvrs_;
  std::vector<BallotSerial> order_;
  std::map<std::string, std::uint64_t> produced_;
};

struct LogFinding {
  std::uint64_t clock;
  std::string detail;
};

struct ChainMismatch {
  std::string terminal_id;
  std::uint64_t ordinal;  // 0-based position within that terminal's chain
  std::string detail;
};

// Replays every ballot_received event, recomputing each terminal's chain from
// z_0, and checks the close records.
inline std::vector<ChainMismatch> replay_chain(const EventLog& log, const ElectionParams& params) {
  std::map<std::string, Digest> prev;
  std::map<std::string, std::uint64_t> count;
  std::map<std::string, bool> broken;
  std::vector<ChainMismatch> out;
  auto fail = [&](const std::string& m, std::uint64_t ordinal, std::string detail) {
    if (broken[m]) return;
    broken[m] = true;
    out.push_back({m, ordinal, std::move(detail)});
  };
  for (const auto& e : log.events()) {
    if (e.type == "ballot_received") {
      EncryptedBallotRecord rec = encrypted_record_from_json(e.payload.at("record"));
      const std::string& m = rec.terminal_id;
      if (!prev.count(m)) prev[m] = params.z0(m);
      const Digest z = chain_hash(rec.c_v, rec.p_v, m, prev[m]);
      if (z != rec.z) fail(m, count[m], "recomputed z differs from recorded z");
      prev[m] = z;
      ++count[m];
    } else if (e.type == "terminal_closed") {
      const std::string m = e.payload.at("terminal").get<std::string>();
      const Digest final_z = digest_from_hex(e.payload.at("final_z").get<std::string>());
      const Digest expect = prev.count(m) ? prev[m] : params.z0(m);
      const std::uint64_t n = std::stoull(e.payload.at("count").get<std::string>());
      if (final_z != expect || n != count[m]) fail(m, count[m], "closing z or count does not match replayed chain");
    }
  }
  return out;
}

// Prefix-by-prefix checks over the log: legal status transitions, per-terminal
// conservation and token single use.
inline std::vector<LogFinding> check_event_log(const EventLog& log) {
  std::vector<LogFinding> out;
  std::map<std::string, std::string> status;      // serial -> status
  std::map<std::string, std::string> owner;       // serial -> terminal
  std::map<std::string, std::uint64_t> produced;  // terminal -> count
  std::map<std::string, int> active_codes;        // code -> outstanding issues
  for (const auto& e : log.events()) {
    const auto& p = e.payload;
    if (e.type == "token_issued") {
      if (active_codes[p.at("code").get<std::string>()]++ != 0) out.push_back({e.clock, "code issued while active"});
    } else if (e.type == "token_redeemed") {
      if (active_codes[p.at("code").get<std::string>()]-- != 1) out.push_back({e.clock, "code redeemed without issue"});
    } else if (e.type == "ballot_received") {
      const std::string s = p.at("serial").get<std::string>();
      if (status.count(s)) out.push_back({e.clock, "duplicate serial " + s});
      status[s] = p.at("status").get<std::string>();
      owner[s] = p.at("record").at("terminal").get<std::string>();
      ++produced[owner[s]];
    } else if (e.type == "cast" || e.type == "spoiled") {
      const std::string s = p.at("serial").get<std::string>();
      if (status[s] != "PENDING") out.push_back({e.clock, "illegal transition from " + status[s]});
      status[s] = e.type == "cast" ? "CAST" : "SPOILED";
    } else if (e.type == "adjudicated") {
      const std::string s = p.at("serial").get<std::string>();
      if (status[s] != "PROVISIONAL_PENDING") out.push_back({e.clock, "adjudication of non-provisional " + s});
      status[s] = p.at("status").get<std::string>();
    } else if (e.type == "untallied") {
      const std::string s = p.at("serial").get<std::string>();
      const bool closing = p.at("cause") == "polls_closed";
      const bool ok = closing ? (status[s] == "PENDING" || status[s] == "PROVISIONAL_PENDING") : status[s] == "CAST";
      if (!ok) out.push_back({e.clock, "illegal demotion of " + s});
      status[s] = "UNTALLIED";
    }
    std::map<std::string, std::uint64_t> attributed;
    for (const auto& [s, st] : status)
      if (!st.empty()) ++attributed[owner[s]];
    if (attributed != produced) out.push_back({e.clock, "conservation violated"});
  }
  return out;
}

}  // namespace starlock
