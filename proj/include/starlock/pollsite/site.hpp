#pragma once

#include <deque>
#include <exception>
#include <map>
#include <memory>
#include <string>
#include <variant>
#include <vector>

#include "starlock/pollsite/bus.hpp"
#include "starlock/pollsite/judge_station.hpp"
#include "starlock/pollsite/terminal.hpp"

namespace starlock {

// Wire messages between terminals, the ballot-box scanner and the judge
// station. Replies carry judge-side failures as exception_ptr so the caller
// sees the original error type.
struct RedeemRequest {
  std::string code;
};
struct RedeemReply {
  std::optional<Token> token;
  std::exception_ptr error;
  std::uint64_t clock = 0;
};
struct BallotSubmission {
  BallotSerial serial;
  EncryptedBallotRecord record;
  bool provisional = false;
  PlaintextBallot cvr;
};
struct SubmissionAck {
  BallotSerial serial;
  bool accepted = false;
  std::exception_ptr error;
};
struct ScanNotice {
  BallotSerial serial;
};
struct ScanAck {
  BallotSerial serial;
  std::exception_ptr error;
};

using SiteMessage = std::variant<RedeemRequest, RedeemReply, BallotSubmission, SubmissionAck, ScanNotice, ScanAck>;

inline constexpr const char* kJudgeEndpoint = "judge";
inline constexpr const char* kScannerEndpoint = "scanner";

struct SessionOutcome {
  BallotRecord record;
  Receipt receipt;
  PrintedSummary summary;
};

struct CloseResult {
  std::map<std::string, std::pair<Digest, std::uint64_t>> finals;  // terminal -> (final z, count)
};

// One polling place: judge station, terminals, scanner and the two physical
// boxes, wired over a (possibly faulty) message bus.
class PollSite {
 public:
  PollSite(ElectionParams params, Rng rng, std::shared_ptr<FaultInjector> faults = std::make_shared<NoFaults>())
      : params_(std::move(params)), rng_(std::move(rng)), judge_(params_), bus_(std::move(faults)) {
    params_.validate();
    bus_.attach(kJudgeEndpoint, [this](const std::string& from, const SiteMessage& msg) { on_judge(from, msg); });
    bus_.attach(kScannerEndpoint, [this](const std::string&, const SiteMessage& msg) { inbox_[kScannerEndpoint].push_back(msg); });
    for (const auto& m : params_.terminals) {
      terminals_.emplace(m, std::make_unique<VotingTerminal>(m, params_, rng_.fork("terminal/" + m)));
      bus_.attach(m, [this, m](const std::string&, const SiteMessage& msg) { inbox_[m].push_back(msg); });
    }
  }

  PollSite(const PollSite&) = delete;
  PollSite& operator=(const PollSite&) = delete;

  const ElectionParams& params() const noexcept { return params_; }
  JudgeStation& judge() noexcept { return judge_; }
  const JudgeStation& judge() const noexcept { return judge_; }
  const BusStats& bus_stats() const noexcept { return bus_.stats(); }

  VotingTerminal& terminal(const std::string& id) {
    auto it = terminals_.find(id);
    if (it == terminals_.end()) throw InvalidArgument("unknown terminal " + id);
    return *it->second;
  }

  Token issue_token(const std::string& style_id, bool provisional = false) {
    return judge_.issue_token(style_id, provisional, rng_);
  }

  SessionOutcome vote_session(const std::string& terminal_id, const std::string& code, const PlaintextBallot& pb) {
    VotingTerminal& t = terminal(terminal_id);
    t.begin_session();
    struct EndSession {
      VotingTerminal& t;
      ~EndSession() { t.end_session(); }
    } guard{t};

    auto reply = exchange<RedeemReply>(terminal_id, RedeemRequest{code});
    if (reply.error) std::rethrow_exception(reply.error);
    if (reply.token->ballot_style_id != pb.style_id)
      throw InvalidArgument("token is for style " + reply.token->ballot_style_id + ", ballot is " + pb.style_id);

    const std::string timestamp = decorative_timestamp(reply.clock);
    Production prod = t.produce(pb, timestamp);
    BallotSerial serial;
    for (;;) {
      serial = t.new_serial();
      auto ack = exchange<SubmissionAck>(terminal_id,
                                         BallotSubmission{serial, prod.record, reply.token->provisional, prod.encrypted_plaintext});
      if (ack.error) std::rethrow_exception(ack.error);
      if (ack.accepted) break;
    }
    t.commit(prod.record.z);
    return {judge_.record(serial), Receipt{terminal_id, timestamp, receipt_code(prod.record.z)}, PrintedSummary{pb, serial}};
  }

  // The voter drops the paper summary into the box; the scanner reads the
  // serial and tells the judge station. With scanned = false the paper lands
  // in the box but the read is lost.
  void deposit(const PrintedSummary& paper, bool scanned = true) {
    if (scanned) {
      auto ack = exchange<ScanAck>(kScannerEndpoint, ScanNotice{paper.serial});
      if (ack.error) std::rethrow_exception(ack.error);
    }
    box_.push_back(paper);
  }

  void deposit_provisional(const PrintedSummary& paper) { provisional_box_.push_back(paper); }

  void spoil(const BallotSerial& serial, SpoilReason reason) { judge_.spoil(serial, reason); }

  // Accepted provisional papers join the main box, since the official entered
  // them as a proxy for the voter.
  BallotStatus adjudicate(const BallotSerial& serial, Adjudication decision) {
    BallotStatus st = judge_.provisional_flow(serial, decision);
    for (auto it = provisional_box_.begin(); it != provisional_box_.end(); ++it) {
      if (it->serial != serial) continue;
      if (st == BallotStatus::Cast) box_.push_back(*it);
      provisional_box_.erase(it);
      break;
    }
    return st;
  }

  std::vector<BallotSerial> timeout_sweep(std::uint64_t ttl = kDefaultTtl) { return judge_.timeout_sweep(judge_.now(), ttl); }

  // Cheat injection: a paper summary disappears from the box.
  bool lose_paper(const BallotSerial& serial) {
    for (auto it = box_.begin(); it != box_.end(); ++it)
      if (it->serial == serial) {
        box_.erase(it);
        return true;
      }
    return false;
  }

  CloseResult close() {
    CloseResult out;
    for (const auto& m : params_.terminals) {
      const VotingTerminal& t = *terminals_.at(m);
      out.finals[m] = {t.z_prev(), t.ballots_produced()};
    }
    judge_.close(out.finals);
    return out;
  }

  const std::vector<PrintedSummary>& ballot_box() const noexcept { return box_; }
  const std::vector<PrintedSummary>& provisional_box() const noexcept { return provisional_box_; }

  std::vector<BallotSerial> box_serials() const {
    std::vector<BallotSerial> out;
    for (const auto& p : box_) out.push_back(p.serial);
    return out;
  }

  // Every terminal's own count matches the judge station's records.
  bool conserved() const {
    for (const auto& [m, t] : terminals_) {
      std::uint64_t sum = 0;
      for (const auto& [st, n] : judge_.status_counts(m)) sum += n;
      if (sum != t->ballots_produced() || judge_.produced_by(m) != t->ballots_produced()) return false;
    }
    return true;
  }

 private:
  template <class Reply>
  Reply exchange(const std::string& from, SiteMessage request) {
    bus_.send(from, kJudgeEndpoint, std::move(request));
    bus_.run();
    auto& box = inbox_[from];
    if (box.size() != 1 || !std::holds_alternative<Reply>(box.front()))
      throw InvariantViolation("unexpected reply traffic at " + from);
    Reply r = std::get<Reply>(std::move(box.front()));
    box.pop_front();
    return r;
  }

  void on_judge(const std::string& from, const SiteMessage& msg) {
    std::visit(
        [&](const auto& m) {
          using T = std::decay_t<decltype(m)>;
          if constexpr (std::is_same_v<T, RedeemRequest>) {
            RedeemReply r;
            try {
              r.token = judge_.redeem_token(m.code, from);
            } catch (...) {
              r.error = std::current_exception();
            }
            r.clock = judge_.now();
            bus_.send(kJudgeEndpoint, from, std::move(r));
          } else if constexpr (std::is_same_v<T, BallotSubmission>) {
            SubmissionAck a{m.serial, false, nullptr};
            try {
              a.accepted = judge_.receive_ballot(m.serial, m.record, m.provisional, m.cvr);
            } catch (...) {
              a.error = std::current_exception();
            }
            bus_.send(kJudgeEndpoint, from, std::move(a));
          } else if constexpr (std::is_same_v<T, ScanNotice>) {
            ScanAck a{m.serial, nullptr};
            try {
              judge_.cast(m.serial);
            } catch (...) {
              a.error = std::current_exception();
            }
            bus_.send(kJudgeEndpoint, from, std::move(a));
          } else {
            throw InvariantViolation("judge station received a reply message");
          }
        },
        msg);
  }

  ElectionParams params_;
  Rng rng_;
  JudgeStation judge_;
  MessageBus<SiteMessage> bus_;
  std::map<std::string, std::unique_ptr<VotingTerminal>> terminals_;
  std::map<std::string, std::deque<SiteMessage>> inbox_;
  std::vector<PrintedSummary> box_;
  std::vector<PrintedSummary> provisional_box_;
};

}  // namespace starlock
