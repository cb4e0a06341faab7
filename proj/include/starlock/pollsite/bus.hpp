#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "starlock/crypto/rng.hpp"
#include "starlock/errors.hpp"

namespace starlock {

enum class FaultKind { Deliver, Drop, Duplicate, Delay };

struct FaultDecision {
  FaultKind kind = FaultKind::Deliver;
  int delay_rounds = 0;
};

class FaultInjector {
 public:
  virtual ~FaultInjector() = default;
  virtual FaultDecision decide(const std::string& from, const std::string& to, std::uint64_t seq) = 0;
};

class NoFaults final : public FaultInjector {
 public:
  FaultDecision decide(const std::string&, const std::string&, std::uint64_t) override { return {}; }
};

// Independent per-attempt faults with fixed probabilities.
class RandomFaults final : public FaultInjector {
 public:
  RandomFaults(double drop, double duplicate, double delay, Rng rng)
      : drop_(drop), duplicate_(duplicate), delay_(delay), rng_(std::move(rng)) {}

  FaultDecision decide(const std::string&, const std::string&, std::uint64_t) override {
    const double u = rng_.unit();
    if (u < drop_) return {FaultKind::Drop, 0};
    if (u < drop_ + duplicate_) return {FaultKind::Duplicate, 0};
    if (u < drop_ + duplicate_ + delay_) return {FaultKind::Delay, 1 + static_cast<int>(rng_.below(std::uint64_t{3}))};
    return {};
  }

 private:
  double drop_, duplicate_, delay_;
  Rng rng_;
};

struct BusStats {
  std::uint64_t sent = 0;
  std::uint64_t delivered = 0;
  std::uint64_t dropped_attempts = 0;
  std::uint64_t duplicates_suppressed = 0;
  std::uint64_t delayed = 0;
};

// In-process stand-in for the polling-place LAN. Within each (from, to)
// channel delivery is exactly-once and in send order: dropped attempts are
// retransmitted, duplicates are discarded by sequence number, and early
// arrivals wait in a reorder buffer.
template <class Message>
class MessageBus {
 public:
  using Handler = std::function<void(const std::string& from, const Message&)>;

  explicit MessageBus(std::shared_ptr<FaultInjector> faults = std::make_shared<NoFaults>())
      : faults_(std::move(faults)) {}

  void attach(const std::string& endpoint, Handler handler) { handlers_[endpoint] = std::move(handler); }

  void send(const std::string& from, const std::string& to, Message body) {
    if (!handlers_.count(to)) throw InvalidArgument("no endpoint '" + to + "' on bus");
    const std::uint64_t seq = next_seq_[{from, to}]++;
    pending_.push_back({{from, to, seq, std::move(body)}, 0});
    ++stats_.sent;
  }

  // Pumps until every message sent so far (and every message sent by
  // handlers in response) has been delivered.
  void run(std::size_t max_rounds = 100000) {
    for (std::size_t round = 0; !pending_.empty(); ++round) {
      if (round >= max_rounds) throw InvariantViolation("message bus did not quiesce");
      std::vector<Pending> current;
      current.swap(pending_);
      std::vector<Pending> keep;
      for (auto& p : current) {
        if (p.hold > 0) {
          --p.hold;
          keep.push_back(std::move(p));
          continue;
        }
        const FaultDecision d = faults_->decide(p.env.from, p.env.to, p.env.seq);
        switch (d.kind) {
          case FaultKind::Drop:
            ++stats_.dropped_attempts;
            keep.push_back(std::move(p));
            break;
          case FaultKind::Delay:
            ++stats_.delayed;
            p.hold = d.delay_rounds;
            keep.push_back(std::move(p));
            break;
          case FaultKind::Duplicate:
            arrive(p.env);
            arrive(p.env);
            break;
          case FaultKind::Deliver:
            arrive(p.env);
            break;
        }
      }
      // Retransmissions go before anything handlers sent this round.
      keep.insert(keep.end(), std::make_move_iterator(pending_.begin()), std::make_move_iterator(pending_.end()));
      pending_ = std::move(keep);
    }
  }

  const BusStats& stats() const noexcept { return stats_; }

 private:
  struct Envelope {
    std::string from, to;
    std::uint64_t seq;
    Message body;
  };
  struct Pending {
    Envelope env;
    int hold;
  };
  struct Channel {
    std::uint64_t expected = 0;
    std::map<std::uint64_t, Envelope> early;
  };

  void arrive(const Envelope& env) {
    Channel& ch = channels_[{env.from, env.to}];
    if (env.seq < ch.expected || ch.early.count(env.seq)) {
      ++stats_.duplicates_suppressed;
      return;
    }
    ch.early.emplace(env.seq, env);
    while (!ch.early.empty() && ch.early.begin()->first == ch.expected) {
      Envelope next = std::move(ch.early.begin()->second);
      ch.early.erase(ch.early.begin());
      ++ch.expected;
      ++stats_.delivered;
      handlers_.at(next.to)(next.from, next.body);
    }
  }

  std::shared_ptr<FaultInjector> faults_;
  std::map<std::string, Handler> handlers_;
  std::map<std::pair<std::string, std::string>, std::uint64_t> next_seq_;
  std::map<std::pair<std::string, std::string>, Channel> channels_;
  std::vector<Pending> pending_;
  BusStats stats_;
};

}  // namespace starlock
