#pragma once

#include <cstdint>
#include <ctime>
#include <optional>
#include <string>

#include <json.hpp>

#include "starlock/ballot.hpp"
#include "starlock/codes.hpp"

namespace starlock {

enum class BallotStatus { Pending, Cast, Spoiled, ProvisionalPending, Untallied };
enum class SpoilReason { Voter, Challenge, Timeout };
enum class Adjudication { Accept, Reject };

inline std::string to_string(BallotStatus s) {
  switch (s) {
    case BallotStatus::Pending: return "PENDING";
    case BallotStatus::Cast: return "CAST";
    case BallotStatus::Spoiled: return "SPOILED";
    case BallotStatus::ProvisionalPending: return "PROVISIONAL_PENDING";
    case BallotStatus::Untallied: return "UNTALLIED";
  }
  return "?";
}

inline BallotStatus ballot_status_from_string(const std::string& s) {
  if (s == "PENDING") return BallotStatus::Pending;
  if (s == "CAST") return BallotStatus::Cast;
  if (s == "SPOILED") return BallotStatus::Spoiled;
  if (s == "PROVISIONAL_PENDING") return BallotStatus::ProvisionalPending;
  if (s == "UNTALLIED") return BallotStatus::Untallied;
  throw ParseError("unknown ballot status '" + s + "'");
}

inline std::string to_string(SpoilReason r) {
  switch (r) {
    case SpoilReason::Voter: return "VOTER";
    case SpoilReason::Challenge: return "CHALLENGE";
    case SpoilReason::Timeout: return "TIMEOUT";
  }
  return "?";
}

inline SpoilReason spoil_reason_from_string(const std::string& s) {
  if (s == "VOTER") return SpoilReason::Voter;
  if (s == "CHALLENGE") return SpoilReason::Challenge;
  if (s == "TIMEOUT") return SpoilReason::Timeout;
  throw ParseError("unknown spoil reason '" + s + "'");
}

// Wall-clock stand-in: polls open at 2026-11-03 07:00 UTC and each logical
// tick is one second.
inline std::string decorative_timestamp(std::uint64_t clock) {
  constexpr std::time_t kPollsOpen = 1793689200;
  const std::time_t t = kPollsOpen + static_cast<std::time_t>(clock);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

// (c_v, p_v, m, z_i, timestamp): everything published about one ballot.
struct EncryptedBallotRecord {
  EncryptedBallot c_v;
  WellFormednessProof p_v;
  std::string terminal_id;
  Digest z{};
  std::string timestamp;
};

struct BallotRecord {
  BallotSerial serial;
  EncryptedBallotRecord record;
  BallotStatus status = BallotStatus::Pending;
  std::optional<SpoilReason> spoil_reason;
  std::uint64_t produced_at = 0;
  bool provisional = false;
};

struct Receipt {
  std::string terminal_id;
  std::string timestamp;
  std::string receipt_code;
};

// Stand-in for the printed paper summary: human-readable selections plus the
// machine-readable serial.
struct PrintedSummary {
  PlaintextBallot selections;
  BallotSerial serial;
};

inline nlohmann::json to_json(const EncryptedBallotRecord& r) {
  return {{"ballot", to_json(r.c_v)},
          {"proof", to_json(r.p_v)},
          {"terminal", r.terminal_id},
          {"z", hex(r.z)},
          {"timestamp", r.timestamp}};
}

inline EncryptedBallotRecord encrypted_record_from_json(const nlohmann::json& j) {
  try {
    return {encrypted_ballot_from_json(j.at("ballot")), proof_from_json(j.at("proof")),
            j.at("terminal").get<std::string>(), digest_from_hex(j.at("z").get<std::string>()),
            j.at("timestamp").get<std::string>()};
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("ballot record: ") + e.what());
  }
}

inline nlohmann::json to_json(const Receipt& r) {
  return {{"terminal", r.terminal_id}, {"timestamp", r.timestamp}, {"code", r.receipt_code}};
}

inline Receipt receipt_from_json(const nlohmann::json& j) {
  try {
    return {j.at("terminal").get<std::string>(), j.at("timestamp").get<std::string>(), j.at("code").get<std::string>()};
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("receipt: ") + e.what());
  }
}

inline nlohmann::json to_json(const PrintedSummary& p) {
  return {{"serial", p.serial.text}, {"selections", to_json(p.selections)}};
}

inline PrintedSummary printed_summary_from_json(const nlohmann::json& j) {
  try {
    return {plaintext_from_json(j.at("selections")), BallotSerial{j.at("serial").get<std::string>()}};
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("printed summary: ") + e.what());
  }
}

}  // namespace starlock
