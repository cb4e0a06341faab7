#pragma once

// The public bulletin-board file format, shared by the writer and by
// independent verifiers. One JSON object per line, sorted keys, no
// whitespace, integers as decimal strings, digests and group elements as
// lowercase hex. Every line carries the SHA-256 of the previous line.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "starlock/ballot.hpp"
#include "starlock/crypto/schnorr.hpp"
#include "starlock/trustees.hpp"

namespace starlock {

inline const std::string kBoardGenesis(64, '0');

namespace board_kind {
inline constexpr const char* kHeader = "header";
inline constexpr const char* kBallot = "ballot";
inline constexpr const char* kStatus = "status";
inline constexpr const char* kClose = "close";
inline constexpr const char* kTally = "tally";
inline constexpr const char* kDecryption = "decryption";
inline constexpr const char* kSignature = "signature";
}  // namespace board_kind

struct BoardLine {
  std::string kind;
  std::uint64_t seq = 0;
  std::string prev;
  nlohmann::json body;
  std::string text;  // exact bytes, without the newline
};

inline std::string render_line(const std::string& kind, std::uint64_t seq, const std::string& prev,
                               const nlohmann::json& body) {
  nlohmann::json j{{"body", body}, {"kind", kind}, {"prev", prev}, {"seq", std::to_string(seq)}};
  return j.dump();
}

inline std::string line_digest(const std::string& line_text) { return hex(sha256(line_text)); }

inline std::uint64_t parse_u64(const nlohmann::json& j) {
  const std::string s = j.get<std::string>();
  if (s.empty() || s.size() > 20 || s.find_first_not_of("0123456789") != std::string::npos || (s.size() > 1 && s[0] == '0'))
    throw ParseError("not a canonical decimal: '" + s + "'");
  return std::stoull(s);
}

// Splits and parses a board file. Structure only; the chain and signature are
// the verifier's business.
inline std::vector<BoardLine> parse_board_lines(const std::string& text) {
  std::vector<BoardLine> out;
  std::size_t start = 0;
  while (start < text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string::npos) throw ParseError("board file does not end with a newline");
    BoardLine line;
    line.text = text.substr(start, end - start);
    try {
      auto j = nlohmann::json::parse(line.text);
      line.kind = j.at("kind").get<std::string>();
      line.seq = parse_u64(j.at("seq"));
      line.prev = j.at("prev").get<std::string>();
      line.body = j.at("body");
    } catch (const nlohmann::json::exception& e) {
      throw ParseError("board line " + std::to_string(out.size()) + ": " + e.what());
    }
    out.push_back(std::move(line));
    start = end + 1;
  }
  return out;
}

// The bytes a signature line signs: the whole file before it.
inline std::string signed_prefix(const std::vector<BoardLine>& lines, std::size_t signature_pos) {
  std::string out;
  for (std::size_t i = 0; i < signature_pos; ++i) {
    out += lines[i].text;
    out += '\n';
  }
  return out;
}

struct TallyColumn {
  std::string id;
  Ciphertext ciphertext;
  std::vector<DecryptionShare> shares;
  std::uint64_t count = 0;
};

struct ContestTally {
  std::string contest_id;
  std::vector<TallyColumn> columns;
};

struct TallyRecord {
  std::uint64_t cast_count = 0;
  std::vector<ContestTally> contests;
};

// Per-ciphertext decryption of one spoiled (or untallied) entry.
struct SpoiledDecryption {
  std::uint64_t index = 0;
  std::vector<ContestTally> contests;  // count holds each column's 0/1 value
  PlaintextBallot plaintext;
};

inline nlohmann::json to_json(const ContestTally& ct) {
  nlohmann::json cols = nlohmann::json::array();
  for (const auto& col : ct.columns) {
    nlohmann::json shares = nlohmann::json::array();
    for (const auto& s : col.shares) shares.push_back(to_json(s));
    cols.push_back({{"id", col.id}, {"ciphertext", to_json(col.ciphertext)}, {"shares", shares}, {"count", std::to_string(col.count)}});
  }
  return {{"contest", ct.contest_id}, {"columns", cols}};
}

inline ContestTally contest_tally_from_json(const nlohmann::json& j) {
  ContestTally ct;
  ct.contest_id = j.at("contest").get<std::string>();
  for (const auto& c : j.at("columns")) {
    TallyColumn col;
    col.id = c.at("id").get<std::string>();
    col.ciphertext = ciphertext_from_json(c.at("ciphertext"));
    for (const auto& s : c.at("shares")) col.shares.push_back(decryption_share_from_json(s));
    col.count = parse_u64(c.at("count"));
    ct.columns.push_back(std::move(col));
  }
  return ct;
}

inline nlohmann::json to_json(const TallyRecord& t) {
  nlohmann::json cs = nlohmann::json::array();
  for (const auto& c : t.contests) cs.push_back(to_json(c));
  return {{"cast_count", std::to_string(t.cast_count)}, {"contests", cs}};
}

inline TallyRecord tally_from_json(const nlohmann::json& j) {
  try {
    TallyRecord t;
    t.cast_count = parse_u64(j.at("cast_count"));
    for (const auto& c : j.at("contests")) t.contests.push_back(contest_tally_from_json(c));
    return t;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("tally: ") + e.what());
  }
}

inline nlohmann::json to_json(const SpoiledDecryption& d) {
  nlohmann::json cs = nlohmann::json::array();
  for (const auto& c : d.contests) cs.push_back(to_json(c));
  return {{"index", std::to_string(d.index)}, {"contests", cs}, {"plaintext", to_json(d.plaintext)}};
}

inline SpoiledDecryption spoiled_decryption_from_json(const nlohmann::json& j) {
  try {
    SpoiledDecryption d;
    d.index = parse_u64(j.at("index"));
    for (const auto& c : j.at("contests")) d.contests.push_back(contest_tally_from_json(c));
    d.plaintext = plaintext_from_json(j.at("plaintext"));
    return d;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("spoiled decryption: ") + e.what());
  }
}

// Plaintext selections implied by per-column values of one ballot.
inline PlaintextBallot selections_from_columns(const std::vector<ContestTally>& contests, const std::string& style_id) {
  PlaintextBallot pb{style_id, {}};
  for (const auto& ct : contests)
    for (const auto& col : ct.columns)
      if (col.count == 1 && !col.id.empty() && col.id.front() != '(') pb.selections[ct.contest_id].insert(col.id);
  return pb;
}

}  // namespace starlock
