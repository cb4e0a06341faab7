#pragma once

// Independent observer. Reads only the published board file and the public
// election parameters; nothing here depends on how the board was produced.

#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "starlock/board_format.hpp"
#include "starlock/chain.hpp"
#include "starlock/codes.hpp"
#include "starlock/election.hpp"

namespace starlock {

namespace check {
inline constexpr const char* kFormat = "format";
inline constexpr const char* kParams = "params";
inline constexpr const char* kSignature = "signature";
inline constexpr const char* kHashChain = "hash_chain";
inline constexpr const char* kBallotProofs = "ballot_proofs";
inline constexpr const char* kDecryptionProofs = "decryption_proofs";
inline constexpr const char* kTally = "tally";
inline constexpr const char* kSpoiled = "spoiled";
inline constexpr const char* kAll[] = {kFormat, kParams, kSignature, kHashChain, kBallotProofs, kDecryptionProofs, kTally, kSpoiled};
}  // namespace check

struct CheckItem {
  std::string check;
  bool ok = true;
  std::optional<std::uint64_t> position;  // ordinal among ballot lines
  std::optional<std::uint64_t> index;     // board entry index
  std::string terminal;
  std::string detail;
};

struct VerificationReport {
  std::vector<CheckItem> items;  // one pass item per clean check, one fail item per finding

  bool ok() const {
    for (const auto& i : items)
      if (!i.ok) return false;
    return !items.empty();
  }

  bool passed(const std::string& name) const {
    bool seen = false;
    for (const auto& i : items)
      if (i.check == name) {
        if (!i.ok) return false;
        seen = true;
      }
    return seen;
  }

  // First failing item of a check, if any.
  const CheckItem* first_failure(const std::string& name) const {
    for (const auto& i : items)
      if (i.check == name && !i.ok) return &i;
    return nullptr;
  }

  nlohmann::json to_json() const {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& i : items) {
      nlohmann::json j{{"check", i.check}, {"ok", i.ok}, {"detail", i.detail}};
      if (i.position) j["position"] = std::to_string(*i.position);
      if (i.index) j["index"] = std::to_string(*i.index);
      if (!i.terminal.empty()) j["terminal"] = i.terminal;
      arr.push_back(std::move(j));
    }
    return {{"verdict", ok() ? "PASS" : "FAIL"}, {"items", arr}};
  }

  std::string summary() const {
    std::ostringstream os;
    for (const char* name : check::kAll) {
      const CheckItem* f = first_failure(name);
      bool present = false;
      for (const auto& i : items) present = present || i.check == name;
      if (!present) {
        os << "SKIP " << name << '\n';
      } else if (!f) {
        os << "PASS " << name << '\n';
      } else {
        os << "FAIL " << name << ": " << f->detail;
        if (f->index) os << " (entry " << *f->index << ")";
        if (!f->terminal.empty()) os << " [terminal " << f->terminal << "]";
        os << '\n';
      }
    }
    os << "verdict: " << (ok() ? "PASS" : "FAIL") << '\n';
    return os.str();
  }
};

struct PublishedEntry {
  std::uint64_t index = 0;
  std::uint64_t position = 0;
  std::string terminal;
  std::string timestamp;
  EncryptedBallot c_v;
  WellFormednessProof p_v;
  Digest z{};
  std::string status;  // after supersession
  std::string reason;
};

struct PublishedBoard {
  std::vector<BoardLine> lines;
  nlohmann::json header_params;
  std::vector<PublishedEntry> entries;
  std::map<std::string, std::pair<Digest, std::uint64_t>> closes;
  std::optional<TallyRecord> tally;
  std::map<std::uint64_t, SpoiledDecryption> decryptions;
  std::vector<std::uint64_t> duplicate_decryptions;
  std::optional<std::size_t> signature_line;
};

// Structural parse. Throws ParseError on anything malformed.
inline PublishedBoard parse_published_board(const std::string& text) {
  PublishedBoard b;
  b.lines = parse_board_lines(text);
  try {
    for (std::size_t i = 0; i < b.lines.size(); ++i) {
      const BoardLine& l = b.lines[i];
      const auto& body = l.body;
      if (l.kind == board_kind::kHeader) {
        if (i != 0) throw ParseError("header not first");
        b.header_params = body.at("params");
      } else if (l.kind == board_kind::kBallot) {
        PublishedEntry e;
        e.index = parse_u64(body.at("index"));
        e.position = b.entries.size();
        const auto& r = body.at("record");
        e.terminal = r.at("terminal").get<std::string>();
        e.timestamp = r.at("timestamp").get<std::string>();
        e.c_v = encrypted_ballot_from_json(r.at("ballot"));
        e.p_v = proof_from_json(r.at("proof"));
        e.z = digest_from_hex(r.at("z").get<std::string>());
        e.status = body.at("status").get<std::string>();
        e.reason = body.at("reason").get<std::string>();
        b.entries.push_back(std::move(e));
      } else if (l.kind == board_kind::kStatus) {
        const std::uint64_t idx = parse_u64(body.at("index"));
        bool found = false;
        for (auto& e : b.entries)
          if (e.index == idx) {
            e.status = body.at("status").get<std::string>();
            e.reason = body.at("reason").get<std::string>();
            found = true;
          }
        if (!found) throw ParseError("supersession of unknown entry " + std::to_string(idx));
      } else if (l.kind == board_kind::kClose) {
        b.closes[body.at("terminal").get<std::string>()] = {digest_from_hex(body.at("final_z").get<std::string>()),
                                                            parse_u64(body.at("count"))};
      } else if (l.kind == board_kind::kTally) {
        b.tally = tally_from_json(body);
      } else if (l.kind == board_kind::kDecryption) {
        SpoiledDecryption d = spoiled_decryption_from_json(body);
        if (b.decryptions.count(d.index)) b.duplicate_decryptions.push_back(d.index);
        b.decryptions[d.index] = std::move(d);
      } else if (l.kind == board_kind::kSignature) {
        b.signature_line = i;
      } else {
        throw ParseError("unknown line kind '" + l.kind + "'");
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("board: ") + e.what());
  }
  return b;
}

namespace detail {

class Checker {
 public:
  Checker(const PublishedBoard& b, const ElectionParams& p, VerificationReport& r) : board_(b), params_(p), report_(r) {}

  void run() {
    format();
    params();
    signature();
    hash_chain();
    ballot_proofs();
    decryption_proofs();
    tally();
    spoiled();
  }

 private:
  void fail(const char* name, std::string detail, const PublishedEntry* e = nullptr, std::string terminal = {}) {
    CheckItem i{name, false, std::nullopt, std::nullopt, std::move(terminal), std::move(detail)};
    if (e) {
      i.position = e->position;
      i.index = e->index;
      if (i.terminal.empty()) i.terminal = e->terminal;
    }
    report_.items.push_back(std::move(i));
    failed_.insert(name);
  }

  void pass_unless_failed(const char* name) {
    if (!failed_.count(name)) report_.items.push_back({name, true, std::nullopt, std::nullopt, {}, "ok"});
  }

  const GroupParams& gp() const { return params_.group; }

  void format() {
    const auto& lines = board_.lines;
    for (std::size_t i = 0; i < lines.size(); ++i) {
      if (lines[i].seq != i) fail(check::kFormat, "line " + std::to_string(i) + " has seq " + std::to_string(lines[i].seq));
      const std::string expect = i == 0 ? kBoardGenesis : line_digest(lines[i - 1].text);
      if (lines[i].prev != expect) fail(check::kFormat, "line " + std::to_string(i) + " does not chain to its predecessor");
      if (nlohmann::json::parse(lines[i].text).dump() != lines[i].text)
        fail(check::kFormat, "line " + std::to_string(i) + " is not in canonical form");
    }
    if (lines.empty() || lines.front().kind != board_kind::kHeader) fail(check::kFormat, "board has no header");
    for (std::size_t k = 0; k < board_.entries.size(); ++k)
      if (board_.entries[k].index != k) {
        fail(check::kFormat, "entry indices are not contiguous", &board_.entries[k]);
        break;
      }
    for (auto idx : board_.duplicate_decryptions) fail(check::kFormat, "entry " + std::to_string(idx) + " decrypted twice");
    pass_unless_failed(check::kFormat);
  }

  void params() {
    try {
      ElectionParams published = election_params_from_json(board_.header_params);
      if (published.digest() != params_.digest()) fail(check::kParams, "board header parameters differ from the params file");
    } catch (const Error& e) {
      fail(check::kParams, std::string("board header parameters invalid: ") + e.what());
    }
    pass_unless_failed(check::kParams);
  }

  void signature() {
    const auto& lines = board_.lines;
    if (!board_.signature_line || *board_.signature_line + 1 != lines.size()) {
      fail(check::kSignature, "final line is not a signature");
      return;
    }
    const auto& body = lines.back().body;
    try {
      const BigInt pk = from_hex(body.at("public_key").get<std::string>());
      if (pk != params_.office_pk) fail(check::kSignature, "signed under a key other than the election office key");
      const std::string msg = signed_prefix(lines, lines.size() - 1);
      const auto sig = signature_from_json(body.at("signature"));
      if (!verify_sig(std::span(reinterpret_cast<const std::uint8_t*>(msg.data()), msg.size()), sig, params_.office_pk, gp()))
        fail(check::kSignature, "signature does not verify");
    } catch (const std::exception& e) {
      fail(check::kSignature, std::string("malformed signature: ") + e.what());
    }
    pass_unless_failed(check::kSignature);
  }

  void hash_chain() {
    std::map<std::string, Digest> prev;
    std::map<std::string, std::uint64_t> count;
    for (const auto& e : board_.entries) {
      if (!params_.has_terminal(e.terminal)) {
        fail(check::kHashChain, "entry from unknown terminal", &e);
        continue;
      }
      if (!prev.count(e.terminal)) prev[e.terminal] = params_.z0(e.terminal);
      if (chain_hash(e.c_v, e.p_v, e.terminal, prev[e.terminal]) != e.z)
        fail(check::kHashChain, "z does not extend the terminal's chain", &e);
      // Continue from the published value so each break is reported once.
      prev[e.terminal] = e.z;
      ++count[e.terminal];
    }
    for (const auto& m : params_.terminals) {
      auto it = board_.closes.find(m);
      const Digest last = prev.count(m) ? prev[m] : params_.z0(m);
      if (it == board_.closes.end()) {
        fail(check::kHashChain, "no close record", nullptr, m);
      } else if (it->second.first != last || it->second.second != count[m]) {
        fail(check::kHashChain, "close record (final z " + hex(it->second.first).substr(0, 12) + ", count " +
                                    std::to_string(it->second.second) + ") does not match the published chain (count " +
                                    std::to_string(count[m]) + ")",
             nullptr, m);
      }
    }
    for (const auto& [m, _] : board_.closes)
      if (!params_.has_terminal(m)) fail(check::kHashChain, "close record for unknown terminal", nullptr, m);
    pass_unless_failed(check::kHashChain);
  }

  void ballot_proofs() {
    for (const auto& e : board_.entries) {
      bool ok = false;
      try {
        ok = verify_ballot(e.c_v, e.p_v, params_.style(e.c_v.style_id), params_.joint_key.K, gp(), params_.election_id);
      } catch (const Error&) {
        ok = false;
      }
      if (!ok) fail(check::kBallotProofs, "ballot validity proof does not verify", &e);
    }
    pass_unless_failed(check::kBallotProofs);
  }

  // Combines shares after checking each proof; returns the decryption factor.
  std::optional<BigInt> column_factor(const TallyColumn& col, std::string& why) const {
    try {
      return combine_decryption_factor(col.ciphertext, col.shares, params_.joint_key, gp());
    } catch (const BadShareProof& e) {
      why = "decryption share proof of trustee " + std::to_string(e.trustee_id()) + " does not verify";
    } catch (const Error& e) {
      why = e.what();
    }
    return std::nullopt;
  }

  void decryption_proofs() {
    if (board_.tally)
      for (const auto& ct : board_.tally->contests)
        for (const auto& col : ct.columns) {
          std::string why;
          if (!column_factor(col, why)) fail(check::kDecryptionProofs, "tally " + ct.contest_id + "/" + col.id + ": " + why);
        }
    for (const auto& [idx, d] : board_.decryptions)
      for (const auto& ct : d.contests)
        for (const auto& col : ct.columns) {
          std::string why;
          if (!column_factor(col, why)) {
            fail(check::kDecryptionProofs, "spoiled " + ct.contest_id + "/" + col.id + ": " + why, entry(idx));
            if (!entry(idx)) report_.items.back().index = idx;
          }
        }
    pass_unless_failed(check::kDecryptionProofs);
  }

  // g^count == b / factor for a column whose shares combine.
  bool count_matches(const TallyColumn& col) const {
    std::string why;
    auto f = column_factor(col, why);
    if (!f) return false;
    return gp().mul(col.ciphertext.b, invert(*f, gp().p)) == gp().gexp(BigInt(static_cast<unsigned long>(col.count)));
  }

  void tally() {
    if (!board_.tally) {
      fail(check::kTally, "no tally published");
      return;
    }
    const TallyRecord& t = *board_.tally;
    std::vector<const PublishedEntry*> cast;
    for (const auto& e : board_.entries)
      if (e.status == "CAST") cast.push_back(&e);
    if (t.cast_count != cast.size())
      fail(check::kTally, "tally claims " + std::to_string(t.cast_count) + " cast ballots, board has " + std::to_string(cast.size()));

    const auto catalog = params_.contest_catalog();
    if (t.contests.size() != catalog.size()) {
      fail(check::kTally, "tally does not cover exactly the election's contests");
      return;
    }
    for (std::size_t c = 0; c < catalog.size(); ++c) {
      const Contest& contest = catalog[c];
      const ContestTally& ct = t.contests[c];
      const auto ids = contest.column_ids();
      if (ct.contest_id != contest.contest_id || ct.columns.size() != ids.size()) {
        fail(check::kTally, "tally contest " + ct.contest_id + " has the wrong shape");
        continue;
      }
      std::vector<Ciphertext> recomputed(ids.size(), Ciphertext::identity());
      std::vector<std::vector<Ciphertext>> contributions;
      std::uint64_t carrying = 0;  // CAST ballots whose style includes this contest
      for (const auto* e : cast) {
        std::vector<Ciphertext> cols;
        for (const auto& ec : e->c_v.contests)
          if (ec.contest_id == contest.contest_id) cols = ec.columns();
        carrying += !cols.empty();
        if (cols.empty()) cols.assign(ids.size(), Ciphertext::identity());
        if (cols.size() != ids.size()) cols.assign(ids.size(), Ciphertext::identity());
        for (std::size_t i = 0; i < ids.size(); ++i) recomputed[i] = homomorphic_add(recomputed[i], cols[i], gp());
        contributions.push_back(std::move(cols));
      }
      bool agg_ok = true;
      for (std::size_t i = 0; i < ids.size(); ++i)
        if (ct.columns[i].id != ids[i] || !(ct.columns[i].ciphertext == recomputed[i])) agg_ok = false;
      if (!agg_ok) {
        // Locate an entry whose omission would explain the published aggregate.
        const PublishedEntry* culprit = nullptr;
        for (std::size_t k = 0; k < cast.size() && !culprit; ++k) {
          bool explains = true;
          for (std::size_t i = 0; i < ids.size() && explains; ++i) {
            const Ciphertext& x = contributions[k][i];
            Ciphertext without{gp().div(recomputed[i].a, x.a), gp().div(recomputed[i].b, x.b)};
            explains = without == ct.columns[i].ciphertext;
          }
          if (explains) culprit = cast[k];
        }
        fail(check::kTally,
             "aggregate for " + contest.contest_id + " differs from the product of CAST entries" +
                 (culprit ? " (consistent with omitting this entry)" : ""),
             culprit);
      }
      std::uint64_t sum = 0;
      for (std::size_t i = 0; i < ids.size(); ++i) {
        const TallyColumn& col = ct.columns[i];
        if (!count_matches(col)) fail(check::kTally, "announced count for " + contest.contest_id + "/" + col.id + " does not match its decryption");
        if (col.count > carrying) fail(check::kTally, "count for " + contest.contest_id + "/" + col.id + " exceeds cast ballots");
        if (col.id != Contest::kWriteinCounterId) sum += col.count;
      }
      if (sum != carrying * contest.selection_limit)
        fail(check::kTally, "sum check failed for " + contest.contest_id + ": " + std::to_string(sum) + " != " +
                                std::to_string(carrying) + " x " + std::to_string(contest.selection_limit));
    }
    pass_unless_failed(check::kTally);
  }

  void spoiled() {
    for (const auto& e : board_.entries) {
      const bool excluded = e.status == "SPOILED" || e.status == "UNTALLIED";
      if (e.status != "CAST" && !excluded) fail(check::kSpoiled, "entry has invalid status " + e.status, &e);
      auto it = board_.decryptions.find(e.index);
      if (!excluded) {
        if (it != board_.decryptions.end()) fail(check::kSpoiled, "CAST entry was individually decrypted", &e);
        continue;
      }
      if (it == board_.decryptions.end()) {
        fail(check::kSpoiled, "excluded entry has no published decryption", &e);
        continue;
      }
      const SpoiledDecryption& d = it->second;
      bool ok = d.contests.size() == e.c_v.contests.size();
      for (std::size_t c = 0; ok && c < d.contests.size(); ++c) {
        const auto cols = e.c_v.contests[c].columns();
        ok = d.contests[c].contest_id == e.c_v.contests[c].contest_id && d.contests[c].columns.size() == cols.size();
        for (std::size_t i = 0; ok && i < cols.size(); ++i) {
          const TallyColumn& col = d.contests[c].columns[i];
          ok = col.ciphertext == cols[i] && col.count <= 1 && count_matches(col);
        }
      }
      if (!ok) {
        fail(check::kSpoiled, "decryption does not open this entry's ciphertexts", &e);
        continue;
      }
      if (without_abstentions(d.plaintext) != without_abstentions(selections_from_columns(d.contests, e.c_v.style_id)))
        fail(check::kSpoiled, "announced plaintext differs from the decrypted selections", &e);
    }
    for (const auto& [idx, d] : board_.decryptions)
      if (!entry(idx)) fail(check::kSpoiled, "decryption for nonexistent entry " + std::to_string(idx));
    pass_unless_failed(check::kSpoiled);
  }

  const PublishedEntry* entry(std::uint64_t idx) const {
    for (const auto& e : board_.entries)
      if (e.index == idx) return &e;
    return nullptr;
  }

  const PublishedBoard& board_;
  const ElectionParams& params_;
  VerificationReport& report_;
  std::set<std::string> failed_;
};

}  // namespace detail

inline VerificationReport verify_board(const std::string& board_text, const ElectionParams& params) {
  VerificationReport report;
  PublishedBoard board;
  try {
    board = parse_published_board(board_text);
  } catch (const Error& e) {
    report.items.push_back({check::kFormat, false, std::nullopt, std::nullopt, {}, e.what()});
    return report;
  }
  detail::Checker(board, params, report).run();
  return report;
}

enum class ReceiptStatus { FoundCast, FoundSpoiled, NotFound };

struct ReceiptLookup {
  ReceiptStatus status = ReceiptStatus::NotFound;
  std::optional<std::uint64_t> index;
  std::optional<PlaintextBallot> plaintext;  // for spoiled (or deemed-spoiled) entries
};

// Matches (terminal, truncated z) against the board. Voters hold no index.
inline ReceiptLookup lookup_receipt(const PublishedBoard& board, const std::string& terminal_id, const std::string& code) {
  ReceiptLookup out;
  for (const auto& e : board.entries) {
    if (e.terminal != terminal_id || receipt_code(e.z) != code) continue;
    if (out.index) throw AmbiguousReceipt("receipt " + code + " matches more than one entry");
    out.index = e.index;
    if (e.status == "CAST") {
      out.status = ReceiptStatus::FoundCast;
    } else {
      out.status = ReceiptStatus::FoundSpoiled;
      if (auto it = board.decryptions.find(e.index); it != board.decryptions.end()) out.plaintext = it->second.plaintext;
    }
  }
  return out;
}

inline std::string to_string(ReceiptStatus s) {
  switch (s) {
    case ReceiptStatus::FoundCast: return "FOUND_CAST";
    case ReceiptStatus::FoundSpoiled: return "FOUND_SPOILED";
    case ReceiptStatus::NotFound: return "NOT_FOUND";
  }
  return "?";
}

}  // namespace starlock
