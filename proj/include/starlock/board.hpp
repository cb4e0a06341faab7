#pragma once

#include <fstream>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "starlock/board_format.hpp"
#include "starlock/election.hpp"
#include "starlock/pollsite/records.hpp"

namespace starlock {

struct BoardEntry {
  EncryptedBallotRecord record;
  BallotStatus status = BallotStatus::Cast;
  std::string reason;
};

struct AggregateContest {
  std::string contest_id;
  std::vector<std::string> column_ids;
  std::vector<Ciphertext> columns;
};

inline bool board_status_allowed(BallotStatus s) {
  return s == BallotStatus::Cast || s == BallotStatus::Spoiled || s == BallotStatus::Untallied;
}

// Componentwise product over CAST entries, per contest of the catalog. With
// no cast entries every column is the identity (1, 1).
inline std::vector<AggregateContest> aggregate(std::span<const BoardEntry> entries, const ElectionParams& params) {
  std::vector<AggregateContest> out;
  for (const auto& c : params.contest_catalog()) {
    auto ids = c.column_ids();
    out.push_back({c.contest_id, ids, std::vector<Ciphertext>(ids.size(), Ciphertext::identity())});
  }
  for (const auto& e : entries) {
    if (e.status != BallotStatus::Cast) continue;
    for (const auto& ec : e.record.c_v.contests) {
      auto it = std::find_if(out.begin(), out.end(), [&](const auto& a) { return a.contest_id == ec.contest_id; });
      if (it == out.end()) throw InvariantViolation("entry has unknown contest " + ec.contest_id);
      const auto cols = ec.columns();
      if (cols.size() != it->columns.size()) throw InvariantViolation("column count mismatch in " + ec.contest_id);
      for (std::size_t i = 0; i < cols.size(); ++i) it->columns[i] = homomorphic_add(it->columns[i], cols[i], params.group);
    }
  }
  return out;
}

namespace detail {
inline TallyColumn decrypt_column(const std::string& id, const Ciphertext& c, std::span<const TrusteeShare> trustees,
                                  const ElectionParams& params, std::uint64_t max_m) {
  TallyColumn col{id, c, {}, 0};
  for (const auto& t : trustees) col.shares.push_back(partial_decrypt(c, t, params.group));
  col.count = combine_shares(c, col.shares, params.joint_key, max_m, params.group);
  return col;
}
}  // namespace detail

// Trustees decrypt each aggregate column; counts are bounded by cast_count.
inline TallyRecord decrypt_tally(const std::vector<AggregateContest>& agg, std::span<const TrusteeShare> trustees,
                                 const ElectionParams& params, std::uint64_t cast_count) {
  TallyRecord t;
  t.cast_count = cast_count;
  for (const auto& a : agg) {
    ContestTally ct{a.contest_id, {}};
    for (std::size_t i = 0; i < a.columns.size(); ++i)
      ct.columns.push_back(detail::decrypt_column(a.column_ids[i], a.columns[i], trustees, params, cast_count));
    t.contests.push_back(std::move(ct));
  }
  return t;
}

// Individual decryption of an entry excluded from the tally. UNTALLIED
// entries are deemed spoiled and decrypted the same way.
inline SpoiledDecryption decrypt_spoiled(const BoardEntry& entry, std::uint64_t index, std::span<const TrusteeShare> trustees,
                                         const ElectionParams& params) {
  if (entry.status != BallotStatus::Spoiled && entry.status != BallotStatus::Untallied)
    throw NotSpoiled("entry " + std::to_string(index) + " is " + to_string(entry.status));
  const BallotStyle& style = params.style(entry.record.c_v.style_id);
  SpoiledDecryption d;
  d.index = index;
  for (std::size_t c = 0; c < entry.record.c_v.contests.size(); ++c) {
    const auto& ec = entry.record.c_v.contests[c];
    const auto ids = style.contest(ec.contest_id).column_ids();
    const auto cols = ec.columns();
    ContestTally ct{ec.contest_id, {}};
    for (std::size_t i = 0; i < cols.size(); ++i) ct.columns.push_back(detail::decrypt_column(ids.at(i), cols[i], trustees, params, 1));
    d.contests.push_back(std::move(ct));
  }
  d.plaintext = selections_from_columns(d.contests, style.style_id);
  return d;
}

// Single-writer, append-only board. Status changes after publication are new
// supersession lines; nothing already written is ever modified.
class BulletinBoard {
 public:
  explicit BulletinBoard(ElectionParams params) : params_(std::move(params)) {
    append(board_kind::kHeader, {{"params", to_json(params_)}});
  }

  const ElectionParams& params() const noexcept { return params_; }
  const std::vector<BoardEntry>& entries() const noexcept { return entries_; }
  const std::vector<std::string>& lines() const noexcept { return lines_; }
  const std::optional<TallyRecord>& tally() const noexcept { return tally_; }

  std::uint64_t publish_entry(const EncryptedBallotRecord& rec, BallotStatus status,
                              std::optional<SpoilReason> reason = std::nullopt) {
    if (!board_status_allowed(status)) throw InvalidArgument("board entries are CAST, SPOILED or UNTALLIED");
    bool ok = params_.has_terminal(rec.terminal_id);
    try {
      ok = ok && verify_ballot(rec.c_v, rec.p_v, params_.style(rec.c_v.style_id), params_.joint_key.K, params_.group,
                               params_.election_id);
    } catch (const Error&) {
      ok = false;
    }
    if (!ok) throw RejectInvalidProof("ballot record from " + rec.terminal_id + " does not verify");
    const std::uint64_t index = entries_.size();
    const std::string why = reason ? to_string(*reason) : "";
    entries_.push_back({rec, status, why});
    append(board_kind::kBallot, {{"index", std::to_string(index)}, {"record", to_json(rec)}, {"status", to_string(status)}, {"reason", why}});
    return index;
  }

  void supersede(std::uint64_t index, BallotStatus status, const std::string& reason) {
    if (index >= entries_.size()) throw InvalidArgument("no board entry " + std::to_string(index));
    if (!board_status_allowed(status)) throw InvalidArgument("board entries are CAST, SPOILED or UNTALLIED");
    entries_[index].status = status;
    entries_[index].reason = reason;
    append(board_kind::kStatus, {{"index", std::to_string(index)}, {"status", to_string(status)}, {"reason", reason}});
  }

  void record_close(const std::string& terminal_id, const Digest& final_z, std::uint64_t count) {
    append(board_kind::kClose, {{"terminal", terminal_id}, {"final_z", hex(final_z)}, {"count", std::to_string(count)}});
  }

  std::vector<AggregateContest> aggregate() const { return starlock::aggregate(entries_, params_); }

  std::uint64_t cast_count() const {
    std::uint64_t n = 0;
    for (const auto& e : entries_) n += e.status == BallotStatus::Cast;
    return n;
  }

  const TallyRecord& publish_tally(std::span<const TrusteeShare> trustees) {
    tally_ = decrypt_tally(aggregate(), trustees, params_, cast_count());
    append(board_kind::kTally, to_json(*tally_));
    return *tally_;
  }

  // Publishes the tally built elsewhere; the writer does not re-derive it.
  void publish_tally_record(const TallyRecord& t) {
    tally_ = t;
    append(board_kind::kTally, to_json(t));
  }

  std::vector<SpoiledDecryption> publish_spoiled_decryptions(std::span<const TrusteeShare> trustees) {
    std::vector<SpoiledDecryption> out;
    for (std::uint64_t i = 0; i < entries_.size(); ++i) {
      if (entries_[i].status == BallotStatus::Cast) continue;
      out.push_back(decrypt_spoiled(entries_[i], i, trustees, params_));
      publish_decryption(out.back());
    }
    return out;
  }

  void publish_decryption(const SpoiledDecryption& d) { append(board_kind::kDecryption, to_json(d)); }

  // Signs every byte written so far. Signing again later appends a fresh
  // signature covering the earlier one.
  void sign(const Keypair& office) {
    const std::string msg = text();
    SchnorrSignature sig = starlock::sign(std::span(reinterpret_cast<const std::uint8_t*>(msg.data()), msg.size()), office, params_.group);
    append(board_kind::kSignature, {{"public_key", to_hex(office.pk)}, {"signature", to_json(sig)}});
  }

  std::string text() const {
    std::string out;
    for (const auto& l : lines_) {
      out += l;
      out += '\n';
    }
    return out;
  }

  void save(const std::string& path) const {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw InvalidArgument("cannot write " + path);
    f << text();
  }

 private:
  void append(const std::string& kind, const nlohmann::json& body) {
    const std::string prev = lines_.empty() ? kBoardGenesis : line_digest(lines_.back());
    lines_.push_back(render_line(kind, lines_.size(), prev, body));
  }

  ElectionParams params_;
  std::vector<BoardEntry> entries_;
  std::vector<std::string> lines_;
  std::optional<TallyRecord> tally_;
};

}  // namespace starlock
