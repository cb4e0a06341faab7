#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "starlock/crypto/proofs.hpp"

namespace starlock {

struct Contest {
  std::string contest_id;
  std::vector<std::string> options;    // includes registered write-in candidates
  std::uint32_t selection_limit = 1;   // vote for at most L
  bool writein_slot = false;
  std::vector<std::string> writeins;   // subset of options that are registered write-ins

  // Column labels in ciphertext order: options, then L padding columns,
  // then the write-in counter when present.
  std::vector<std::string> column_ids() const {
    std::vector<std::string> ids = options;
    for (std::uint32_t i = 1; i <= selection_limit; ++i) ids.push_back(padding_id(i));
    if (writein_slot) ids.push_back(kWriteinCounterId);
    return ids;
  }

  static std::string padding_id(std::uint32_t i) { return "(abstain)#" + std::to_string(i); }
  static constexpr const char* kWriteinCounterId = "(write-in)";

  bool operator==(const Contest&) const = default;
};

struct BallotStyle {
  std::string style_id;
  std::vector<Contest> contests;

  void validate() const {
    std::set<std::string> ids;
    if (style_id.empty()) throw InvalidArgument("ballot style without id");
    for (const auto& c : contests) {
      if (!ids.insert(c.contest_id).second) throw InvalidArgument("duplicate contest id '" + c.contest_id + "'");
      if (c.options.empty()) throw InvalidArgument("contest '" + c.contest_id + "' has no options");
      if (c.selection_limit < 1 || c.selection_limit > c.options.size())
        throw InvalidArgument("contest '" + c.contest_id + "' selection limit outside [1, #options]");
      std::set<std::string> opts;
      for (const auto& o : c.options) {
        if (o.empty() || o.front() == '(') throw InvalidArgument("reserved or empty option id '" + o + "'");
        if (!opts.insert(o).second) throw InvalidArgument("duplicate option '" + o + "' in " + c.contest_id);
      }
      for (const auto& w : c.writeins)
        if (!opts.count(w)) throw InvalidArgument("write-in '" + w + "' is not an option of " + c.contest_id);
      if (!c.writein_slot && !c.writeins.empty())
        throw InvalidArgument("contest '" + c.contest_id + "' lists write-ins without a write-in slot");
    }
  }

  const Contest& contest(const std::string& id) const {
    for (const auto& c : contests)
      if (c.contest_id == id) return c;
    throw UnknownOption("no contest '" + id + "' in style '" + style_id + "'");
  }

  bool operator==(const BallotStyle&) const = default;
};

struct PlaintextBallot {
  std::string style_id;
  std::map<std::string, std::set<std::string>> selections;  // contest id -> chosen option ids

  bool operator==(const PlaintextBallot&) const = default;
};

// Drops contests with no selection, so that "absent" and "empty" compare equal.
inline PlaintextBallot without_abstentions(PlaintextBallot pb) {
  std::erase_if(pb.selections, [](const auto& kv) { return kv.second.empty(); });
  return pb;
}

// One contest's 0/1 selection row after padding.
struct EncodedContest {
  std::vector<int> options;
  std::vector<int> padding;
  std::optional<int> writein;

  std::vector<int> columns() const {
    std::vector<int> out = options;
    out.insert(out.end(), padding.begin(), padding.end());
    if (writein) out.push_back(*writein);
    return out;
  }
};

using EncodedBallot = std::vector<EncodedContest>;

inline EncodedBallot encode(const PlaintextBallot& pb, const BallotStyle& style) {
  if (pb.style_id != style.style_id)
    throw UnknownOption("ballot style '" + pb.style_id + "' does not match '" + style.style_id + "'");
  for (const auto& [cid, _] : pb.selections) style.contest(cid);

  EncodedBallot out;
  for (const auto& contest : style.contests) {
    EncodedContest row;
    row.options.assign(contest.options.size(), 0);
    std::size_t chosen = 0;
    bool writein_chosen = false;
    if (auto it = pb.selections.find(contest.contest_id); it != pb.selections.end()) {
      for (const auto& opt : it->second) {
        auto pos = std::find(contest.options.begin(), contest.options.end(), opt);
        if (pos == contest.options.end())
          throw UnknownOption("option '" + opt + "' not in contest '" + contest.contest_id + "'");
        row.options[static_cast<std::size_t>(pos - contest.options.begin())] = 1;
        ++chosen;
        if (std::find(contest.writeins.begin(), contest.writeins.end(), opt) != contest.writeins.end())
          writein_chosen = true;
      }
    }
    if (chosen > contest.selection_limit)
      throw OvervoteRejected(std::to_string(chosen) + " selections in '" + contest.contest_id + "', limit " +
                             std::to_string(contest.selection_limit));
    row.padding.assign(contest.selection_limit, 0);
    for (std::size_t i = 0; i < contest.selection_limit - chosen; ++i) row.padding[i] = 1;
    if (contest.writein_slot) row.writein = writein_chosen ? 1 : 0;
    out.push_back(std::move(row));
  }
  return out;
}

// Inverse of encode on the option columns (padding and counter are implied).
inline PlaintextBallot decode(const std::vector<std::vector<std::uint64_t>>& column_values, const BallotStyle& style) {
  PlaintextBallot pb{style.style_id, {}};
  for (std::size_t c = 0; c < style.contests.size(); ++c) {
    const auto& contest = style.contests[c];
    auto& chosen = pb.selections[contest.contest_id];
    for (std::size_t o = 0; o < contest.options.size(); ++o)
      if (column_values.at(c).at(o) != 0) chosen.insert(contest.options[o]);
  }
  return pb;
}

struct EncryptedContest {
  std::string contest_id;
  std::vector<Ciphertext> options;
  std::vector<Ciphertext> padding;
  std::optional<Ciphertext> writein;

  std::vector<Ciphertext> columns() const {
    std::vector<Ciphertext> out = options;
    out.insert(out.end(), padding.begin(), padding.end());
    if (writein) out.push_back(*writein);
    return out;
  }

  bool operator==(const EncryptedContest&) const = default;
};

struct EncryptedBallot {
  std::string style_id;
  std::vector<EncryptedContest> contests;

  bool operator==(const EncryptedBallot&) const = default;
};

struct ContestProof {
  std::vector<ZeroOneProof> options;
  std::vector<ZeroOneProof> padding;
  std::optional<ZeroOneProof> writein;
  ChaumPedersenProof sum;  // options + padding encrypt exactly L

  std::vector<ZeroOneProof> columns() const {
    std::vector<ZeroOneProof> out = options;
    out.insert(out.end(), padding.begin(), padding.end());
    if (writein) out.push_back(*writein);
    return out;
  }

  bool operator==(const ContestProof&) const = default;
};

struct WellFormednessProof {
  std::vector<ContestProof> contests;

  bool operator==(const WellFormednessProof&) const = default;
};

// Public inputs every ballot proof is bound to.
struct BallotContext {
  const GroupParams& gp;
  const BigInt& K;
  const std::string& election_id;
};

namespace detail {
inline constexpr std::string_view kContestSumDomain = "starlock/contest-sum/v1";

inline Bytes column_context(const BallotContext& ctx, const std::string& style_id, const std::string& contest_id,
                            const std::string& column_id) {
  CanonicalWriter w;
  w.field("starlock/ballot/v1").field(ctx.election_id).field(style_id).field(contest_id).field(column_id);
  return w.bytes();
}

inline DlogEquality contest_sum_statement(const Ciphertext& sum, std::uint32_t limit, const BallotContext& ctx) {
  return {ctx.gp.g, sum.a, ctx.K, ctx.gp.div(sum.b, ctx.gp.gexp(BigInt(limit)))};
}

inline Ciphertext option_and_padding_sum(const EncryptedContest& ec, const GroupParams& gp) {
  Ciphertext sum = Ciphertext::identity();
  for (const auto& c : ec.options) sum = homomorphic_add(sum, c, gp);
  for (const auto& c : ec.padding) sum = homomorphic_add(sum, c, gp);
  return sum;
}
}  // namespace detail

// Encrypts an already-encoded ballot. Exposed separately so tests (and the
// rigged-terminal simulation) can encrypt rows that differ from the voter's choice.
inline std::pair<EncryptedBallot, WellFormednessProof> encrypt_encoded(const EncodedBallot& enc, const BallotStyle& style,
                                                                       const BallotContext& ctx, Rng& rng) {
  const auto& gp = ctx.gp;
  EncryptedBallot eb{style.style_id, {}};
  WellFormednessProof proof;
  for (std::size_t ci = 0; ci < style.contests.size(); ++ci) {
    const Contest& contest = style.contests[ci];
    const EncodedContest& row = enc.at(ci);
    const auto ids = contest.column_ids();
    EncryptedContest ec{contest.contest_id, {}, {}, std::nullopt};
    ContestProof cp;
    BigInt r_sum = 0;

    std::size_t col = 0;
    auto encrypt_column = [&](int bit, bool counts_toward_sum) {
      const BigInt r = rng.between(1, gp.q - 1);
      Ciphertext ct = encrypt_exp(static_cast<std::uint64_t>(bit), r, ctx.K, gp);
      ZeroOneProof zp =
          prove_zero_or_one(ct, bit, r, ctx.K, detail::column_context(ctx, style.style_id, contest.contest_id, ids[col]), gp, rng);
      if (counts_toward_sum) r_sum = gp.reduce(r_sum + r);
      ++col;
      return std::pair{std::move(ct), std::move(zp)};
    };

    for (int bit : row.options) {
      auto [ct, zp] = encrypt_column(bit, true);
      ec.options.push_back(std::move(ct));
      cp.options.push_back(std::move(zp));
    }
    for (int bit : row.padding) {
      auto [ct, zp] = encrypt_column(bit, true);
      ec.padding.push_back(std::move(ct));
      cp.padding.push_back(std::move(zp));
    }
    if (contest.writein_slot) {
      auto [ct, zp] = encrypt_column(row.writein.value_or(0), false);
      ec.writein = std::move(ct);
      cp.writein = std::move(zp);
    }

    const Ciphertext sum = detail::option_and_padding_sum(ec, gp);
    const Bytes sum_ctx = detail::column_context(ctx, style.style_id, contest.contest_id, "(sum)");
    const BigInt w = rng.between(1, gp.q - 1);
    cp.sum = prove_dlog_equality(detail::contest_sum_statement(sum, contest.selection_limit, ctx), r_sum, w,
                                 detail::kContestSumDomain, sum_ctx, gp);
    eb.contests.push_back(std::move(ec));
    proof.contests.push_back(std::move(cp));
  }
  return {std::move(eb), std::move(proof)};
}

inline std::pair<EncryptedBallot, WellFormednessProof> encrypt_ballot(const PlaintextBallot& pb, const BallotStyle& style,
                                                                      const BigInt& K, const GroupParams& gp, Rng& rng,
                                                                      const std::string& election_id) {
  return encrypt_encoded(encode(pb, style), style, BallotContext{gp, K, election_id}, rng);
}

inline bool verify_ballot(const EncryptedBallot& eb, const WellFormednessProof& proof, const BallotStyle& style,
                          const BigInt& K, const GroupParams& gp, const std::string& election_id) {
  const BallotContext ctx{gp, K, election_id};
  if (eb.style_id != style.style_id) return false;
  if (eb.contests.size() != style.contests.size() || proof.contests.size() != style.contests.size()) return false;
  for (std::size_t ci = 0; ci < style.contests.size(); ++ci) {
    const Contest& contest = style.contests[ci];
    const EncryptedContest& ec = eb.contests[ci];
    const ContestProof& cp = proof.contests[ci];
    if (ec.contest_id != contest.contest_id) return false;
    if (ec.options.size() != contest.options.size() || cp.options.size() != contest.options.size()) return false;
    if (ec.padding.size() != contest.selection_limit || cp.padding.size() != contest.selection_limit) return false;
    if (ec.writein.has_value() != contest.writein_slot || cp.writein.has_value() != contest.writein_slot) return false;

    const auto ids = contest.column_ids();
    const auto cts = ec.columns();
    const auto zps = cp.columns();
    for (std::size_t col = 0; col < cts.size(); ++col) {
      if (!verify_zero_or_one(cts[col], zps[col], K,
                              detail::column_context(ctx, style.style_id, contest.contest_id, ids[col]), gp))
        return false;
    }
    const Ciphertext sum = detail::option_and_padding_sum(ec, gp);
    if (!verify_dlog_equality(detail::contest_sum_statement(sum, contest.selection_limit, ctx), cp.sum,
                              detail::kContestSumDomain,
                              detail::column_context(ctx, style.style_id, contest.contest_id, "(sum)"), gp))
      return false;
  }
  return true;
}

// --- canonical bytes (hash-chain input) --------------------------------------

inline CanonicalWriter canonical(const EncryptedBallot& eb) {
  CanonicalWriter w;
  w.field(eb.style_id);
  CanonicalWriter contests;
  for (const auto& ec : eb.contests) {
    CanonicalWriter cw;
    cw.field(ec.contest_id);
    for (const auto& c : ec.columns()) {
      CanonicalWriter ct;
      c.write(ct);
      cw.nested(ct);
    }
    contests.nested(cw);
  }
  w.nested(contests);
  return w;
}

inline CanonicalWriter canonical(const WellFormednessProof& p) {
  CanonicalWriter w;
  for (const auto& cp : p.contests) {
    CanonicalWriter cw;
    for (const auto& zp : cp.columns()) {
      CanonicalWriter z;
      zp.write(z);
      cw.nested(z);
    }
    CanonicalWriter sum;
    cp.sum.write(sum);
    cw.nested(sum);
    w.nested(cw);
  }
  return w;
}

inline CanonicalWriter canonical(const BallotStyle& style) {
  CanonicalWriter w;
  w.field(style.style_id);
  for (const auto& c : style.contests) {
    CanonicalWriter cw;
    cw.field(c.contest_id).field(static_cast<std::uint64_t>(c.selection_limit)).field(c.writein_slot ? "1" : "0");
    CanonicalWriter opts, wis;
    for (const auto& o : c.options) opts.field(o);
    for (const auto& o : c.writeins) wis.field(o);
    cw.nested(opts).nested(wis);
    w.nested(cw);
  }
  return w;
}

// --- JSON ----------------------------------------------------------------------

inline nlohmann::json to_json(const BallotStyle& s) {
  nlohmann::json contests = nlohmann::json::array();
  for (const auto& c : s.contests) {
    contests.push_back({{"contest_id", c.contest_id},
                        {"options", c.options},
                        {"selection_limit", std::to_string(c.selection_limit)},
                        {"writein_slot", c.writein_slot ? "true" : "false"},
                        {"writeins", c.writeins}});
  }
  return {{"style_id", s.style_id}, {"contests", contests}};
}

// Accepts both string and native JSON scalars so hand-written manifests work.
inline BallotStyle ballot_style_from_json(const nlohmann::json& j) {
  try {
    BallotStyle s;
    s.style_id = j.at("style_id").get<std::string>();
    for (const auto& cj : j.at("contests")) {
      Contest c;
      c.contest_id = cj.at("contest_id").get<std::string>();
      c.options = cj.at("options").get<std::vector<std::string>>();
      const auto& lim = cj.value("selection_limit", nlohmann::json("1"));
      c.selection_limit = lim.is_string() ? static_cast<std::uint32_t>(std::stoul(lim.get<std::string>()))
                                          : lim.get<std::uint32_t>();
      const auto& slot = cj.value("writein_slot", nlohmann::json(false));
      c.writein_slot = slot.is_string() ? slot.get<std::string>() == "true" : slot.get<bool>();
      c.writeins = cj.value("writeins", std::vector<std::string>{});
      s.contests.push_back(std::move(c));
    }
    s.validate();
    return s;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("ballot style: ") + e.what());
  }
}

inline nlohmann::json to_json(const PlaintextBallot& pb) {
  nlohmann::json sel = nlohmann::json::object();
  for (const auto& [cid, opts] : pb.selections) sel[cid] = std::vector<std::string>(opts.begin(), opts.end());
  return {{"style_id", pb.style_id}, {"selections", sel}};
}

inline PlaintextBallot plaintext_from_json(const nlohmann::json& j) {
  PlaintextBallot pb;
  pb.style_id = j.at("style_id").get<std::string>();
  for (const auto& [cid, opts] : j.at("selections").items())
    for (const auto& o : opts) pb.selections[cid].insert(o.get<std::string>());
  return pb;
}

inline nlohmann::json to_json(const EncryptedBallot& eb) {
  nlohmann::json contests = nlohmann::json::array();
  for (const auto& ec : eb.contests) {
    nlohmann::json opts = nlohmann::json::array(), pads = nlohmann::json::array();
    for (const auto& c : ec.options) opts.push_back(to_json(c));
    for (const auto& c : ec.padding) pads.push_back(to_json(c));
    nlohmann::json cj{{"contest_id", ec.contest_id}, {"options", opts}, {"padding", pads}};
    if (ec.writein) cj["writein"] = to_json(*ec.writein);
    contests.push_back(std::move(cj));
  }
  return {{"style_id", eb.style_id}, {"contests", contests}};
}

inline EncryptedBallot encrypted_ballot_from_json(const nlohmann::json& j) {
  EncryptedBallot eb;
  eb.style_id = j.at("style_id").get<std::string>();
  for (const auto& cj : j.at("contests")) {
    EncryptedContest ec;
    ec.contest_id = cj.at("contest_id").get<std::string>();
    for (const auto& c : cj.at("options")) ec.options.push_back(ciphertext_from_json(c));
    for (const auto& c : cj.at("padding")) ec.padding.push_back(ciphertext_from_json(c));
    if (cj.contains("writein")) ec.writein = ciphertext_from_json(cj.at("writein"));
    eb.contests.push_back(std::move(ec));
  }
  return eb;
}

inline nlohmann::json to_json(const WellFormednessProof& p) {
  nlohmann::json contests = nlohmann::json::array();
  for (const auto& cp : p.contests) {
    nlohmann::json opts = nlohmann::json::array(), pads = nlohmann::json::array();
    for (const auto& z : cp.options) opts.push_back(to_json(z));
    for (const auto& z : cp.padding) pads.push_back(to_json(z));
    nlohmann::json cj{{"options", opts}, {"padding", pads}, {"sum", to_json(cp.sum)}};
    if (cp.writein) cj["writein"] = to_json(*cp.writein);
    contests.push_back(std::move(cj));
  }
  return {{"contests", contests}};
}

inline WellFormednessProof proof_from_json(const nlohmann::json& j) {
  WellFormednessProof p;
  for (const auto& cj : j.at("contests")) {
    ContestProof cp;
    for (const auto& z : cj.at("options")) cp.options.push_back(zero_one_from_json(z));
    for (const auto& z : cj.at("padding")) cp.padding.push_back(zero_one_from_json(z));
    if (cj.contains("writein")) cp.writein = zero_one_from_json(cj.at("writein"));
    cp.sum = cp_proof_from_json(cj.at("sum"));
    p.contests.push_back(std::move(cp));
  }
  return p;
}

}  // namespace starlock
