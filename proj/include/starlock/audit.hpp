#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "starlock/verifier.hpp"

namespace starlock {

// ---------------------------------------------------------------- compliance

struct ComplianceReport {
  std::uint64_t cast_records = 0;
  std::uint64_t papers = 0;
  std::vector<std::string> cast_without_paper;     // electronic CAST record, no paper in the box
  std::vector<std::string> paper_without_record;   // paper in the box, no CAST record

  bool clean() const { return cast_without_paper.empty() && paper_without_record.empty(); }

  nlohmann::json to_json() const {
    return {{"cast_records", std::to_string(cast_records)},
            {"papers", std::to_string(papers)},
            {"cast_without_paper", cast_without_paper},
            {"paper_without_record", paper_without_record},
            {"clean", clean()}};
  }
};

inline ComplianceReport compliance_check(const std::vector<std::string>& cast_serials,
                                         const std::vector<std::string>& box_serials) {
  ComplianceReport r;
  const std::set<std::string> cast(cast_serials.begin(), cast_serials.end());
  const std::set<std::string> box(box_serials.begin(), box_serials.end());
  r.cast_records = cast.size();
  r.papers = box_serials.size();
  std::set_difference(cast.begin(), cast.end(), box.begin(), box.end(), std::back_inserter(r.cast_without_paper));
  std::set_difference(box.begin(), box.end(), cast.begin(), cast.end(), std::back_inserter(r.paper_without_record));
  return r;
}

// ---------------------------------------------------------------- public PRNG

// Twenty decimal digits from rolling ten-sided dice.
struct DiceSeed {
  std::string digits;

  static DiceSeed parse(const std::string& s) {
    if (s.size() != 20 || s.find_first_not_of("0123456789") != std::string::npos)
      throw InvalidArgument("dice seed must be exactly 20 decimal digits");
    return {s};
  }
};

// index_j = SHA-256(seed "," j) as a big-endian integer, mod N; j = 1, 2, ...
inline std::uint64_t prng_index(const DiceSeed& seed, std::uint64_t j, std::uint64_t n) {
  if (n < 1) throw InvalidArgument("PRNG population must be non-empty");
  const Digest d = sha256(seed.digits + "," + std::to_string(j));
  const BigInt v = from_bytes(d) % BigInt(static_cast<unsigned long>(n));
  return v.get_ui();
}

inline std::vector<std::uint64_t> prng_sequence(const DiceSeed& seed, std::uint64_t n, std::size_t count) {
  std::vector<std::uint64_t> out;
  for (std::size_t j = 1; j <= count; ++j) out.push_back(prng_index(seed, j, n));
  return out;
}

// ---------------------------------------------------------------- Kaplan-Markov

struct KmState {
  std::uint64_t n = 0;  // cast ballots
  std::uint64_t v = 0;  // smallest reported margin, in votes
  double alpha = 0.1;

  double u() const {
    if (v == 0) throw MarginNotPositive("reported margin is zero");
    return 2.0 * static_cast<double>(n) / static_cast<double>(v);
  }
};

// Running factor for one draw with overstatement e in votes.
inline double km_factor(double u, int e) {
  if (e < -2 || e > 2) throw InvalidArgument("overstatement outside [-2, 2]");
  if (e == 2) return std::numeric_limits<double>::infinity();
  return (1.0 - 1.0 / u) / (1.0 - e / 2.0);
}

inline double km_risk(const KmState& st, const std::vector<int>& overstatements) {
  const double u = st.u();
  if (!(u > 1.0)) throw MarginNotPositive("U = 2N/V must exceed 1");
  double p = 1.0;
  for (int e : overstatements) p *= km_factor(u, e);
  return p;
}

// ---------------------------------------------------------------- outcomes

struct ContestOutcome {
  std::string contest_id;
  std::map<std::string, std::uint64_t> counts;  // real options only
  std::vector<std::string> winners;             // top L, ties broken by option order
  std::vector<std::string> losers;
};

inline ContestOutcome outcome_from_counts(const Contest& c, const std::map<std::string, std::uint64_t>& counts) {
  ContestOutcome o{c.contest_id, counts, {}, {}};
  std::vector<std::string> order = c.options;
  std::stable_sort(order.begin(), order.end(), [&](const auto& a, const auto& b) { return counts.at(a) > counts.at(b); });
  for (std::size_t i = 0; i < order.size(); ++i) (i < c.selection_limit ? o.winners : o.losers).push_back(order[i]);
  return o;
}

// Reported outcome from the board's decrypted tally.
inline std::vector<ContestOutcome> reported_outcomes(const TallyRecord& t, const ElectionParams& params) {
  std::vector<ContestOutcome> out;
  for (const auto& c : params.contest_catalog()) {
    std::map<std::string, std::uint64_t> counts;
    for (const auto& o : c.options) counts[o] = 0;
    for (const auto& ct : t.contests)
      if (ct.contest_id == c.contest_id)
        for (const auto& col : ct.columns)
          if (counts.count(col.id)) counts[col.id] = col.count;
    out.push_back(outcome_from_counts(c, counts));
  }
  return out;
}

// Smallest winner-loser margin over every audited contest.
inline std::int64_t smallest_margin(const std::vector<ContestOutcome>& outcomes) {
  std::optional<std::int64_t> best;
  for (const auto& o : outcomes)
    for (const auto& w : o.winners)
      for (const auto& l : o.losers) {
        const std::int64_t m = static_cast<std::int64_t>(o.counts.at(w)) - static_cast<std::int64_t>(o.counts.at(l));
        if (!best || m < *best) best = m;
      }
  if (!best) throw AuditPrecondition("no contest has a loser; nothing to audit");
  return *best;
}

// Maximum over (winner, loser) pairs of the overstatement of that pair's
// margin by the CVR relative to the paper.
inline int overstatement(const std::vector<ContestOutcome>& outcomes,
                         const std::map<std::string, std::set<std::string>>& cvr,
                         const std::map<std::string, std::set<std::string>>& paper) {
  auto has = [](const auto& m, const std::string& c, const std::string& o) {
    auto it = m.find(c);
    return it != m.end() && it->second.count(o) ? 1 : 0;
  };
  std::optional<int> worst;
  for (const auto& o : outcomes)
    for (const auto& w : o.winners)
      for (const auto& l : o.losers) {
        const int e = (has(cvr, o.contest_id, w) - has(cvr, o.contest_id, l)) -
                      (has(paper, o.contest_id, w) - has(paper, o.contest_id, l));
        if (!worst || e > *worst) worst = e;
      }
  return worst.value_or(0);
}

// ---------------------------------------------------------------- commitments

struct ContestOpening {
  std::set<std::string> selections;
};

struct BallotOpening {
  std::uint64_t index = 0;  // board entry
  std::string serial;
  std::string style_id;
  std::string salt_hex;  // 128 bits, revealed only when drawn
  std::map<std::string, ContestOpening> contests;
};

// Per-contest commitment over the option bits, bound to the board index.
inline Digest cvr_commitment(std::uint64_t index, const Contest& c, const std::set<std::string>& selections,
                             const std::string& salt_hex) {
  CanonicalWriter w;
  w.field("starlock/cvr/v1").field(index).field(c.contest_id);
  CanonicalWriter bits;
  for (const auto& o : c.options) bits.field(std::uint64_t{selections.count(o) ? 1u : 0u});
  w.nested(bits).field(salt_hex);
  return w.digest();
}

// Published before the dice are rolled: per-contest commitment tables,
// sorted so rows of one ballot cannot be lined up across contests, and the
// serial -> board index map.
struct AuditManifest {
  std::map<std::string, std::vector<std::string>> contest_tables;
  std::map<std::string, std::uint64_t> serial_index;

  nlohmann::json to_json() const {
    nlohmann::json si = nlohmann::json::object();
    for (const auto& [s, i] : serial_index) si[s] = std::to_string(i);
    return {{"contests", contest_tables}, {"serials", si}};
  }

  static AuditManifest from_json(const nlohmann::json& j) {
    try {
      AuditManifest m;
      m.contest_tables = j.at("contests").get<std::map<std::string, std::vector<std::string>>>();
      for (const auto& [s, i] : j.at("serials").items()) m.serial_index[s] = parse_u64(i);
      return m;
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(std::string("audit manifest: ") + e.what());
    }
  }
};

inline nlohmann::json to_json(const BallotOpening& b) {
  nlohmann::json cs = nlohmann::json::object();
  for (const auto& [c, o] : b.contests) cs[c] = std::vector<std::string>(o.selections.begin(), o.selections.end());
  return {{"index", std::to_string(b.index)}, {"serial", b.serial}, {"style_id", b.style_id}, {"salt", b.salt_hex}, {"contests", cs}};
}

inline BallotOpening ballot_opening_from_json(const nlohmann::json& j) {
  try {
    BallotOpening b;
    b.index = parse_u64(j.at("index"));
    b.serial = j.at("serial").get<std::string>();
    b.style_id = j.at("style_id").get<std::string>();
    b.salt_hex = j.at("salt").get<std::string>();
    for (const auto& [c, opts] : j.at("contests").items())
      for (const auto& o : opts) b.contests[c].selections.insert(o.get<std::string>());
    return b;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("cvr opening: ") + e.what());
  }
}

struct CastRecordForAudit {
  std::uint64_t index;
  std::string serial;
  PlaintextBallot cvr;
};

// Builds the commitments after polls close from judge-station data.
inline std::pair<AuditManifest, std::vector<BallotOpening>> build_manifest(const std::vector<CastRecordForAudit>& cast,
                                                                           const ElectionParams& params, Rng& rng) {
  AuditManifest m;
  std::vector<BallotOpening> openings;
  for (const auto& c : params.contest_catalog()) m.contest_tables[c.contest_id];
  for (const auto& r : cast) {
    const BallotStyle& style = params.style(r.cvr.style_id);
    BallotOpening o{r.index, r.serial, style.style_id, hex(rng.bytes(16)), {}};
    for (const auto& c : style.contests) {
      std::set<std::string> sel;
      if (auto it = r.cvr.selections.find(c.contest_id); it != r.cvr.selections.end()) sel = it->second;
      m.contest_tables[c.contest_id].push_back(hex(cvr_commitment(r.index, c, sel, o.salt_hex)));
      o.contests[c.contest_id].selections = std::move(sel);
    }
    m.serial_index[r.serial] = r.index;
    openings.push_back(std::move(o));
  }
  for (auto& [_, table] : m.contest_tables) std::sort(table.begin(), table.end());
  return {std::move(m), std::move(openings)};
}

// ---------------------------------------------------------------- the audit

struct PaperBallot {
  std::string serial;
  PlaintextBallot interpretation;  // manual reading of the printed summary
};

inline nlohmann::json to_json(const PaperBallot& p) { return {{"serial", p.serial}, {"selections", to_json(p.interpretation)}}; }

inline PaperBallot paper_from_json(const nlohmann::json& j) {
  try {
    return {j.at("serial").get<std::string>(), plaintext_from_json(j.at("selections"))};
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("paper ballot: ") + e.what());
  }
}

enum class AuditVerdict { Confirmed, FullHandCount };

struct AuditDraw {
  std::uint64_t draw = 0;   // j
  std::uint64_t index = 0;  // board entry drawn
  int e = 0;
  double p = 1.0;
};

struct AuditResult {
  AuditVerdict verdict = AuditVerdict::FullHandCount;
  double p = 1.0;
  std::uint64_t n = 0;
  std::uint64_t v = 0;
  double u = 0;
  std::vector<AuditDraw> trajectory;
  std::vector<ContestOutcome> hand_count;  // filled on escalation

  nlohmann::json to_json() const {
    auto num = [](double x) -> nlohmann::json { return std::isinf(x) ? nlohmann::json("inf") : nlohmann::json(x); };
    nlohmann::json traj = nlohmann::json::array();
    for (const auto& d : trajectory)
      traj.push_back({{"draw_j", d.draw}, {"index", d.index}, {"e_j", d.e}, {"P_j", num(d.p)}});
    nlohmann::json j{{"verdict", verdict == AuditVerdict::Confirmed ? "CONFIRMED" : "FULL_HAND_COUNT"},
                     {"P", num(p)},
                     {"N", n},
                     {"V", v},
                     {"U", u},
                     {"draws", trajectory.size()},
                     {"trajectory", traj}};
    if (verdict == AuditVerdict::FullHandCount) {
      nlohmann::json hc = nlohmann::json::array();
      for (const auto& o : hand_count) hc.push_back({{"contest", o.contest_id}, {"counts", o.counts}, {"winners", o.winners}});
      j["hand_count"] = hc;
    }
    return j;
  }
};

struct AuditInputs {
  const PublishedBoard& board;
  const ElectionParams& params;
  const AuditManifest& manifest;
  const std::vector<BallotOpening>& openings;  // held by the official; only drawn ones are opened
  const std::vector<PaperBallot>& papers;
};

inline std::vector<ContestOutcome> hand_count(const std::vector<PaperBallot>& papers, const ElectionParams& params) {
  std::vector<ContestOutcome> out;
  for (const auto& c : params.contest_catalog()) {
    std::map<std::string, std::uint64_t> counts;
    for (const auto& o : c.options) counts[o] = 0;
    for (const auto& p : papers)
      if (auto it = p.interpretation.selections.find(c.contest_id); it != p.interpretation.selections.end())
        for (const auto& o : it->second)
          if (counts.count(o)) ++counts[o];
    out.push_back(outcome_from_counts(c, counts));
  }
  return out;
}

inline AuditResult run_audit(const AuditInputs& in, const DiceSeed& seed, double alpha) {
  if (!in.board.tally) throw AuditPrecondition("board has no tally");
  std::vector<std::uint64_t> population;
  for (const auto& e : in.board.entries)
    if (e.status == "CAST") population.push_back(e.index);
  std::sort(population.begin(), population.end());

  std::map<std::uint64_t, const PaperBallot*> paper_by_index;
  for (const auto& p : in.papers) {
    auto it = in.manifest.serial_index.find(p.serial);
    if (it == in.manifest.serial_index.end()) throw AuditPrecondition("paper " + p.serial + " has no manifest entry");
    paper_by_index[it->second] = &p;
  }
  if (in.manifest.serial_index.size() != population.size() || paper_by_index.size() != population.size())
    throw AuditPrecondition("compliance not clean: papers, manifest and CAST entries disagree");
  for (const auto& [s, idx] : in.manifest.serial_index)
    if (!std::binary_search(population.begin(), population.end(), idx))
      throw AuditPrecondition("manifest serial " + s + " maps to a non-CAST entry");

  std::map<std::uint64_t, const BallotOpening*> opening_by_index;
  for (const auto& o : in.openings) opening_by_index[o.index] = &o;

  const auto outcomes = reported_outcomes(*in.board.tally, in.params);
  const std::int64_t margin = smallest_margin(outcomes);
  if (margin <= 0) throw MarginNotPositive("smallest reported margin is " + std::to_string(margin));

  AuditResult r;
  r.n = population.size();
  r.v = static_cast<std::uint64_t>(margin);
  const KmState st{r.n, r.v, alpha};
  r.u = st.u();
  if (!(r.u > 1.0)) throw MarginNotPositive("U = 2N/V must exceed 1");

  const auto catalog = in.params.contest_catalog();
  double p = 1.0;
  for (std::uint64_t j = 1;; ++j) {
    if (p <= alpha) {
      r.verdict = AuditVerdict::Confirmed;
      break;
    }
    if (std::isinf(p) || j > r.n) {
      r.verdict = AuditVerdict::FullHandCount;
      r.hand_count = hand_count(in.papers, in.params);
      break;
    }
    const std::uint64_t idx = population[prng_index(seed, j, r.n)];
    auto oit = opening_by_index.find(idx);
    if (oit == opening_by_index.end()) throw CommitmentMismatch("no opening for board entry " + std::to_string(idx));
    const BallotOpening& op = *oit->second;
    const BallotStyle& style = in.params.style(op.style_id);
    bool covers = op.contests.size() == style.contests.size();
    for (const auto& c : style.contests) covers = covers && op.contests.count(c.contest_id);
    for (const auto& e : in.board.entries)
      if (e.index == idx) covers = covers && e.c_v.style_id == op.style_id;
    if (!covers) throw CommitmentMismatch("opening of entry " + std::to_string(idx) + " does not cover its ballot style");
    std::map<std::string, std::set<std::string>> cvr;
    for (const auto& [cid, co] : op.contests) {
      const Contest* c = nullptr;
      for (const auto& k : catalog)
        if (k.contest_id == cid) c = &k;
      if (!c) throw CommitmentMismatch("opening names unknown contest " + cid);
      const auto& table = in.manifest.contest_tables.at(cid);
      const std::string digest = hex(cvr_commitment(idx, *c, co.selections, op.salt_hex));
      if (!std::binary_search(table.begin(), table.end(), digest))
        throw CommitmentMismatch("opening of entry " + std::to_string(idx) + " contest " + cid + " matches no commitment");
      cvr[cid] = co.selections;
    }
    const int e = overstatement(outcomes, cvr, paper_by_index.at(idx)->interpretation.selections);
    p *= km_factor(r.u, e);
    r.trajectory.push_back({j, idx, e, p});
  }
  r.p = p;
  return r;
}

}  // namespace starlock
