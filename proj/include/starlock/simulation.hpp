#pragma once

// Scripted end-to-end election runs: one polling place driven by a voter
// script, then compliance, board publication, tally and audit artifacts.

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "starlock/audit.hpp"
#include "starlock/board.hpp"
#include "starlock/pollsite/site.hpp"

namespace starlock {

enum class VoterAction { Cast, Spoil, Challenge, Abandon, Provisional };

inline VoterAction voter_action_from_string(const std::string& s) {
  if (s == "cast") return VoterAction::Cast;
  if (s == "spoil") return VoterAction::Spoil;
  if (s == "challenge") return VoterAction::Challenge;
  if (s == "abandon") return VoterAction::Abandon;
  if (s == "provisional") return VoterAction::Provisional;
  throw ParseError("unknown voter action '" + s + "'");
}

inline std::string to_string(VoterAction a) {
  switch (a) {
    case VoterAction::Cast: return "cast";
    case VoterAction::Spoil: return "spoil";
    case VoterAction::Challenge: return "challenge";
    case VoterAction::Abandon: return "abandon";
    case VoterAction::Provisional: return "provisional";
  }
  return "?";
}

struct VoterScript {
  std::string terminal;
  PlaintextBallot selections;  // carries the style id
  VoterAction action = VoterAction::Cast;
  Adjudication adjudication = Adjudication::Accept;  // provisional only
  std::optional<PlaintextBallot> revote;             // after spoil or challenge
};

struct PaperAlteration {
  std::size_t voter = 0;
  PlaintextBallot reads_as;  // manual interpretation replaces the printed selections
};

struct Cheats {
  std::vector<std::string> rigged_terminals;
  std::set<std::size_t> scan_drop;   // voters whose paper is deposited but not scanned
  std::set<std::size_t> lost_paper;  // voters whose scanned paper later vanishes
  double stray_mark_rate = 0.0;
  std::vector<PaperAlteration> altered_papers;
};

struct FaultRates {
  double drop = 0, duplicate = 0, delay = 0;
};

struct Scenario {
  std::string election_id = "election";
  std::string seed = "0";
  std::string group;  // TEST, SIM or PROD; empty leaves the choice to the caller
  std::uint32_t n = 1, k = 1;
  std::vector<BallotStyle> styles;
  std::vector<std::string> terminals;
  std::uint64_t ttl = kDefaultTtl;
  std::vector<VoterScript> voters;
  Cheats cheats;
  FaultRates faults;
};

namespace detail {
inline std::size_t index_field(const nlohmann::json& j) {
  return j.is_string() ? std::stoull(j.get<std::string>()) : j.get<std::size_t>();
}
inline double real_field(const nlohmann::json& j) { return j.is_string() ? std::stod(j.get<std::string>()) : j.get<double>(); }
inline PlaintextBallot selections_field(const std::string& style, const nlohmann::json& j) {
  return plaintext_from_json({{"style_id", style}, {"selections", j}});
}
}  // namespace detail

inline Scenario scenario_from_json(const nlohmann::json& j) {
  try {
    Scenario s;
    s.election_id = j.value("election_id", s.election_id);
    const auto& seed = j.at("seed");
    s.seed = seed.is_string() ? seed.get<std::string>() : seed.dump();
    s.group = j.value("group", "");
    if (!s.group.empty() && s.group != "TEST" && s.group != "SIM" && s.group != "PROD")
      throw ParseError("unknown group " + s.group);
    if (j.contains("trustees")) {
      s.n = static_cast<std::uint32_t>(detail::index_field(j["trustees"].at("n")));
      s.k = static_cast<std::uint32_t>(detail::index_field(j["trustees"].at("k")));
    }
    for (const auto& st : j.at("styles")) s.styles.push_back(ballot_style_from_json(st));
    s.terminals = j.at("terminals").get<std::vector<std::string>>();
    if (j.contains("ttl")) s.ttl = detail::index_field(j["ttl"]);
    for (const auto& v : j.value("voters", nlohmann::json::array())) {
      VoterScript vs;
      const std::string style = v.at("style").get<std::string>();
      vs.terminal = v.value("terminal", s.terminals.empty() ? std::string() : s.terminals.front());
      vs.selections = detail::selections_field(style, v.value("selections", nlohmann::json::object()));
      vs.action = voter_action_from_string(v.value("action", "cast"));
      const std::string adj = v.value("adjudication", "ACCEPT");
      if (adj != "ACCEPT" && adj != "REJECT") throw ParseError("adjudication must be ACCEPT or REJECT");
      vs.adjudication = adj == "ACCEPT" ? Adjudication::Accept : Adjudication::Reject;
      if (v.contains("revote")) vs.revote = detail::selections_field(style, v["revote"]);
      s.voters.push_back(std::move(vs));
    }
    if (j.contains("cheats")) {
      const auto& c = j["cheats"];
      s.cheats.rigged_terminals = c.value("rigged_terminals", std::vector<std::string>{});
      for (const auto& i : c.value("scan_drop", nlohmann::json::array())) s.cheats.scan_drop.insert(detail::index_field(i));
      for (const auto& i : c.value("lost_paper", nlohmann::json::array())) s.cheats.lost_paper.insert(detail::index_field(i));
      if (c.contains("stray_mark_rate")) s.cheats.stray_mark_rate = detail::real_field(c["stray_mark_rate"]);
      for (const auto& a : c.value("altered_papers", nlohmann::json::array())) {
        const std::size_t voter = detail::index_field(a.at("voter"));
        if (voter >= s.voters.size()) throw ParseError("altered paper for unknown voter");
        s.cheats.altered_papers.push_back({voter, detail::selections_field(s.voters[voter].selections.style_id, a.at("selections"))});
      }
    }
    if (j.contains("faults")) {
      const auto& f = j["faults"];
      if (f.contains("drop")) s.faults.drop = detail::real_field(f["drop"]);
      if (f.contains("duplicate")) s.faults.duplicate = detail::real_field(f["duplicate"]);
      if (f.contains("delay")) s.faults.delay = detail::real_field(f["delay"]);
    }
    // Cross-references.
    std::set<std::string> style_ids, terminal_ids(s.terminals.begin(), s.terminals.end());
    for (const auto& st : s.styles) {
      st.validate();
      if (!style_ids.insert(st.style_id).second) throw ParseError("duplicate style " + st.style_id);
    }
    for (const auto& v : s.voters) {
      if (!style_ids.count(v.selections.style_id)) throw ParseError("voter references undefined style " + v.selections.style_id);
      if (!terminal_ids.count(v.terminal)) throw ParseError("voter references undefined terminal " + v.terminal);
    }
    for (const auto& t : s.cheats.rigged_terminals)
      if (!terminal_ids.count(t)) throw ParseError("rigged terminal " + t + " is not defined");
    return s;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("scenario: ") + e.what());
  } catch (const std::invalid_argument&) {
    throw ParseError("scenario: malformed number");
  }
}

struct ReceiptCheck {
  std::size_t voter = 0;
  std::string serial;  // private to the simulation; never published with the receipt
  Receipt receipt;
  std::string expected;  // CAST or SPOILED (UNTALLIED entries count as spoiled)
};

struct ChallengeCheck {
  std::size_t voter = 0;
  std::uint64_t index = 0;
  PlaintextBallot intent;
  PlaintextBallot decrypted;
  bool matches = false;
};

struct SimulationResult {
  ElectionParams params;
  std::string board_text;
  std::string events_jsonl;
  ComplianceReport compliance;
  std::vector<PaperBallot> papers;  // audit population (set-aside papers excluded)
  std::vector<PaperBallot> set_aside;
  AuditManifest manifest;
  std::vector<BallotOpening> openings;
  std::vector<ReceiptCheck> receipts;
  std::vector<ChallengeCheck> challenges;
  std::vector<std::string> timed_out;
  std::map<std::string, std::map<std::string, std::uint64_t>> oracle;  // intent counts over CAST ballots
  std::map<std::string, std::map<std::string, std::uint64_t>> tally;   // decrypted counts
  BusStats bus;
  std::vector<LogFinding> log_findings;
  std::vector<ChainMismatch> chain_findings;

  bool challenge_mismatch() const {
    for (const auto& c : challenges)
      if (!c.matches) return true;
    return false;
  }

  nlohmann::json summary() const {
    std::map<std::string, std::uint64_t> statuses;
    for (const auto& e : parse_published_board(board_text).entries) ++statuses[e.status];
    nlohmann::json ch = nlohmann::json::array();
    for (const auto& c : challenges)
      ch.push_back({{"voter", c.voter}, {"index", c.index}, {"matches", c.matches}, {"intent", to_json(c.intent)}, {"decrypted", to_json(c.decrypted)}});
    return {{"election_id", params.election_id},
            {"entries", statuses},
            {"tally", tally},
            {"compliance", compliance.to_json()},
            {"challenges", ch},
            {"challenge_mismatch", challenge_mismatch()},
            {"timed_out", timed_out},
            {"bus", {{"sent", bus.sent}, {"dropped", bus.dropped_attempts}, {"duplicates", bus.duplicates_suppressed}, {"delayed", bus.delayed}}}};
  }
};

// Setup used when no key directory is supplied: deterministic from the seed.
inline ElectionSetup scenario_setup(const Scenario& s, const GroupParams& gp) {
  Rng rng = Rng::from_string(s.seed).fork("keygen");
  return make_election(s.election_id, s.styles, s.terminals, s.n, s.k, gp, rng);
}

// Attaches a scenario's election to externally generated keys.
inline ElectionSetup scenario_setup_with_keys(const Scenario& s, const GroupParams& gp, const JointPublicKey& jpk,
                                              std::vector<TrusteeShare> shares, const Keypair& office) {
  Rng rng = Rng::from_string(s.seed).fork("salt");
  ElectionSetup out;
  out.shares = std::move(shares);
  out.office = office;
  out.params = {s.election_id, "office", gp, jpk, office.pk, s.styles, s.terminals, hex(rng.bytes(16))};
  out.params.validate();
  return out;
}

namespace detail {
// Stray mark: the reader sees one selection of the first marked contest as
// unmarked; a fully blank ballot reads as a vote for the first option.
inline PlaintextBallot stray_mark(PlaintextBallot pb, const BallotStyle& style) {
  for (const auto& c : style.contests) {
    auto it = pb.selections.find(c.contest_id);
    if (it != pb.selections.end() && !it->second.empty()) {
      it->second.erase(it->second.begin());
      return pb;
    }
  }
  if (!style.contests.empty()) pb.selections[style.contests.front().contest_id].insert(style.contests.front().options.front());
  return pb;
}
}  // namespace detail

inline SimulationResult run_simulation(const Scenario& sc, const ElectionSetup& setup) {
  const ElectionParams& params = setup.params;
  Rng root = Rng::from_string(sc.seed);
  std::shared_ptr<FaultInjector> faults = std::make_shared<NoFaults>();
  if (sc.faults.drop > 0 || sc.faults.duplicate > 0 || sc.faults.delay > 0)
    faults = std::make_shared<RandomFaults>(sc.faults.drop, sc.faults.duplicate, sc.faults.delay, root.fork("faults"));
  PollSite site(params, root.fork("site"), faults);
  for (const auto& t : sc.cheats.rigged_terminals) site.terminal(t).rig(shift_first_contest);

  SimulationResult res;
  res.params = params;
  std::map<std::string, PlaintextBallot> intent;  // serial -> voter intent
  std::map<std::string, std::size_t> voter_of;    // serial -> voter
  std::vector<std::pair<std::size_t, std::string>> challenged;
  std::vector<std::pair<std::string, Adjudication>> provisional;

  auto session = [&](std::size_t i, const std::string& terminal, const PlaintextBallot& pb, bool prov) {
    Token t = site.issue_token(pb.style_id, prov);
    SessionOutcome s = site.vote_session(terminal, t.code, pb);
    intent[s.summary.serial.text] = pb;
    voter_of[s.summary.serial.text] = i;
    res.receipts.push_back({i, s.summary.serial.text, s.receipt, {}});
    return s;
  };
  auto deposit = [&](std::size_t i, const PrintedSummary& paper) {
    site.deposit(paper, !sc.cheats.scan_drop.count(i));
    if (sc.cheats.lost_paper.count(i)) site.lose_paper(paper.serial);
  };

  for (std::size_t i = 0; i < sc.voters.size(); ++i) {
    const VoterScript& v = sc.voters[i];
    switch (v.action) {
      case VoterAction::Cast: {
        auto s = session(i, v.terminal, v.selections, false);
        deposit(i, s.summary);
        break;
      }
      case VoterAction::Spoil:
      case VoterAction::Challenge: {
        auto s = session(i, v.terminal, v.selections, false);
        const bool challenge = v.action == VoterAction::Challenge;
        site.spoil(s.summary.serial, challenge ? SpoilReason::Challenge : SpoilReason::Voter);
        if (challenge) challenged.push_back({i, s.summary.serial.text});
        if (v.revote) deposit(i, session(i, v.terminal, *v.revote, false).summary);
        break;
      }
      case VoterAction::Abandon:
        session(i, v.terminal, v.selections, false);
        break;
      case VoterAction::Provisional: {
        auto s = session(i, v.terminal, v.selections, true);
        site.deposit_provisional(s.summary);
        provisional.push_back({s.summary.serial.text, v.adjudication});
        break;
      }
    }
    for (const auto& s : site.timeout_sweep(sc.ttl)) res.timed_out.push_back(s.text);
  }
  for (const auto& [serial, decision] : provisional) site.adjudicate(BallotSerial{serial}, decision);
  for (const auto& s : site.timeout_sweep(sc.ttl)) res.timed_out.push_back(s.text);
  const CloseResult closing = site.close();

  // Compliance reconciliation before anything is published.
  JudgeStation& judge = site.judge();
  std::vector<std::string> cast_serials, box_serials;
  for (const auto* r : judge.records())
    if (r->status == BallotStatus::Cast) cast_serials.push_back(r->serial.text);
  for (const auto& s : site.box_serials()) box_serials.push_back(s.text);
  res.compliance = compliance_check(cast_serials, box_serials);
  for (const auto& s : res.compliance.cast_without_paper) judge.demote_untallied(BallotSerial{s});
  const std::set<std::string> set_aside(res.compliance.paper_without_record.begin(), res.compliance.paper_without_record.end());

  // Publication.
  BulletinBoard board(params);
  std::map<std::string, std::uint64_t> index_of;
  std::vector<CastRecordForAudit> cast_for_audit;
  for (const auto* r : judge.records()) {
    const std::uint64_t idx = board.publish_entry(r->record, r->status, r->spoil_reason);
    index_of[r->serial.text] = idx;
    if (r->status == BallotStatus::Cast) {
      cast_for_audit.push_back({idx, r->serial.text, judge.cvr(r->serial)});
      const PlaintextBallot& pb = intent.at(r->serial.text);
      for (const auto& c : params.style(pb.style_id).contests)
        for (const auto& o : c.options) res.oracle[c.contest_id][o] += pb.selections.count(c.contest_id) && pb.selections.at(c.contest_id).count(o);
    }
  }
  for (auto& rc : res.receipts)
    rc.expected = judge.record(BallotSerial{rc.serial}).status == BallotStatus::Cast ? "CAST" : "SPOILED";
  for (const auto& m : params.terminals) board.record_close(m, closing.finals.at(m).first, closing.finals.at(m).second);
  const TallyRecord& t = board.publish_tally(setup.shares);
  for (const auto& c : params.contest_catalog()) {
    for (const auto& o : c.options) res.oracle[c.contest_id][o] += 0;
    for (const auto& ct : t.contests)
      if (ct.contest_id == c.contest_id)
        for (const auto& col : ct.columns)
          if (col.id.front() != '(') res.tally[c.contest_id][col.id] = col.count;
  }
  const auto decryptions = board.publish_spoiled_decryptions(setup.shares);
  board.sign(setup.office);
  res.board_text = board.text();
  res.events_jsonl = judge.log().to_jsonl();

  for (const auto& [voter, serial] : challenged) {
    const std::uint64_t idx = index_of.at(serial);
    for (const auto& d : decryptions)
      if (d.index == idx) {
        const PlaintextBallot want = without_abstentions(intent.at(serial));
        const PlaintextBallot got = without_abstentions(d.plaintext);
        res.challenges.push_back({voter, idx, want, got, want == got});
      }
  }

  // Audit artifacts.
  Rng audit_rng = root.fork("audit");
  std::tie(res.manifest, res.openings) = build_manifest(cast_for_audit, params, audit_rng);
  std::map<std::size_t, PlaintextBallot> altered;
  for (const auto& a : sc.cheats.altered_papers) altered[a.voter] = a.reads_as;
  Rng stray = root.fork("stray");
  for (const auto& paper : site.ballot_box()) {
    PaperBallot pb{paper.serial.text, paper.selections};
    const std::size_t voter = voter_of.at(paper.serial.text);
    if (auto it = altered.find(voter); it != altered.end()) pb.interpretation = it->second;
    if (sc.cheats.stray_mark_rate > 0 && stray.unit() < sc.cheats.stray_mark_rate)
      pb.interpretation = detail::stray_mark(pb.interpretation, params.style(pb.interpretation.style_id));
    (set_aside.count(pb.serial) ? res.set_aside : res.papers).push_back(std::move(pb));
  }

  res.bus = site.bus_stats();
  res.log_findings = check_event_log(judge.log());
  res.chain_findings = replay_chain(judge.log(), params);
  if (!res.log_findings.empty() || !res.chain_findings.empty() || !site.conserved())
    throw InvariantViolation("polling-place invariant breached");
  return res;
}

inline nlohmann::json openings_to_json(const std::vector<BallotOpening>& os) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& o : os) arr.push_back(to_json(o));
  return arr;
}

inline std::vector<BallotOpening> openings_from_json(const nlohmann::json& j) {
  std::vector<BallotOpening> out;
  for (const auto& o : j) out.push_back(ballot_opening_from_json(o));
  return out;
}

inline nlohmann::json papers_to_json(const std::vector<PaperBallot>& ps) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& p : ps) arr.push_back(to_json(p));
  return arr;
}

inline std::vector<PaperBallot> papers_from_json(const nlohmann::json& j) {
  std::vector<PaperBallot> out;
  for (const auto& p : j) out.push_back(paper_from_json(p));
  return out;
}

}  // namespace starlock
