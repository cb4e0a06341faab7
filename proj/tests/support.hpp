#pragma once

// Scenario builders and board-rewriting helpers shared by the test suites.

#include <functional>
#include <string>
#include <vector>

#include "starlock/simulation.hpp"

namespace starlock::testing {

inline BallotStyle two_contest_style(const std::string& id = "S1") {
  BallotStyle s;
  s.style_id = id;
  s.contests.push_back({"governor", {"A", "B", "C"}, 1, false, {}});
  s.contests.push_back({"council", {"P", "Q", "R", "T"}, 2, false, {}});
  return s;
}

inline BallotStyle one_contest_style(const std::string& id = "S1") {
  BallotStyle s;
  s.style_id = id;
  s.contests.push_back({"measure", {"YES", "NO"}, 1, false, {}});
  return s;
}

inline PlaintextBallot pick(const std::string& style, std::map<std::string, std::set<std::string>> sel) {
  return {style, std::move(sel)};
}

// Honest single-contest election with the given YES/NO split, all cast.
inline Scenario referendum(std::uint64_t yes, std::uint64_t no, const std::string& seed,
                           std::vector<std::string> terminals = {"T1", "T2"}) {
  Scenario s;
  s.election_id = "referendum";
  s.seed = seed;
  s.n = 3;
  s.k = 2;
  s.styles = {one_contest_style()};
  s.terminals = terminals;
  for (std::uint64_t i = 0; i < yes + no; ++i)
    s.voters.push_back({terminals[i % terminals.size()], pick("S1", {{"measure", {i < yes ? "YES" : "NO"}}}),
                        VoterAction::Cast, Adjudication::Accept, std::nullopt});
  return s;
}

struct RandomScenarioOptions {
  std::size_t min_voters = 1;
  std::size_t max_voters = 200;
  std::size_t max_contests = 4;
  bool honest_only = false;     // only cast/spoil+revote, no abandon/provisional
  bool clear_margins = false;   // skew preferences so every contest has a leader
};

// Random multi-style election. Preferences are biased toward the first
// options when clear margins are requested.
inline Scenario random_scenario(Rng& rng, const RandomScenarioOptions& opt, const std::string& seed) {
  Scenario s;
  s.election_id = "random-" + seed;
  s.seed = seed;
  s.n = 1 + static_cast<std::uint32_t>(rng.below(std::uint64_t{4}));
  s.k = 1 + static_cast<std::uint32_t>(rng.below(std::uint64_t{s.n}));
  const std::size_t contests = 1 + rng.below(std::uint64_t{opt.max_contests});
  std::vector<Contest> catalog;
  for (std::size_t c = 0; c < contests; ++c) {
    Contest ct;
    ct.contest_id = "contest" + std::to_string(c);
    const std::size_t nopt = 2 + rng.below(std::uint64_t{3});
    for (std::size_t o = 0; o < nopt; ++o) ct.options.push_back("opt" + std::to_string(o));
    ct.selection_limit = 1 + static_cast<std::uint32_t>(rng.below(std::uint64_t{nopt - 1}));
    if (!opt.clear_margins && rng.below(std::uint64_t{4}) == 0) {
      ct.writein_slot = true;
      ct.writeins = {ct.options.back()};
    }
    catalog.push_back(ct);
  }
  // Style "full" has every contest; "short" drops the last one when there are several.
  BallotStyle full{"full", catalog};
  s.styles.push_back(full);
  if (contests > 1 && !opt.clear_margins) s.styles.push_back({"short", {catalog.begin(), catalog.end() - 1}});
  s.terminals = {"T1", "T2", "T3"};
  s.ttl = 30;

  const std::size_t voters = opt.min_voters + rng.below(std::uint64_t{opt.max_voters - opt.min_voters + 1});
  auto random_ballot = [&](const BallotStyle& st) {
    PlaintextBallot pb{st.style_id, {}};
    for (const auto& c : st.contests) {
      std::size_t want = opt.clear_margins ? c.selection_limit : rng.below(std::uint64_t{c.selection_limit + 1});
      std::vector<std::string> pool = c.options;
      while (want-- > 0 && !pool.empty()) {
        std::size_t pickidx = rng.below(std::uint64_t{pool.size()});
        // Clear margins: strongly prefer lower-numbered options.
        if (opt.clear_margins && rng.below(std::uint64_t{10}) < 8) pickidx = 0;
        pb.selections[c.contest_id].insert(pool[pickidx]);
        pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(pickidx));
      }
    }
    return pb;
  };
  for (std::size_t i = 0; i < voters; ++i) {
    const BallotStyle& st = s.styles[rng.below(std::uint64_t{s.styles.size()})];
    VoterScript v{s.terminals[rng.below(std::uint64_t{s.terminals.size()})], random_ballot(st), VoterAction::Cast,
                  Adjudication::Accept, std::nullopt};
    const std::uint64_t r = rng.below(std::uint64_t{20});
    if (r == 0) {
      v.action = VoterAction::Spoil;
      v.revote = random_ballot(st);
    } else if (r == 1) {
      v.action = VoterAction::Challenge;
      v.revote = random_ballot(st);
    } else if (!opt.honest_only && r == 2) {
      v.action = VoterAction::Abandon;
    } else if (!opt.honest_only && r == 3) {
      v.action = VoterAction::Provisional;
      v.adjudication = rng.below(std::uint64_t{2}) ? Adjudication::Accept : Adjudication::Reject;
    }
    s.voters.push_back(std::move(v));
  }
  return s;
}

// Re-renders a board after its lines were edited, restoring seq numbers and
// the line chain. The old signature line is kept verbatim unless a key is
// supplied, in which case the board is re-signed.
inline std::string rechain(std::vector<BoardLine> lines, const Keypair* office = nullptr, const GroupParams* gp = nullptr) {
  if (office && !lines.empty() && lines.back().kind == board_kind::kSignature) lines.pop_back();
  std::string text;
  std::string prev = kBoardGenesis;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const std::string t = render_line(lines[i].kind, i, prev, lines[i].body);
    text += t + "\n";
    prev = line_digest(t);
  }
  if (office) {
    SchnorrSignature sig = sign(std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()), *office, *gp);
    text += render_line(board_kind::kSignature, lines.size(), prev, {{"public_key", to_hex(office->pk)}, {"signature", to_json(sig)}}) + "\n";
  }
  return text;
}

inline std::vector<std::size_t> ballot_line_positions(const std::vector<BoardLine>& lines) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < lines.size(); ++i)
    if (lines[i].kind == board_kind::kBallot) out.push_back(i);
  return out;
}

// Removes one ballot line and renumbers every later index reference.
inline std::vector<BoardLine> delete_entry(std::vector<BoardLine> lines, std::uint64_t index) {
  std::vector<BoardLine> out;
  for (auto& l : lines) {
    if (l.body.is_object() && l.body.contains("index") && l.body["index"].is_string()) {
      const std::uint64_t i = parse_u64(l.body["index"]);
      if (i == index && (l.kind == board_kind::kBallot || l.kind == board_kind::kDecryption || l.kind == board_kind::kStatus)) continue;
      if (i > index) l.body["index"] = std::to_string(i - 1);
    }
    out.push_back(std::move(l));
  }
  return out;
}

}  // namespace starlock::testing
