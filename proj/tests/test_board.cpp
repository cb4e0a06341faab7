#include <gtest/gtest.h>

#include "starlock/board.hpp"
#include "starlock/pollsite/site.hpp"

using namespace starlock;

namespace {

BallotStyle style() {
  BallotStyle s;
  s.style_id = "S1";
  s.contests.push_back({"governor", {"A", "B", "C"}, 1, false, {}});
  s.contests.push_back({"council", {"P", "Q", "R", "T"}, 2, false, {}});
  return s;
}

PlaintextBallot vote(const std::string& gov, std::set<std::string> council = {"P"}) {
  return {"S1", {{"governor", {gov}}, {"council", std::move(council)}}};
}

struct Fixture {
  explicit Fixture(const GroupParams& gp, std::uint64_t seed = 7) : rng(seed) {
    es = make_election("board-test", {style()}, {"T1", "T2"}, 3, 2, gp, rng);
    site = std::make_unique<PollSite>(es.params, rng.fork("site"));
  }
  SessionOutcome session(const PlaintextBallot& pb, const std::string& m = "T1") {
    return site->vote_session(m, site->issue_token("S1").code, pb);
  }
  Rng rng;
  ElectionSetup es;
  std::unique_ptr<PollSite> site;
};

bool signature_ok(const std::string& text, const GroupParams& gp) {
  auto lines = parse_board_lines(text);
  if (lines.empty() || lines.back().kind != board_kind::kSignature) return false;
  const std::string msg = signed_prefix(lines, lines.size() - 1);
  auto sig = signature_from_json(lines.back().body.at("signature"));
  auto pk = from_hex(lines.back().body.at("public_key").get<std::string>());
  return verify_sig(std::span(reinterpret_cast<const std::uint8_t*>(msg.data()), msg.size()), sig, pk, gp);
}

}  // namespace

TEST(Board, PublishStripsSerial) {
  Fixture f(GroupParams::sim());
  auto s = f.session(vote("A"));
  BulletinBoard board(f.es.params);
  EXPECT_EQ(board.publish_entry(s.record.record, BallotStatus::Cast), 0u);
  EXPECT_EQ(board.text().find(s.summary.serial.text), std::string::npos);
  EXPECT_NE(board.text().find(hex(s.record.record.z)), std::string::npos);
  EXPECT_THROW(board.publish_entry(s.record.record, BallotStatus::Pending), InvalidArgument);
}

TEST(Board, BrokenProofRejected) {
  Fixture f(GroupParams::sim());
  auto s = f.session(vote("A"));
  BulletinBoard board(f.es.params);
  auto rec = s.record.record;
  rec.p_v.contests[0].sum.response += 1;
  EXPECT_THROW(board.publish_entry(rec, BallotStatus::Cast), RejectInvalidProof);
  rec = s.record.record;
  rec.terminal_id = "T9";
  EXPECT_THROW(board.publish_entry(rec, BallotStatus::Cast), RejectInvalidProof);
  EXPECT_TRUE(board.entries().empty());
}

TEST(Board, SupersessionIsAppendOnly) {
  Fixture f(GroupParams::sim());
  BulletinBoard board(f.es.params);
  for (int i = 0; i < 3; ++i) board.publish_entry(f.session(vote("A")).record.record, BallotStatus::Cast);
  const auto before = board.lines();
  board.supersede(1, BallotStatus::Untallied, "no_paper");
  ASSERT_EQ(board.lines().size(), before.size() + 1);
  EXPECT_TRUE(std::equal(before.begin(), before.end(), board.lines().begin()));
  EXPECT_EQ(board.entries()[1].status, BallotStatus::Untallied);
  EXPECT_THROW(board.supersede(3, BallotStatus::Cast, ""), InvalidArgument);
}

TEST(Board, LinesChainAndAreCanonical) {
  Fixture f(GroupParams::sim());
  BulletinBoard board(f.es.params);
  board.publish_entry(f.session(vote("B")).record.record, BallotStatus::Cast);
  board.sign(f.es.office);
  auto lines = parse_board_lines(board.text());
  ASSERT_EQ(lines.size(), 3u);
  EXPECT_EQ(lines[0].prev, kBoardGenesis);
  for (std::size_t i = 1; i < lines.size(); ++i) EXPECT_EQ(lines[i].prev, line_digest(lines[i - 1].text));
  for (const auto& l : lines) {
    EXPECT_EQ(nlohmann::json::parse(l.text).dump(), l.text);
    EXPECT_EQ(l.text.find(' '), std::string::npos);
  }
}

TEST(Aggregate, EmptyIsIdentityAndDecryptsToZero) {
  Fixture f(GroupParams::sim());
  BulletinBoard board(f.es.params);
  for (const auto& a : board.aggregate())
    for (const auto& c : a.columns) EXPECT_EQ(c, Ciphertext::identity());
  const auto& t = board.publish_tally(f.es.shares);
  for (const auto& ct : t.contests)
    for (const auto& col : ct.columns) EXPECT_EQ(col.count, 0u);
}

TEST(Aggregate, ThreeOfFiveInTestGroup) {
  Fixture f(GroupParams::test(), 8);
  BulletinBoard board(f.es.params);
  for (const char* g : {"A", "B", "A", "C", "A"}) board.publish_entry(f.session(vote(g)).record.record, BallotStatus::Cast);
  const auto& t = board.publish_tally(std::span(f.es.shares).first(2));
  EXPECT_EQ(t.contests[0].columns[0].count, 3u);
  EXPECT_EQ(t.contests[0].columns[1].count, 1u);
  EXPECT_EQ(t.contests[0].columns[2].count, 1u);
}

TEST(Aggregate, SpoiledExcluded) {
  Fixture f(GroupParams::sim());
  BulletinBoard board(f.es.params);
  board.publish_entry(f.session(vote("A")).record.record, BallotStatus::Cast);
  const auto before = board.aggregate();
  board.publish_entry(f.session(vote("B")).record.record, BallotStatus::Spoiled, SpoilReason::Challenge);
  board.publish_entry(f.session(vote("C")).record.record, BallotStatus::Untallied);
  const auto after = board.aggregate();
  for (std::size_t i = 0; i < before.size(); ++i) EXPECT_EQ(before[i].columns, after[i].columns);
}

TEST(Tally, PaddingAccounting) {
  Fixture f(GroupParams::sim(), 9);
  BulletinBoard board(f.es.params);
  const std::vector<PlaintextBallot> votes{vote("A", {"P", "Q"}), vote("B", {}), vote("A", {"R"}), {"S1", {}},
                                           vote("C", {"T", "P"})};
  for (const auto& v : votes) board.publish_entry(f.session(v).record.record, BallotStatus::Cast);
  const auto& t = board.publish_tally(f.es.shares);
  ASSERT_EQ(t.cast_count, 5u);
  const std::vector<std::uint32_t> limits{1, 2};
  for (std::size_t c = 0; c < t.contests.size(); ++c) {
    std::uint64_t sum = 0;
    for (const auto& col : t.contests[c].columns) sum += col.count;
    EXPECT_EQ(sum, 5u * limits[c]);
  }
  EXPECT_EQ(t.contests[1].columns[0].count, 2u);  // P
  EXPECT_EQ(t.contests[1].columns[4].count, 3u);  // (abstain)#1
  EXPECT_EQ(t.contests[1].columns[5].count, 2u);  // (abstain)#2
}

TEST(Tally, QuorumRequired) {
  Fixture f(GroupParams::sim());
  BulletinBoard board(f.es.params);
  board.publish_entry(f.session(vote("A")).record.record, BallotStatus::Cast);
  EXPECT_THROW(board.publish_tally(std::span(f.es.shares).first(1)), InsufficientShares);
}

TEST(Tally, TamperedAggregateDecryptsButDiffers) {
  Fixture f(GroupParams::sim());
  BulletinBoard board(f.es.params);
  board.publish_entry(f.session(vote("A")).record.record, BallotStatus::Cast);
  auto agg = board.aggregate();
  Rng r(1);
  agg[0].columns[1] = homomorphic_add(agg[0].columns[1], encrypt_exp(1, r.between(1, f.es.params.group.q - 1),
                                                                     f.es.params.joint_key.K, f.es.params.group),
                                      f.es.params.group);
  auto t = decrypt_tally(agg, f.es.shares, f.es.params, 2);
  EXPECT_EQ(t.contests[0].columns[1].count, 1u);
  EXPECT_NE(board.aggregate()[0].columns[1], agg[0].columns[1]);
}

TEST(Spoiled, DecryptionMatchesHonestAndExposesRigged) {
  Fixture f(GroupParams::sim());
  BulletinBoard board(f.es.params);
  auto honest = f.session(vote("B", {"Q", "R"}), "T1");
  f.site->terminal("T2").rig(shift_first_contest);
  auto rigged = f.session(vote("B", {"Q", "R"}), "T2");
  auto cast = f.session(vote("A"), "T1");
  board.publish_entry(honest.record.record, BallotStatus::Spoiled, SpoilReason::Challenge);
  board.publish_entry(rigged.record.record, BallotStatus::Spoiled, SpoilReason::Challenge);
  board.publish_entry(cast.record.record, BallotStatus::Cast);
  auto d0 = decrypt_spoiled(board.entries()[0], 0, f.es.shares, f.es.params);
  auto d1 = decrypt_spoiled(board.entries()[1], 1, f.es.shares, f.es.params);
  EXPECT_EQ(without_abstentions(d0.plaintext), without_abstentions(honest.summary.selections));
  EXPECT_NE(without_abstentions(d1.plaintext), without_abstentions(rigged.summary.selections));
  EXPECT_THROW(decrypt_spoiled(board.entries()[2], 2, f.es.shares, f.es.params), NotSpoiled);
  auto all = board.publish_spoiled_decryptions(f.es.shares);
  EXPECT_EQ(all.size(), 2u);
  EXPECT_EQ(spoiled_decryption_from_json(to_json(all[0])).plaintext, all[0].plaintext);
}

TEST(Sign, VerifyTamperResign) {
  Fixture f(GroupParams::sim());
  BulletinBoard board(f.es.params);
  board.publish_entry(f.session(vote("A")).record.record, BallotStatus::Cast);
  board.publish_tally(f.es.shares);
  board.sign(f.es.office);
  const std::string signed1 = board.text();
  EXPECT_TRUE(signature_ok(signed1, f.es.params.group));

  // Flip one character of the first ciphertext.
  std::string bad = signed1;
  const auto pos = bad.find("\"a\":\"") + 5;
  bad[pos] = bad[pos] == '1' ? '2' : '1';
  EXPECT_FALSE(signature_ok(bad, f.es.params.group));

  board.supersede(0, BallotStatus::Untallied, "no_paper");
  board.sign(f.es.office);
  const std::string signed2 = board.text();
  EXPECT_EQ(signed2.substr(0, signed1.size()), signed1);
  EXPECT_TRUE(signature_ok(signed2, f.es.params.group));
}

TEST(Format, TallyJsonRoundTrip) {
  Fixture f(GroupParams::sim());
  BulletinBoard board(f.es.params);
  board.publish_entry(f.session(vote("C")).record.record, BallotStatus::Cast);
  const auto& t = board.publish_tally(f.es.shares);
  EXPECT_EQ(to_json(tally_from_json(to_json(t))), to_json(t));
  EXPECT_THROW(parse_u64(nlohmann::json("007")), ParseError);
  EXPECT_THROW(parse_board_lines("{}"), ParseError);
}
