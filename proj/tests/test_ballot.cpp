#include <gtest/gtest.h>

#include <map>

#include "starlock/ballot.hpp"
#include "starlock/trustees.hpp"

using namespace starlock;

namespace {

const GroupParams& G = GroupParams::sim();
const std::string kElection = "travis-2026-11";

BallotStyle sample_style() {
  BallotStyle s;
  s.style_id = "S1";
  s.contests.push_back({"governor", {"A", "B", "C"}, 1, false, {}});
  s.contests.push_back({"council", {"A", "B", "C", "D"}, 2, false, {}});
  s.contests.push_back({"clerk", {"X", "Y", "W1"}, 1, true, {"W1"}});
  s.validate();
  return s;
}

PlaintextBallot ballot(std::map<std::string, std::set<std::string>> sel) { return {"S1", std::move(sel)}; }

struct Keys {
  Keys() : rng(99) { kp = Keypair::generate(G, rng); }
  Rng rng;
  Keypair kp;
};

}  // namespace

TEST(Style, Validation) {
  BallotStyle s = sample_style();
  s.contests.push_back(s.contests[0]);
  EXPECT_THROW(s.validate(), InvalidArgument);
  BallotStyle empty{"S", {{"c", {}, 1, false, {}}}};
  EXPECT_THROW(empty.validate(), InvalidArgument);
  BallotStyle over{"S", {{"c", {"A"}, 2, false, {}}}};
  EXPECT_THROW(over.validate(), InvalidArgument);
  BallotStyle reserved{"S", {{"c", {"(abstain)#1"}, 1, false, {}}}};
  EXPECT_THROW(reserved.validate(), InvalidArgument);
}

TEST(Encode, SingleChoice) {
  auto rows = encode(ballot({{"governor", {"B"}}}), sample_style());
  EXPECT_EQ(rows[0].options, (std::vector<int>{0, 1, 0}));
  EXPECT_EQ(rows[0].padding, (std::vector<int>{0}));
}

TEST(Encode, AbstainAbsorbedByPadding) {
  auto rows = encode(ballot({}), sample_style());
  EXPECT_EQ(rows[0].options, (std::vector<int>{0, 0, 0}));
  EXPECT_EQ(rows[0].padding, (std::vector<int>{1}));
  EXPECT_EQ(rows[1].padding, (std::vector<int>{1, 1}));
}

TEST(Encode, TwoOfFourAllSubsetsSumToLimit) {
  const std::vector<std::string> opts{"A", "B", "C", "D"};
  for (std::size_t i = 0; i < opts.size(); ++i)
    for (std::size_t j = i + 1; j < opts.size(); ++j) {
      auto rows = encode(ballot({{"council", {opts[i], opts[j]}}}), sample_style());
      int sum = 0;
      for (int b : rows[1].columns()) sum += b;
      EXPECT_EQ(sum, 2);
      EXPECT_EQ(rows[1].padding, (std::vector<int>{0, 0}));
    }
  auto ad = encode(ballot({{"council", {"A", "D"}}}), sample_style());
  EXPECT_EQ(ad[1].options, (std::vector<int>{1, 0, 0, 1}));
}

TEST(Encode, Errors) {
  EXPECT_THROW(encode(ballot({{"governor", {"A", "B"}}}), sample_style()), OvervoteRejected);
  EXPECT_THROW(encode(ballot({{"governor", {"Z"}}}), sample_style()), UnknownOption);
  EXPECT_THROW(encode(ballot({{"mayor", {"A"}}}), sample_style()), UnknownOption);
}

TEST(Encode, WriteinCounter) {
  auto rows = encode(ballot({{"clerk", {"W1"}}}), sample_style());
  EXPECT_EQ(rows[2].writein, 1);
  EXPECT_EQ(encode(ballot({{"clerk", {"X"}}}), sample_style())[2].writein, 0);
}

TEST(EncryptBallot, HonestBallotVerifies) {
  Keys k;
  auto style = sample_style();
  auto [eb, pf] = encrypt_ballot(ballot({{"governor", {"A"}}, {"council", {"B"}}}), style, k.kp.pk, G, k.rng, kElection);
  EXPECT_TRUE(verify_ballot(eb, pf, style, k.kp.pk, G, kElection));
}

TEST(EncryptBallot, WrongElectionIdFails) {
  Keys k;
  auto style = sample_style();
  auto [eb, pf] = encrypt_ballot(ballot({}), style, k.kp.pk, G, k.rng, kElection);
  EXPECT_FALSE(verify_ballot(eb, pf, style, k.kp.pk, G, "other-election"));
}

TEST(EncryptBallot, SwappedOptionProofsFail) {
  Keys k;
  auto style = sample_style();
  auto [eb, pf] = encrypt_ballot(ballot({{"governor", {"A"}}}), style, k.kp.pk, G, k.rng, kElection);
  auto swapped = pf;
  std::swap(swapped.contests[0].options[0], swapped.contests[0].options[1]);
  EXPECT_FALSE(verify_ballot(eb, swapped, style, k.kp.pk, G, kElection));
  // Swapping ciphertexts together with their proofs breaks the option binding too.
  auto eb2 = eb;
  std::swap(eb2.contests[0].options[0], eb2.contests[0].options[1]);
  auto pf2 = pf;
  std::swap(pf2.contests[0].options[0], pf2.contests[0].options[1]);
  EXPECT_FALSE(verify_ballot(eb2, pf2, style, k.kp.pk, G, kElection));
}

TEST(EncryptBallot, ValueTwoSubstitutionFails) {
  Keys k;
  auto style = sample_style();
  EncodedBallot rows = encode(ballot({{"governor", {"A"}}}), style);
  auto [eb, pf] = encrypt_encoded(rows, style, BallotContext{G, k.kp.pk, kElection}, k.rng);
  // Replace option B with an encryption of 2 and a proof forged for value 1.
  BigInt r = k.rng.between(1, G.q - 1);
  eb.contests[0].options[1] = encrypt_exp(2, r, k.kp.pk, G);
  EXPECT_FALSE(verify_ballot(eb, pf, style, k.kp.pk, G, kElection));
  auto forged = pf;
  forged.contests[0].options[1].one.response = G.reduce(forged.contests[0].options[1].one.response + 1);
  EXPECT_FALSE(verify_ballot(eb, forged, style, k.kp.pk, G, kElection));
}

TEST(EncryptBallot, OvervoteRowFailsSumProof) {
  Keys k;
  auto style = sample_style();
  EncodedBallot rows = encode(ballot({{"governor", {"A"}}}), style);
  rows[0].options = {1, 1, 0};  // two ones plus padding 0: sum = 2 != L
  auto [eb, pf] = encrypt_encoded(rows, style, BallotContext{G, k.kp.pk, kElection}, k.rng);
  EXPECT_FALSE(verify_ballot(eb, pf, style, k.kp.pk, G, kElection));
}

TEST(EncryptBallot, RandomizedEncryptionsDiffer) {
  Keys k;
  auto style = sample_style();
  auto pb = ballot({{"governor", {"C"}}});
  auto [e1, p1] = encrypt_ballot(pb, style, k.kp.pk, G, k.rng, kElection);
  auto [e2, p2] = encrypt_ballot(pb, style, k.kp.pk, G, k.rng, kElection);
  EXPECT_NE(e1, e2);
  EXPECT_TRUE(verify_ballot(e1, p1, style, k.kp.pk, G, kElection));
  EXPECT_TRUE(verify_ballot(e2, p2, style, k.kp.pk, G, kElection));
}

TEST(EncryptBallot, PublishedShapeIndependentOfPlaintext) {
  Keys k;
  auto style = sample_style();
  auto [e1, p1] = encrypt_ballot(ballot({{"governor", {"A"}}, {"council", {"A", "B"}}}), style, k.kp.pk, G, k.rng, kElection);
  auto [e2, p2] = encrypt_ballot(ballot({{"clerk", {"W1"}}}), style, k.kp.pk, G, k.rng, kElection);
  auto shape = [](nlohmann::json j) {
    // Replace every leaf with its kind so only structure remains.
    std::function<void(nlohmann::json&)> strip = [&](nlohmann::json& v) {
      if (v.is_object() || v.is_array()) {
        for (auto& x : v) strip(x);
      } else if (v.is_string() && v.get<std::string>().size() > 12) {
        v = "elem";
      }
    };
    strip(j);
    return j.dump();
  };
  EXPECT_EQ(shape(to_json(e1)), shape(to_json(e2)));
  EXPECT_EQ(shape(to_json(p1)), shape(to_json(p2)));
  for (const auto& c : e1.contests)
    for (const auto& ct : c.columns()) EXPECT_TRUE(G.is_element(ct.a) && G.is_element(ct.b));
}

TEST(EncryptBallot, JsonRoundTripKeepsValidity) {
  Keys k;
  auto style = sample_style();
  auto [eb, pf] = encrypt_ballot(ballot({{"council", {"D"}}, {"clerk", {"W1"}}}), style, k.kp.pk, G, k.rng, kElection);
  auto eb2 = encrypted_ballot_from_json(nlohmann::json::parse(to_json(eb).dump()));
  auto pf2 = proof_from_json(nlohmann::json::parse(to_json(pf).dump()));
  EXPECT_EQ(eb2, eb);
  EXPECT_EQ(pf2, pf);
  EXPECT_EQ(canonical(eb2).bytes(), canonical(eb).bytes());
  EXPECT_EQ(ballot_style_from_json(to_json(style)), style);
}

TEST(Homomorphic, ContestSumsMatchPlaintextCounts) {
  Rng rng(5);
  const auto& gp = G;
  auto [jpk, shares] = dkg(3, 2, gp, rng);
  auto style = sample_style();
  const std::size_t voters = 20;
  std::map<std::string, std::vector<std::uint64_t>> expected;  // contest -> column counts
  std::map<std::string, std::vector<Ciphertext>> agg;
  std::uint64_t writeins = 0;
  for (std::size_t v = 0; v < voters; ++v) {
    PlaintextBallot pb{"S1", {}};
    for (const auto& c : style.contests) {
      std::set<std::string> chosen;
      for (const auto& o : c.options)
        if (chosen.size() < c.selection_limit && rng.below(std::uint64_t{3}) == 0) chosen.insert(o);
      if (!chosen.empty()) pb.selections[c.contest_id] = chosen;
    }
    auto rows = encode(pb, style);
    auto [eb, pf] = encrypt_encoded(rows, style, BallotContext{gp, jpk.K, kElection}, rng);
    ASSERT_TRUE(verify_ballot(eb, pf, style, jpk.K, gp, kElection));
    for (std::size_t ci = 0; ci < style.contests.size(); ++ci) {
      const auto& cid = style.contests[ci].contest_id;
      auto cols = rows[ci].columns();
      auto cts = eb.contests[ci].columns();
      auto& e = expected[cid];
      auto& a = agg[cid];
      if (e.empty()) {
        e.assign(cols.size(), 0);
        a.assign(cts.size(), Ciphertext::identity());
      }
      for (std::size_t k = 0; k < cols.size(); ++k) {
        e[k] += static_cast<std::uint64_t>(cols[k]);
        a[k] = homomorphic_add(a[k], cts[k], gp);
      }
    }
    if (pb.selections.count("clerk") && pb.selections.at("clerk").count("W1")) ++writeins;
  }
  for (const auto& [cid, cts] : agg) {
    for (std::size_t k = 0; k < cts.size(); ++k) {
      std::vector<DecryptionShare> ds{partial_decrypt(cts[k], shares[0], gp), partial_decrypt(cts[k], shares[2], gp)};
      EXPECT_EQ(combine_shares(cts[k], ds, jpk, voters, gp), expected[cid][k]) << cid << " column " << k;
    }
  }
  EXPECT_EQ(expected["clerk"].back(), writeins);
}
