#include <gtest/gtest.h>

#include <algorithm>
#include <vector>

#include "starlock/trustees.hpp"

using namespace starlock;

namespace {

std::vector<std::vector<std::uint32_t>> subsets_of_size(std::uint32_t n, std::uint32_t k) {
  std::vector<std::vector<std::uint32_t>> out;
  for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
    if (static_cast<std::uint32_t>(__builtin_popcount(mask)) != k) continue;
    std::vector<std::uint32_t> ids;
    for (std::uint32_t i = 0; i < n; ++i)
      if (mask & (1u << i)) ids.push_back(i + 1);
    out.push_back(ids);
  }
  return out;
}

std::vector<DecryptionShare> decrypt_with(const Ciphertext& c, const std::vector<TrusteeShare>& shares,
                                          const std::vector<std::uint32_t>& ids, const GroupParams& gp) {
  std::vector<DecryptionShare> out;
  for (auto id : ids) out.push_back(partial_decrypt(c, shares.at(id - 1), gp));
  return out;
}

}  // namespace

TEST(Dkg, SingleTrusteeDegeneratesToKeypair) {
  const auto& gp = GroupParams::test();
  Rng rng(1);
  auto [jpk, shares] = dkg(1, 1, gp, rng);
  ASSERT_EQ(shares.size(), 1u);
  EXPECT_EQ(jpk.scheme, KeyScheme::Additive);
  EXPECT_EQ(jpk.K, gp.gexp(shares[0].secret_share));
  EXPECT_NO_THROW(jpk.validate(gp));
}

TEST(Dkg, InvalidThresholds) {
  const auto& gp = GroupParams::sim();
  Rng rng(2);
  EXPECT_THROW(dkg(3, 4, gp, rng), InvalidThreshold);
  EXPECT_THROW(dkg(3, 0, gp, rng), InvalidThreshold);
  EXPECT_THROW(dkg(17, 2, gp, rng), InvalidThreshold);
  EXPECT_THROW(dkg(12, 2, GroupParams::test(), rng), InvalidThreshold);  // n >= q
}

TEST(Dkg, SharesConsistentWithCommitments) {
  const auto& gp = GroupParams::sim();
  Rng rng(3);
  for (std::uint32_t n = 1; n <= 5; ++n)
    for (std::uint32_t k = 1; k <= n; ++k) {
      auto [jpk, shares] = dkg(n, k, gp, rng);
      EXPECT_NO_THROW(jpk.validate(gp));
      for (const auto& s : shares) EXPECT_TRUE(share_is_consistent(s, jpk, gp)) << n << "/" << k;
    }
}

TEST(Dkg, TwoOfThreeAllSubsetsAgreeInTestGroup) {
  const auto& gp = GroupParams::test();
  Rng rng(4);
  auto [jpk, shares] = dkg(3, 2, gp, rng);
  const Ciphertext c = encrypt_exp(1, 5, jpk.K, gp);
  for (const auto& ids : subsets_of_size(3, 2)) {
    auto ds = decrypt_with(c, shares, ids, gp);
    EXPECT_EQ(combine_shares(c, ds, jpk, 10, gp), 1u);
  }
}

TEST(Dkg, AllKSubsetsMatchReconstructedSecret) {
  const auto& gp = GroupParams::sim();
  Rng rng(5);
  for (std::uint32_t n = 1; n <= 5; ++n)
    for (std::uint32_t k = 1; k <= n; ++k) {
      auto [jpk, shares] = dkg(n, k, gp, rng);
      const std::uint64_t m = rng.below(std::uint64_t{8});
      const Ciphertext c = encrypt_exp(m, rng.between(1, gp.q - 1), jpk.K, gp);
      const auto reference_ids = jpk.scheme == KeyScheme::Additive ? subsets_of_size(n, n)[0] : subsets_of_size(n, k)[0];
      std::vector<TrusteeShare> subset;
      for (auto id : reference_ids) subset.push_back(shares[id - 1]);
      const BigInt secret = reconstruct_secret(subset, jpk.scheme, gp);
      ASSERT_EQ(gp.gexp(secret), jpk.K);
      const std::uint64_t reference = decrypt_dlog(c, secret, 10, gp);
      EXPECT_EQ(reference, m);
      const std::uint32_t quorum = jpk.scheme == KeyScheme::Additive ? n : k;
      for (const auto& ids : subsets_of_size(n, quorum))
        EXPECT_EQ(combine_shares(c, decrypt_with(c, shares, ids, gp), jpk, 10, gp), reference);
    }
}

TEST(Dkg, FewerThanKSharesDoNotReconstruct) {
  const auto& gp = GroupParams::sim();
  Rng rng(6);
  auto [jpk, shares] = dkg(5, 3, gp, rng);
  for (const auto& ids : subsets_of_size(5, 2)) {
    std::vector<TrusteeShare> subset;
    for (auto id : ids) subset.push_back(shares[id - 1]);
    EXPECT_NE(gp.gexp(reconstruct_secret(subset, KeyScheme::Threshold, gp)), jpk.K);
  }
}

TEST(PartialDecrypt, MatchesOracleInTestGroup) {
  const auto& gp = GroupParams::test();
  TrusteeShare share{1, 3, {gp.gexp(3)}};
  const Ciphertext c{16, 8};
  auto ds = partial_decrypt(c, share, gp);
  EXPECT_EQ(ds.share_value, 2);  // 16^3 mod 23
  EXPECT_TRUE(verify_decryption_share(c, ds, gp.gexp(3), gp));
}

TEST(PartialDecrypt, TamperedShareValueFails) {
  const auto& gp = GroupParams::test();
  TrusteeShare share{1, 3, {gp.gexp(3)}};
  const Ciphertext c{16, 8};
  auto ds = partial_decrypt(c, share, gp);
  ds.share_value = gp.mul(ds.share_value, gp.g);
  EXPECT_FALSE(verify_decryption_share(c, ds, gp.gexp(3), gp));
}

TEST(PartialDecrypt, SameShareTwoCiphertexts) {
  const auto& gp = GroupParams::sim();
  Rng rng(7);
  auto [jpk, shares] = dkg(3, 2, gp, rng);
  for (int i = 0; i < 10; ++i) {
    Ciphertext c1 = encrypt_exp(0, rng.between(1, gp.q - 1), jpk.K, gp);
    Ciphertext c2 = encrypt_exp(1, rng.between(1, gp.q - 1), jpk.K, gp);
    auto d1 = partial_decrypt(c1, shares[0], gp);
    auto d2 = partial_decrypt(c2, shares[0], gp);
    const BigInt vk = jpk.verification_key(1, gp);
    EXPECT_TRUE(verify_decryption_share(c1, d1, vk, gp));
    EXPECT_TRUE(verify_decryption_share(c2, d2, vk, gp));
    EXPECT_FALSE(verify_decryption_share(c2, d1, vk, gp));
  }
}

TEST(ChaumPedersen, CompletenessAndResponsePerturbation) {
  const auto& gp = GroupParams::sim();
  Rng rng(8);
  auto [jpk, shares] = dkg(3, 2, gp, rng);
  for (int i = 0; i < 100; ++i) {
    Ciphertext c = encrypt_exp(rng.below(std::uint64_t{2}), rng.between(1, gp.q - 1), jpk.K, gp);
    const auto& share = shares[rng.below(std::uint64_t{3})];
    auto ds = partial_decrypt(c, share, gp);
    const BigInt vk = jpk.verification_key(share.trustee_id, gp);
    ASSERT_TRUE(verify_decryption_share(c, ds, vk, gp));
    ds.proof.response = gp.reduce(ds.proof.response + 1);
    EXPECT_FALSE(verify_decryption_share(c, ds, vk, gp));
  }
}

TEST(CombineShares, SubsetsDecryptOne) {
  const auto& gp = GroupParams::sim();
  Rng rng(9);
  auto [jpk, shares] = dkg(3, 2, gp, rng);
  Ciphertext c = encrypt_exp(1, rng.between(1, gp.q - 1), jpk.K, gp);
  EXPECT_EQ(combine_shares(c, decrypt_with(c, shares, {1, 2}, gp), jpk, 5, gp), 1u);
  EXPECT_EQ(combine_shares(c, decrypt_with(c, shares, {2, 3}, gp), jpk, 5, gp), 1u);
}

TEST(CombineShares, InsufficientShares) {
  const auto& gp = GroupParams::sim();
  Rng rng(10);
  auto [jpk, shares] = dkg(3, 2, gp, rng);
  Ciphertext c = encrypt_exp(1, rng.between(1, gp.q - 1), jpk.K, gp);
  auto one = decrypt_with(c, shares, {2}, gp);
  EXPECT_THROW(combine_shares(c, one, jpk, 5, gp), InsufficientShares);
  // Duplicates of the same trustee do not count twice.
  one.push_back(one.front());
  EXPECT_THROW(combine_shares(c, one, jpk, 5, gp), InsufficientShares);
}

TEST(CombineShares, BadProofNamesTrustee) {
  const auto& gp = GroupParams::sim();
  Rng rng(11);
  auto [jpk, shares] = dkg(3, 2, gp, rng);
  Ciphertext c = encrypt_exp(1, rng.between(1, gp.q - 1), jpk.K, gp);
  auto ds = decrypt_with(c, shares, {1, 3}, gp);
  ds[1].proof.challenge = gp.reduce(ds[1].proof.challenge + 1);
  try {
    combine_shares(c, ds, jpk, 5, gp);
    FAIL() << "expected BadShareProof";
  } catch (const BadShareProof& e) {
    EXPECT_EQ(e.trustee_id(), 3u);
  }
}

TEST(TrusteeFiles, JsonRoundTrip) {
  const auto& gp = GroupParams::sim();
  Rng rng(12);
  auto [jpk, shares] = dkg(3, 2, gp, rng);
  auto jj = to_json(jpk, gp);
  EXPECT_EQ(joint_key_from_json(jj), jpk);
  EXPECT_EQ(group_from_json(jj.at("group")), gp);
  auto s = trustee_share_from_json(to_json(shares[1]));
  EXPECT_EQ(s.trustee_id, 2u);
  EXPECT_EQ(s.secret_share, shares[1].secret_share);
  EXPECT_EQ(s.verification_commitments, shares[1].verification_commitments);
}
