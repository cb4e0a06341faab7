#include <gtest/gtest.h>

#include <set>

#include "starlock/crypto/elgamal.hpp"
#include "starlock/crypto/fiat_shamir.hpp"
#include "starlock/crypto/proofs.hpp"
#include "starlock/crypto/schnorr.hpp"

using namespace starlock;

namespace {

const GroupParams& T = GroupParams::test();
// Values below are frozen from tests/oracles/small_group_oracle.py.
const BigInt kSk = 3;
const BigInt kK = 18;

}  // namespace

TEST(Group, FixedParameterSetsAreValid) {
  for (const char* name : {"TEST", "SIM", "PROD"}) {
    const auto& gp = GroupParams::named(name);
    EXPECT_NO_THROW(gp.validate()) << name;
    EXPECT_TRUE(gp.is_element(gp.g)) << name;
  }
  EXPECT_EQ(mpz_sizeinbase(GroupParams::prod().p.get_mpz_t(), 2), 2048u);
  EXPECT_EQ(mpz_sizeinbase(GroupParams::sim().p.get_mpz_t(), 2), 256u);
  EXPECT_THROW(GroupParams::named("tiny"), InvalidArgument);
}

TEST(Group, RejectsBadParameters) {
  EXPECT_THROW((GroupParams{23, 11, 1}.validate()), InvalidArgument);
  EXPECT_THROW((GroupParams{23, 11, 5}.validate()), InvalidArgument);  // 5 has order 22
  EXPECT_THROW((GroupParams{25, 12, 4}.validate()), InvalidArgument);
}

TEST(Group, JsonRoundTripUsesDecimalStrings) {
  auto j = to_json(T);
  EXPECT_EQ(j.dump(), R"({"g":"4","p":"23","q":"11"})");
  EXPECT_EQ(group_from_json(j), T);
}

TEST(ElGamal, EncryptMatchesOracle) {
  EXPECT_EQ(T.gexp(kSk), kK);
  EXPECT_EQ(encrypt_exp(1, 2, kK, T), (Ciphertext{16, 8}));
  EXPECT_EQ(encrypt_exp(0, 1, kK, T), (Ciphertext{4, 18}));
}

TEST(ElGamal, ZeroRandomnessRejected) {
  EXPECT_THROW(encrypt_exp(1, 0, kK, T), InvalidArgument);
  EXPECT_THROW(encrypt_exp(1, 11, kK, T), InvalidArgument);
}

TEST(ElGamal, EncryptionOfZeroDecryptsToZero) {
  for (int r = 1; r < 11; ++r) EXPECT_EQ(decrypt_dlog(encrypt_exp(0, r, kK, T), kSk, 10, T), 0u);
}

TEST(ElGamal, HomomorphicAddMatchesOracle) {
  auto sum = homomorphic_add({16, 8}, {4, 18}, T);
  EXPECT_EQ(sum, (Ciphertext{18, 6}));
  EXPECT_EQ(decrypt_dlog(sum, kSk, 10, T), 1u);
}

TEST(ElGamal, AdditiveIdentity) {
  Ciphertext c{16, 8};
  EXPECT_EQ(decrypt_dlog(homomorphic_add(c, encrypt_exp(0, 7, kK, T), T), kSk, 10, T), 1u);
  EXPECT_EQ(homomorphic_add(c, Ciphertext::identity(), T), c);
}

TEST(ElGamal, FoldOfOnesDecryptsToCount) {
  Rng rng(7);
  for (std::uint64_t n = 0; n <= 10; ++n) {
    Ciphertext acc = Ciphertext::identity();
    for (std::uint64_t i = 0; i < n; ++i) acc = homomorphic_add(acc, encrypt_exp(1, rng.between(1, 10), kK, T), T);
    EXPECT_EQ(decrypt_dlog(acc, kSk, 10, T), n);
  }
}

TEST(ElGamal, DecryptMatchesOracleAndRangeExclusion) {
  EXPECT_EQ(decrypt_dlog({16, 8}, kSk, 10, T), 1u);
  EXPECT_THROW(decrypt_dlog({16, 8}, kSk, 0, T), NoDlogInRange);
}

TEST(ElGamal, SumsDecryptCorrectlyProperty) {
  const auto& gp = GroupParams::sim();
  Rng rng(11);
  Keypair kp = Keypair::generate(gp, rng);
  for (std::uint64_t m1 = 0; m1 <= 5; ++m1)
    for (std::uint64_t m2 = 0; m2 <= 5; ++m2) {
      auto c = homomorphic_add(encrypt_exp(m1, rng.between(1, gp.q - 1), kp.pk, gp),
                               encrypt_exp(m2, rng.between(1, gp.q - 1), kp.pk, gp), gp);
      EXPECT_EQ(decrypt_dlog(c, kp.sk, 10, gp), m1 + m2);
      EXPECT_EQ(powm(c.a, gp.q, gp.p), 1);
      EXPECT_EQ(powm(c.b, gp.q, gp.p), 1);
    }
}

TEST(ElGamal, ReencryptionsLookIndependent) {
  const auto& gp = GroupParams::sim();
  Rng rng(12);
  Keypair kp = Keypair::generate(gp, rng);
  std::set<std::pair<std::string, std::string>> seen;
  for (int i = 0; i < 100; ++i) {
    auto c = encrypt_exp(1, rng.between(1, gp.q - 1), kp.pk, gp);
    EXPECT_TRUE(seen.emplace(to_hex(c.a), to_hex(c.b)).second);
  }
}

TEST(Group, FixedBaseMatchesPowm) {
  Rng rng(21);
  for (const GroupParams* gp : {&GroupParams::test(), &GroupParams::sim(), &GroupParams::prod()}) {
    const BigInt base = gp->gexp(rng.between(1, gp->q - 1));
    std::vector<BigInt> exps{0, 1, 2, gp->q - 1, gp->q, gp->p * gp->p};  // the last two exceed the table
    for (int i = 0; i < 20; ++i) exps.push_back(rng.below(gp->q));
    for (const auto& e : exps) {
      EXPECT_EQ(gp->fixed_exp(base, e), powm(base, e, gp->p));
      EXPECT_EQ(gp->gexp(e), powm(gp->g, e, gp->p));
    }
    EXPECT_EQ(gp->fixed_exp(base, BigInt(-3)), powm(base, BigInt(-3), gp->p));
  }
}

TEST(ElGamal, ProductionGroupRoundTrip) {
  const auto& gp = GroupParams::prod();
  Rng rng(13);
  Keypair kp = Keypair::generate(gp, rng);
  auto c = homomorphic_add(encrypt_exp(2, rng.between(1, gp.q - 1), kp.pk, gp),
                           encrypt_exp(3, rng.between(1, gp.q - 1), kp.pk, gp), gp);
  EXPECT_EQ(decrypt_dlog(c, kp.sk, 10, gp), 5u);
}

TEST(FiatShamir, DeterministicAndReduced) {
  Bytes t{1, 2, 3};
  EXPECT_EQ(fiat_shamir_challenge("tag", t, T), fiat_shamir_challenge("tag", t, T));
  Rng rng(1);
  for (int i = 0; i < 200; ++i) {
    auto c = fiat_shamir_challenge("tag", rng.bytes(16), T);
    EXPECT_TRUE(c >= 0 && c < T.q);
  }
}

TEST(FiatShamir, OneByteDifferenceChangesChallenge) {
  const auto& gp = GroupParams::sim();
  Rng rng(2);
  for (int i = 0; i < 1000; ++i) {
    Bytes t = rng.bytes(48);
    Bytes u = t;
    u[rng.below(std::uint64_t{48})] ^= static_cast<std::uint8_t>(1 + rng.below(std::uint64_t{255}));
    EXPECT_NE(fiat_shamir_challenge("starlock/test", t, gp), fiat_shamir_challenge("starlock/test", u, gp));
  }
}

TEST(Schnorr, RoundTripEmptyMessage) {
  for (const auto* gp : {&GroupParams::test(), &GroupParams::sim()}) {
    Rng rng(3);
    Keypair kp = Keypair::generate(*gp, rng);
    Bytes empty;
    EXPECT_TRUE(verify_sig(empty, sign(empty, kp, *gp), kp.pk, *gp));
  }
}

TEST(Schnorr, WrongKeyFails) {
  const auto& gp = GroupParams::sim();
  Rng rng(4);
  Keypair a = Keypair::generate(gp, rng), b = Keypair::generate(gp, rng);
  Bytes msg{'h', 'i'};
  EXPECT_FALSE(verify_sig(msg, sign(msg, a, gp), b.pk, gp));
}

TEST(Schnorr, EveryByteFlipFails) {
  for (const auto* gp : {&GroupParams::test(), &GroupParams::sim()}) {
    Rng rng(5);
    Keypair kp = Keypair::generate(*gp, rng);
    Bytes msg = rng.bytes(64);
    auto sig = sign(msg, kp, *gp);
    ASSERT_TRUE(verify_sig(msg, sig, kp.pk, *gp));
    for (std::size_t i = 0; i < msg.size(); ++i) {
      Bytes m = msg;
      m[i] ^= 0x01;
      EXPECT_FALSE(verify_sig(m, sig, kp.pk, *gp)) << "byte " << i;
    }
    for (std::size_t i = 0; i < sig.commit_hash.size(); ++i) {
      auto s = sig;
      s.commit_hash[i] ^= 0x80;
      EXPECT_FALSE(verify_sig(msg, s, kp.pk, *gp));
    }
  }
}

TEST(Schnorr, ResponsePerturbationFails) {
  const auto& gp = GroupParams::sim();
  Rng rng(6);
  Keypair kp = Keypair::generate(gp, rng);
  Bytes msg{1, 2, 3};
  auto sig = sign(msg, kp, gp);
  sig.response = gp.reduce(sig.response + 1);
  EXPECT_FALSE(verify_sig(msg, sig, kp.pk, gp));
}

TEST(ZeroOne, CompletenessAndBinding) {
  const auto& gp = GroupParams::sim();
  Rng rng(8);
  Keypair kp = Keypair::generate(gp, rng);
  Bytes ctx{'c'};
  for (int m = 0; m <= 1; ++m) {
    BigInt r = rng.between(1, gp.q - 1);
    auto c = encrypt_exp(static_cast<std::uint64_t>(m), r, kp.pk, gp);
    auto pf = prove_zero_or_one(c, m, r, kp.pk, ctx, gp, rng);
    EXPECT_TRUE(verify_zero_or_one(c, pf, kp.pk, ctx, gp));
    EXPECT_FALSE(verify_zero_or_one(c, pf, kp.pk, Bytes{'d'}, gp));
    auto bad = pf;
    bad.one.response = gp.reduce(bad.one.response + 1);
    EXPECT_FALSE(verify_zero_or_one(c, bad, kp.pk, ctx, gp));
  }
}

TEST(ZeroOne, CiphertextOfTwoCannotBeProved) {
  const auto& gp = GroupParams::sim();
  Rng rng(9);
  Keypair kp = Keypair::generate(gp, rng);
  BigInt r = rng.between(1, gp.q - 1);
  auto two = encrypt_exp(2, r, kp.pk, gp);
  EXPECT_THROW(prove_zero_or_one(two, 2, r, kp.pk, {}, gp, rng), InvalidArgument);
  // A proof produced by pretending the value is 1 does not verify.
  auto forged = prove_zero_or_one(two, 1, r, kp.pk, {}, gp, rng);
  EXPECT_FALSE(verify_zero_or_one(two, forged, kp.pk, {}, gp));
}
