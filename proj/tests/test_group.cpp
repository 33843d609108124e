#include <gtest/gtest.h>
#include <sodium.h>

#include <set>

#include "privaflow/errors.hpp"
#include "privaflow/group.hpp"

using namespace privaflow;
using namespace privaflow::group;

namespace {

// libsodium is the reference implementation for every group operation below.
Bytes32 ref_base_mul(const Scalar& s) {
  Bytes32 out{};
  if (s.is_zero()) return out;  // libsodium refuses to return the identity
  EXPECT_EQ(crypto_scalarmult_ristretto255_base(out.data(), s.bytes().data()), 0);
  return out;
}

Bytes32 ref_mul(const Bytes32& p, const Scalar& s) {
  Bytes32 out{};
  if (crypto_scalarmult_ristretto255(out.data(), s.bytes().data(), p.data()) != 0) out.fill(0);
  return out;
}

Bytes32 ref_add(const Bytes32& a, const Bytes32& b) {
  Bytes32 out{};
  EXPECT_EQ(crypto_core_ristretto255_add(out.data(), a.data(), b.data()), 0);
  return out;
}

Bytes32 ref_scalar(void (*op)(unsigned char*, const unsigned char*, const unsigned char*), const Scalar& a,
                   const Scalar& b) {
  Bytes32 out{};
  op(out.data(), a.bytes().data(), b.bytes().data());
  return out;
}

}  // namespace

TEST(Group, ParamsFor128BitLevel) {
  const auto p = group_gen(128);
  EXPECT_EQ(p.group_id, "ristretto255");
  EXPECT_EQ(p.order_bits(), 253u);
  EXPECT_EQ(p.order_decimal(), "7237005577332262213973186563042994240857116359379907606001950938285454250989");
  EXPECT_EQ(p.element_len, 32u);
  EXPECT_EQ(p.scalar_len, 32u);
  EXPECT_EQ(GroupElement::generator().serialize(), p.generator);
  EXPECT_EQ(group_gen(128), group_gen(128));
}

TEST(Group, RejectsOtherSecurityLevels) {
  EXPECT_THROW(group_gen(192), UnsupportedSecurityLevel);
  EXPECT_THROW(group_gen(80), UnsupportedSecurityLevel);
}

TEST(Group, GeneratorMatchesReference) {
  EXPECT_EQ(GroupElement::generator().serialize(), ref_base_mul(Scalar::one()));
}

TEST(Group, FixedBaseExpMatchesReference) {
  Rng rng = Rng::seeded(11);
  for (int i = 0; i < 200; ++i) {
    const auto s = Scalar::random(rng);
    ASSERT_EQ(exp_g(s).serialize(), ref_base_mul(s)) << i;
  }
  for (std::uint64_t v : {0ull, 1ull, 2ull, 15ull, 16ull, 255ull, 256ull, 1ull << 40}) {
    EXPECT_EQ(exp_g(Scalar::from_u64(v)).serialize(), ref_base_mul(Scalar::from_u64(v))) << v;
  }
  EXPECT_EQ(exp_g(-Scalar::one()).serialize(), ref_base_mul(-Scalar::one()));
}

TEST(Group, VariableBaseExpMatchesReference) {
  Rng rng = Rng::seeded(12);
  for (int i = 0; i < 100; ++i) {
    const auto base = exp_g(Scalar::random(rng));
    const auto s = Scalar::random(rng);
    ASSERT_EQ(exp(base, s).serialize(), ref_mul(base.serialize(), s)) << i;
  }
}

TEST(Group, CombWindowsAgree) {
  Rng rng = Rng::seeded(13);
  const auto base = exp_g(Scalar::random(rng));
  const FixedBase w4(base, 4), w7(base, 7), w8(base, 8);
  for (int i = 0; i < 50; ++i) {
    const auto s = Scalar::random(rng);
    const auto want = exp(base, s);
    EXPECT_EQ(w4.exp(s), want);
    EXPECT_EQ(w7.exp(s), want);
    EXPECT_EQ(w8.exp(s), want);
  }
}

TEST(Group, MulDivInverseMatchReference) {
  Rng rng = Rng::seeded(14);
  for (int i = 0; i < 50; ++i) {
    const auto a = exp_g(Scalar::random(rng));
    const auto b = exp_g(Scalar::random(rng));
    EXPECT_EQ(mul(a, b).serialize(), ref_add(a.serialize(), b.serialize()));
    EXPECT_EQ(mul(div(a, b), b), a);
    EXPECT_TRUE(mul(a, inverse(a)).is_identity());
  }
}

TEST(Group, MultiExpMatchesNaiveProduct) {
  Rng rng = Rng::seeded(15);
  for (std::size_t n : {0u, 1u, 2u, 3u, 17u, 64u, 201u}) {
    std::vector<GroupElement> bases;
    std::vector<Scalar> exps;
    Bytes32 want{};
    bool have = false;
    for (std::size_t i = 0; i < n; ++i) {
      bases.push_back(exp_g(Scalar::random(rng)));
      // mix in the special cases multi_exp short-circuits
      exps.push_back(i % 7 == 0 ? Scalar::zero() : i % 5 == 0 ? Scalar::one() : Scalar::random(rng));
      const auto term = ref_mul(bases.back().serialize(), exps.back());
      if (exps.back().is_zero()) continue;
      want = have ? ref_add(want, term) : term;
      have = true;
    }
    EXPECT_EQ(multi_exp(bases, exps).serialize(), want) << n;
  }
}

TEST(Group, MultiExpLengthMismatch) {
  std::vector<GroupElement> bases(3, GroupElement::generator());
  std::vector<Scalar> exps(2, Scalar::one());
  EXPECT_THROW(multi_exp(bases, exps), LengthMismatch);
}

TEST(Group, ScalarArithmeticMatchesReference) {
  Rng rng = Rng::seeded(16);
  for (int i = 0; i < 200; ++i) {
    const auto a = Scalar::random(rng);
    const auto b = Scalar::random(rng);
    EXPECT_EQ((a + b).bytes(), ref_scalar(crypto_core_ristretto255_scalar_add, a, b));
    EXPECT_EQ((a - b).bytes(), ref_scalar(crypto_core_ristretto255_scalar_sub, a, b));
    EXPECT_EQ((a * b).bytes(), ref_scalar(crypto_core_ristretto255_scalar_mul, a, b));
    EXPECT_EQ(a + (-a), Scalar::zero());
  }
  EXPECT_EQ(Scalar::from_u64(7).to_u64(), 7u);
  EXPECT_FALSE((-Scalar::one()).to_u64().has_value());
}

TEST(Group, SerializationRoundTripAndRejection) {
  Rng rng = Rng::seeded(17);
  for (int i = 0; i < 50; ++i) {
    const auto p = exp_g(Scalar::random(rng));
    EXPECT_EQ(GroupElement::deserialize(p.serialize()), p);
  }
  EXPECT_TRUE(GroupElement::deserialize(GroupElement::identity().serialize()).is_identity());

  Bytes32 bad;
  bad.fill(0xff);
  EXPECT_THROW(GroupElement::deserialize(bad), DecodeError);
  // odd ("negative") field elements are never canonical encodings
  Bytes32 odd{};
  odd[0] = 1;
  EXPECT_THROW(GroupElement::deserialize(odd), DecodeError);
  EXPECT_THROW(GroupElement::deserialize(std::vector<std::uint8_t>(31)), DecodeError);

  // the group order itself is not a canonical scalar
  Bytes32 order = group_gen(128).order_le;
  EXPECT_THROW(Scalar::from_bytes(order), DecodeError);
  order[0] -= 1;
  EXPECT_EQ(Scalar::from_bytes(order), -Scalar::one());
}

TEST(Group, DlogTableExhaustive) {
  const std::uint64_t bound = 1000;
  const DlogTable table(bound);
  auto acc = GroupElement::identity();
  for (std::uint64_t x = 0; x <= bound; ++x) {
    ASSERT_EQ(table.recover(acc), x);
    ASSERT_EQ(dlog_recover(acc, bound), x);
    acc = mul(acc, GroupElement::generator());
  }
  EXPECT_THROW(table.recover(acc), NotInRange);
  EXPECT_FALSE(table.find(acc).has_value());
  EXPECT_THROW(table.recover(inverse(GroupElement::generator())), NotInRange);
}

TEST(Group, BabyStepGiantStepAgreesWithTable) {
  Rng rng = Rng::seeded(18);
  const std::uint64_t bound = 5000;
  const DlogTable table(bound);
  for (int i = 0; i < 1000; ++i) {
    const auto x = rng.below(bound + 1);
    const auto target = exp_g(Scalar::from_u64(x));
    ASSERT_EQ(dlog_recover_bsgs(target, bound), table.recover(target));
  }
  EXPECT_EQ(dlog_recover_bsgs(exp_g(Scalar::from_u64(987654)), 1000000), 987654u);
  EXPECT_THROW(dlog_recover_bsgs(exp_g(Scalar::from_u64(bound + 1)), bound), NotInRange);
}
