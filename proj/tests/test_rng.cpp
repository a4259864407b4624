#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "holderbt/rng.hpp"

using holderbt::CounterRng;
using holderbt::philox4x32_10;

// Published Philox4x32-10 known-answer vectors.
TEST(Philox, KnownAnswerZero) {
  const auto out = philox4x32_10({0, 0, 0, 0}, {0, 0});
  EXPECT_EQ(out[0], 0x6627e8d5u);
  EXPECT_EQ(out[1], 0xe169c58du);
  EXPECT_EQ(out[2], 0xbc57ac4cu);
  EXPECT_EQ(out[3], 0x9b00dbd8u);
}

TEST(Philox, KnownAnswerAllOnes) {
  const auto out = philox4x32_10({0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu},
                                 {0xffffffffu, 0xffffffffu});
  EXPECT_EQ(out[0], 0x408f276du);
  EXPECT_EQ(out[1], 0x41c83b0eu);
  EXPECT_EQ(out[2], 0xa20bc7c6u);
  EXPECT_EQ(out[3], 0x6d5451fdu);
}

TEST(Philox, KnownAnswerPi) {
  const auto out = philox4x32_10({0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u},
                                 {0xa4093822u, 0x299f31d0u});
  EXPECT_EQ(out[0], 0xd16cfe09u);
  EXPECT_EQ(out[1], 0x94fdccebu);
  EXPECT_EQ(out[2], 0x5001e420u);
  EXPECT_EQ(out[3], 0x24126ea1u);
}

TEST(CounterRng, FirstWordsComeFromBlockZero) {
  CounterRng rng(0, 0);
  const auto block = philox4x32_10({0, 0, 0, 0}, {0, 0});
  const std::uint64_t w0 = block[0] | (static_cast<std::uint64_t>(block[1]) << 32);
  const std::uint64_t w1 = block[2] | (static_cast<std::uint64_t>(block[3]) << 32);
  EXPECT_EQ(rng.next_u64(), w0);
  EXPECT_EQ(rng.next_u64(), w1);
}

TEST(CounterRng, SameSeedSameStream) {
  CounterRng a(42, 7);
  CounterRng b(42, 7);
  for (int i = 0; i < 1000; ++i) ASSERT_EQ(a.next_u64(), b.next_u64());
}

TEST(CounterRng, StreamsAndSeedsDiffer) {
  CounterRng a(42, 1);
  CounterRng b(42, 2);
  CounterRng c(43, 1);
  int same_ab = 0;
  int same_ac = 0;
  for (int i = 0; i < 100; ++i) {
    const auto x = a.next_u64();
    same_ab += x == b.next_u64();
    same_ac += x == c.next_u64();
  }
  EXPECT_EQ(same_ab, 0);
  EXPECT_EQ(same_ac, 0);
}

TEST(CounterRng, SplitIsDeterministicAndDistinct) {
  const CounterRng parent(9, 3);
  CounterRng c1 = parent.split(0);
  CounterRng c1_again = parent.split(0);
  CounterRng c2 = parent.split(1);
  EXPECT_EQ(c1.seed(), parent.seed());
  EXPECT_NE(c1.stream(), c2.stream());
  EXPECT_NE(c1.stream(), parent.stream());
  for (int i = 0; i < 50; ++i) {
    const auto v = c1.next_u64();
    EXPECT_EQ(v, c1_again.next_u64());
    EXPECT_NE(v, c2.next_u64());
  }
}

TEST(CounterRng, UniformInUnitInterval) {
  CounterRng rng(1, 1);
  double sum = 0.0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    const double u = rng.uniform();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    sum += u;
  }
  // Mean of n uniforms has standard deviation 1/sqrt(12 n) ~ 0.0009.
  EXPECT_NEAR(sum / n, 0.5, 0.005);
}

TEST(CounterRng, UniformUsesTop53Bits) {
  CounterRng a(5, 5);
  CounterRng b(5, 5);
  const double expected = static_cast<double>(b.next_u64() >> 11) * 0x1p-53;
  EXPECT_EQ(a.uniform(), expected);
}

TEST(CounterRng, NormalMoments) {
  CounterRng rng(2, 2);
  const int n = 200000;
  double sum = 0.0;
  double sq = 0.0;
  for (int i = 0; i < n; ++i) {
    const double z = rng.normal();
    ASSERT_TRUE(std::isfinite(z));
    sum += z;
    sq += z * z;
  }
  const double mean = sum / n;
  EXPECT_NEAR(mean, 0.0, 0.01);
  EXPECT_NEAR(sq / n - mean * mean, 1.0, 0.02);
}

TEST(CounterRng, NoShortCycles) {
  CounterRng rng(0, 0);
  std::set<std::uint64_t> seen;
  for (int i = 0; i < 10000; ++i) seen.insert(rng.next_u64());
  EXPECT_EQ(seen.size(), 10000u);
}
