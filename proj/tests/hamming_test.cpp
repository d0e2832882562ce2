#include <gtest/gtest.h>

#include <cstdint>
#include <random>
#include <vector>

#include "infovel/hamming.hpp"

namespace {

using namespace infovel;

Bits random_bits(std::size_t n, std::mt19937_64& rng) {
  Bits out(n);
  for (auto& b : out) b = static_cast<std::uint8_t>(rng() & 1U);
  return out;
}

TEST(Hamming, CeilLog2) {
  EXPECT_EQ(ceil_log2(1), 0);
  EXPECT_EQ(ceil_log2(2), 1);
  EXPECT_EQ(ceil_log2(3), 2);
  EXPECT_EQ(ceil_log2(8), 3);
  EXPECT_EQ(ceil_log2(9), 4);
}

TEST(Hamming, BlockCounts) {
  EXPECT_EQ(parity_bit_count(4), 3);
  EXPECT_EQ(redundancy_count(4), 3);
  EXPECT_EQ(parity_bit_count(11), 4);
  EXPECT_EQ(redundancy_count(11), 5);
  EXPECT_EQ(redundancy_count(3), 3);
  EXPECT_EQ(redundancy_count(2), 3);
  EXPECT_EQ(parity_bit_count(12), 5);
  EXPECT_THROW(redundancy_count(1), ConfigError);
}

TEST(Hamming, RedundancyIsCeilLog2PlusOneFromThree) {
  for (std::uint64_t b = 3; b <= (1U << 16); ++b) ASSERT_EQ(redundancy_count(b), ceil_log2(b) + 1) << b;
}

TEST(Hamming, SevenFourCodeword) {
  EXPECT_EQ(encode_blocks(Bits{1, 0, 1, 1}, 4, 1), (Bits{1, 0, 1, 1, 0, 1, 0}));
  EXPECT_EQ(encode_blocks(Bits{0, 0, 0, 0}, 4, 1), Bits(7, 0));
  EXPECT_EQ(encode_blocks(Bits{1, 1, 1, 1}, 4, 1), Bits(7, 1));
}

TEST(Hamming, DummyBlocksAreZero) {
  const BlockCode code(11);
  ASSERT_EQ(code.total_blocks(), 16u);
  const Bits enc = code.encode_blocks(Bits(11 * 3, 1), 3);
  for (std::size_t i = 15 * 3; i < 16 * 3; ++i) EXPECT_EQ(enc[i], 0);
}

TEST(Hamming, PositionsAreCodedIndependently) {
  std::mt19937_64 rng(5);
  const BlockCode code(6);
  const std::size_t kp = 4;
  const Bits data = random_bits(6 * kp, rng);
  const Bits enc = code.encode_blocks(data, kp);
  for (std::size_t j = 0; j < kp; ++j) {
    Bits column;
    for (std::size_t i = 0; i < 6; ++i) column.push_back(data[i * kp + j]);
    const Bits col_enc = code.encode_blocks(column, 1);
    for (std::size_t i = 0; i < code.total_blocks(); ++i) EXPECT_EQ(enc[i * kp + j], col_enc[i]);
  }
}

TEST(Hamming, LengthChecks) {
  const BlockCode code(5);
  EXPECT_THROW(code.encode_blocks(Bits(9, 0), 2), ConfigError);
  EXPECT_THROW(code.decode_blocks(Bits(5, 0), 1), ConfigError);
  EXPECT_THROW(code.encode_blocks(Bits{}, 0), ConfigError);
}

class SingleBlockCorruption : public ::testing::TestWithParam<std::tuple<int, int>> {};

TEST_P(SingleBlockCorruption, AnyOneBlockIsRepaired) {
  const auto [b_int, kp_int] = GetParam();
  const auto b = static_cast<std::uint64_t>(b_int);
  const auto kp = static_cast<std::size_t>(kp_int);
  const BlockCode code(b);
  std::mt19937_64 rng(b * 31 + kp);
  const Bits data = random_bits(b * kp, rng);
  const Bits enc = code.encode_blocks(data, kp);
  ASSERT_EQ(code.decode_blocks(enc, kp), data);

  std::vector<Bits> patterns;
  patterns.emplace_back(kp, 1);
  for (std::size_t bit = 0; bit < kp; ++bit) {
    Bits single(kp, 0);
    single[bit] = 1;
    patterns.push_back(single);
  }
  for (int i = 0; i < 100; ++i) patterns.push_back(random_bits(kp, rng));

  for (std::size_t block = 0; block < code.total_blocks(); ++block) {
    for (const Bits& e : patterns) {
      Bits received = enc;
      for (std::size_t j = 0; j < kp; ++j) received[block * kp + j] ^= e[j];
      ASSERT_EQ(code.decode_blocks(received, kp), data) << "b=" << b << " block=" << block;
    }
  }
}

INSTANTIATE_TEST_SUITE_P(Exhaustive, SingleBlockCorruption,
                         ::testing::Combine(::testing::Range(2, 13), ::testing::Values(1, 8)));

TEST(Hamming, TwoCorruptedBlocksAreNotAlwaysRepaired) {
  const BlockCode code(4);
  Bits enc = code.encode_blocks(Bits{0, 0, 0, 0}, 1);
  enc[0] ^= 1;
  enc[1] ^= 1;
  EXPECT_NE(code.decode_blocks(enc, 1), (Bits{0, 0, 0, 0}));
}

TEST(Hamming, IdempotentOnCodewords) {
  std::mt19937_64 rng(8);
  for (std::uint64_t b = 2; b <= 20; ++b) {
    const BlockCode code(b);
    const Bits data = random_bits(b * 3, rng);
    const Bits once = code.decode_blocks(code.encode_blocks(data, 3), 3);
    EXPECT_EQ(code.decode_blocks(code.encode_blocks(once, 3), 3), once);
  }
}

}  // namespace
