#include <gtest/gtest.h>

#include <cstdint>
#include <random>
#include <vector>

#include "infovel/multibit.hpp"

namespace {

using namespace infovel;

Bits random_bits(std::size_t n, std::mt19937_64& rng) {
  Bits out(n);
  for (auto& b : out) b = static_cast<std::uint8_t>(rng() & 1U);
  return out;
}

std::vector<NoiseTape> tapes_for(std::uint64_t m, double p, std::uint64_t trial) {
  std::vector<NoiseTape> tapes;
  for (std::uint64_t j = 0; j < m; ++j) tapes.push_back(NoiseTape::for_trial(77, trial, j, CrossoverProb(p)));
  return tapes;
}

const MultiLevelCode& default_code() {
  static const MultiLevelCode code(MultiBitParams::defaults());
  return code;
}

TEST(MultiBitParams, Defaults) {
  const auto p = MultiBitParams::defaults();
  ASSERT_EQ(p.max_level(), 8);
  EXPECT_EQ(p.t(1), 9);
  EXPECT_EQ(p.b(1), 2);
  EXPECT_EQ(p.t(2), 16);
  EXPECT_EQ(p.b(2), 4);
  EXPECT_EQ(p.t(3), 25);
  EXPECT_EQ(p.b(3), 6);
  EXPECT_EQ(p.b(8), 25);
  EXPECT_EQ(p.t(8), 100);
}

TEST(MultiBitParams, Validation) {
  MultiBitParams p = MultiBitParams::defaults();
  p.b_seq[0] = 1;
  EXPECT_THROW(p.validate(), ConfigError);
  p = MultiBitParams::defaults();
  p.t_seq.pop_back();
  EXPECT_THROW(p.validate(), ConfigError);
  p = MultiBitParams::defaults();
  p.r = 2;
  EXPECT_THROW(p.validate(), ConfigError);
}

TEST(MultiLevelCode, Dimensions) {
  const auto& code = default_code();
  EXPECT_EQ(code.k(0), 1u);
  EXPECT_EQ(code.n(0), 1u);
  EXPECT_EQ(code.k(1), 2u);
  EXPECT_EQ(code.n(1), 5u);
  EXPECT_EQ(code.k(2), 8u);
  EXPECT_EQ(code.n(2), 35u);
  EXPECT_EQ(code.k(3), 48u);
  EXPECT_EQ(code.n(3), 350u);
  EXPECT_EQ(code.k(4), 432u);
  EXPECT_EQ(code.n(4), 4900u);
}

TEST(MultiLevelCode, RateDecreasesSlowly) {
  const auto& code = default_code();
  EXPECT_DOUBLE_EQ(static_cast<double>(code.k(1)) / code.n(1), 0.4);
  double prev = 1.0;
  for (int l = 1; l <= 4; ++l) {
    const double rate = static_cast<double>(code.k(l)) / code.n(l);
    EXPECT_LT(rate, prev);
    EXPECT_GT(rate, 0.05);
    prev = rate;
  }
}

TEST(MultiLevelCode, LevelOneCodeword) {
  // b = 2: data at positions 3 and 5, parity blocks q = 0, 1, 2, no dummies.
  const auto& code = default_code();
  EXPECT_EQ(code.encode_level(Bits{1, 0}, 1), (Bits{1, 0, 1, 1, 0}));
  EXPECT_EQ(code.encode_level(Bits{0, 1}, 1), (Bits{0, 1, 1, 0, 1}));
  EXPECT_EQ(code.encode_level(Bits{1, 1}, 1), (Bits{1, 1, 0, 1, 1}));
}

class RoundTrip : public ::testing::TestWithParam<int> {};

TEST_P(RoundTrip, DecodeInvertsEncode) {
  const int l = GetParam();
  const auto& code = default_code();
  std::mt19937_64 rng(static_cast<std::uint64_t>(l));
  for (int i = 0; i < 200; ++i) {
    const Bits msg = random_bits(code.k(l), rng);
    const Bits cw = code.encode_level(msg, l);
    ASSERT_EQ(cw.size(), code.n(l));
    ASSERT_EQ(code.decode_level(cw, l), msg);
  }
}

INSTANTIATE_TEST_SUITE_P(Levels, RoundTrip, ::testing::Values(0, 1, 2, 3));

class SubBlockCorruption : public ::testing::TestWithParam<int> {};

TEST_P(SubBlockCorruption, OneGarbledSubBlockIsRepaired) {
  const int l = GetParam();
  const auto& code = default_code();
  std::mt19937_64 rng(100 + static_cast<std::uint64_t>(l));
  const std::size_t sub = code.n(l - 1);
  const std::size_t subs = code.n(l) / sub;
  for (int i = 0; i < 50; ++i) {
    const Bits msg = random_bits(code.k(l), rng);
    const Bits cw = code.encode_level(msg, l);
    for (std::size_t s = 0; s < subs; ++s) {
      Bits received = cw;
      const Bits garbage = random_bits(sub, rng);
      std::copy(garbage.begin(), garbage.end(), received.begin() + static_cast<std::ptrdiff_t>(s * sub));
      ASSERT_EQ(code.decode_level(received, l), msg) << "level " << l << " sub-block " << s;
    }
  }
}

INSTANTIATE_TEST_SUITE_P(Levels, SubBlockCorruption, ::testing::Values(1, 2));

TEST(MultiLevelCode, OneFlipPerSubBlockAtLevelTwo) {
  const auto& code = default_code();
  std::mt19937_64 rng(4);
  const Bits msg = random_bits(8, rng);
  Bits received = code.encode_level(msg, 2);
  for (std::size_t s = 0; s < 7; ++s) received[s * 5 + (rng() % 5)] ^= 1U;
  EXPECT_EQ(code.decode_level(received, 2), msg);
}

TEST(MultiLevelCode, DecodingIsIdempotent) {
  const auto& code = default_code();
  std::mt19937_64 rng(6);
  for (int i = 0; i < 200; ++i) {
    const Bits noisy = random_bits(code.n(2), rng);
    const Bits once = code.decode_level(noisy, 2);
    EXPECT_EQ(code.decode_level(code.encode_level(once, 2), 2), once);
  }
}

TEST(MultiLevelCode, LengthChecks) {
  const auto& code = default_code();
  EXPECT_THROW(code.encode_level(Bits(3, 0), 1), ConfigError);
  EXPECT_THROW(code.decode_level(Bits(6, 0), 1), ConfigError);
  EXPECT_THROW(code.encode_level(Bits(1, 0), 9), ConfigError);
}

TEST(MultiBitLevels, NodeLevels) {
  const auto p = MultiBitParams::defaults();
  EXPECT_EQ(node_level_multibit(5, p), 0);
  EXPECT_EQ(node_level_multibit(9, p), 1);
  EXPECT_EQ(node_level_multibit(18, p), 1);
  EXPECT_EQ(node_level_multibit(16, p), 0);
  EXPECT_EQ(node_level_multibit(144, p), 2);
  EXPECT_EQ(node_level_multibit(288, p), 2);
  EXPECT_EQ(node_level_multibit(3600, p), 3);
}

TEST(MultiBitLevels, ScheduleForLength144) {
  const auto schedule = make_multibit_schedule(144, 2, default_code());
  int level_one = 0;
  for (std::uint64_t j = 1; j < 144; ++j) level_one += schedule.node_levels[j] >= 1;
  EXPECT_EQ(level_one, 15);
  EXPECT_EQ(schedule.plan.relay_max_level, 1);
  EXPECT_EQ(schedule.plan.case_id, 1);
  EXPECT_EQ(schedule.plan.stream_bits, 5u);
}

TEST(MessagePlan, ShortMessagePadsToRelayLevel) {
  const auto schedule = make_multibit_schedule(10, 1, default_code());
  EXPECT_EQ(schedule.plan.case_id, 1);
  EXPECT_EQ(schedule.plan.decode_level, 1);
  EXPECT_EQ(schedule.plan.pad, 1u);
  const Bits msg{1};
  const auto enc = encode_message(msg, schedule.plan, default_code());
  EXPECT_EQ(enc.stream.size(), 5u);
  EXPECT_EQ(decode_message(enc.stream, 1, schedule.plan, default_code()), msg);
}

TEST(MessagePlan, ShortChainSendsRawBit) {
  const auto schedule = make_multibit_schedule(5, 1, default_code());
  EXPECT_EQ(schedule.plan.decode_level, 0);
  EXPECT_EQ(schedule.plan.stream_bits, 1u);
}

TEST(MessagePlan, LongMessageSplitsIntoBlocks) {
  const auto plan = make_multibit_schedule(10, 16, default_code()).plan;
  EXPECT_EQ(plan.case_id, 2);
  EXPECT_EQ(plan.level, 2);
  EXPECT_EQ(plan.decode_level, 2);
  EXPECT_EQ(plan.blocks, 2u);
  EXPECT_EQ(plan.pad, 0u);
  EXPECT_EQ(plan.stream_bits, 70u);
}

TEST(MessagePlan, PaddingStaysBelowOneBlock) {
  const auto& code = default_code();
  for (std::uint64_t m : {1u, 10u, 144u, 200u}) {
    for (std::uint64_t k = 1; k <= 100; ++k) {
      const auto plan = make_multibit_schedule(m, k, code).plan;
      const std::uint64_t kl = code.k(plan.decode_level);
      EXPECT_EQ((k + plan.pad) % kl, 0u);
      EXPECT_EQ(plan.blocks * kl, k + plan.pad);
      EXPECT_LE(plan.decode_level, code.max_level());
      if (plan.case_id == 2) {
        EXPECT_LT(plan.pad, kl);
      }
    }
  }
}

TEST(MultiBitRun, NoiselessDeliveryAndDelays) {
  const auto& code = default_code();
  std::mt19937_64 rng(2);
  for (std::uint64_t m : {1u, 9u, 10u, 144u, 300u}) {
    for (std::uint64_t k : {1u, 2u, 8u, 16u}) {
      const Bits msg = random_bits(k, rng);
      auto tapes = tapes_for(m, 0.0, 0);
      const auto schedule = make_multibit_schedule(m, k, code);
      std::uint64_t wait = 0;
      for (std::uint64_t j = 1; j < m; ++j) wait += code.n(schedule.node_levels[j]);
      const TrialResult r = run_multibit(msg, m, code, tapes, {true});
      EXPECT_TRUE(r.correct) << m << " " << k;
      EXPECT_EQ(r.estimate, msg);
      EXPECT_EQ(r.transmission_delay, schedule.plan.stream_bits);
      EXPECT_EQ(r.propagation_delay, wait);
      EXPECT_EQ(r.n_total, r.transmission_delay + r.propagation_delay);
    }
  }
}

TEST(MultiBitRun, ComplementedMessageFailsTogether) {
  const auto& code = default_code();
  std::mt19937_64 rng(12);
  for (std::uint64_t trial = 0; trial < 200; ++trial) {
    const Bits msg = random_bits(8, rng);
    Bits flipped = msg;
    for (auto& b : flipped) b ^= 1U;
    auto a = tapes_for(30, 0.05, trial);
    auto b = tapes_for(30, 0.05, trial);
    const auto ra = run_multibit(msg, 30, code, a);
    const auto rb = run_multibit(flipped, 30, code, b);
    ASSERT_EQ(ra.correct, rb.correct);
  }
}

TEST(AnytimeEncoder, FirstTwoBits) {
  const auto& code = default_code();
  AnytimeEncoder enc(code);
  EXPECT_EQ(enc.push(1), Bits{1});
  EXPECT_EQ(enc.push(0), (Bits{0, 1, 1, 0}));
  EXPECT_EQ(enc.length(), 2u);
}

TEST(AnytimeEncoder, OutputIsAlwaysAPrefix) {
  const auto& code = default_code();
  std::mt19937_64 rng(21);
  const Bits msg = random_bits(code.k(3), rng);
  const Bits full = code.encode_level(msg, 3);
  AnytimeEncoder enc(code);
  Bits sent;
  for (std::size_t i = 0; i < msg.size(); ++i) {
    const Bits out = enc.push(msg[i]);
    sent.insert(sent.end(), out.begin(), out.end());
    ASSERT_LE(sent.size(), full.size());
    ASSERT_TRUE(std::equal(sent.begin(), sent.end(), full.begin())) << "after " << i + 1 << " bits";
    for (int l = 1; l <= 3; ++l) {
      if ((i + 1) == code.k(l)) {
        const Bits head(msg.begin(), msg.begin() + static_cast<std::ptrdiff_t>(code.k(l)));
        ASSERT_EQ(sent, code.encode_level(head, l));
      }
    }
  }
  EXPECT_EQ(sent, full);
}

TEST(AnytimeEncoder, RejectsNonBits) {
  AnytimeEncoder enc(default_code());
  EXPECT_THROW(enc.push(2), ConfigError);
}

}  // namespace
