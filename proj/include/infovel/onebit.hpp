#pragma once

// One-bit relay protocol: nodes are assigned levels by divisibility, a level-l
// relay decodes each block of b^l bits by recursive b-ary majority and forwards
// its verdict b^l times. Node m decodes at level L = floor(log_t(m / c)).

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "infovel/channel.hpp"
#include "infovel/core.hpp"
#include "infovel/engine.hpp"

namespace infovel {

struct OneBitParams {
  int b = 3;  // majority arity
  int t = 4;  // level spacing base
  int c = 1;  // level-0 spacing multiplier
  int r = 1;  // per-link repetitions

  void validate() const {
    require(b >= 3 && b % 2 == 1, "b must be odd and >= 3");
    require(t > b, "t must exceed b");
    require(c >= 1, "c must be >= 1");
    require(r >= 1 && r % 2 == 1, "reps must be odd and >= 1");
  }
};

// Repeats the whole protocol ceil(m^alpha) times back to back.
struct ChainParams {
  double alpha = 1.0 - std::log(3.0) / std::log(4.0);

  void validate() const { require(alpha > 0.0 && alpha < 1.0, "alpha must lie in (0, 1)"); }

  std::uint64_t instances(std::uint64_t m) const {
    validate();
    const double raw = std::pow(static_cast<double>(m), alpha);
    // Guard against pow landing a hair above an exact integer.
    const double rounded = std::round(raw);
    if (std::abs(raw - rounded) < 1e-9) return std::max<std::uint64_t>(1, static_cast<std::uint64_t>(rounded));
    return static_cast<std::uint64_t>(std::ceil(raw));
  }
};

inline std::uint64_t ipow(std::uint64_t base, int e) {
  std::uint64_t out = 1;
  for (int i = 0; i < e; ++i) {
    ensure(out <= UINT64_MAX / base, "integer power overflow");
    out *= base;
  }
  return out;
}

// Level of relay i >= 1: largest l with (c * t^l) | i, or 0 if none exists.
inline int node_level(std::uint64_t i, const OneBitParams& params) {
  require(i >= 1, "node index must be >= 1");
  const auto c = static_cast<std::uint64_t>(params.c);
  const auto t = static_cast<std::uint64_t>(params.t);
  if (i % c != 0) return 0;
  std::uint64_t q = i / c;
  int level = 0;
  while (q % t == 0) {
    q /= t;
    ++level;
  }
  return level;
}

// Decoder level: largest L with c * t^L <= m.
inline int decoder_level(std::uint64_t m, const OneBitParams& params) {
  require(m >= 1, "m must be >= 1");
  const auto c = static_cast<std::uint64_t>(params.c);
  const auto t = static_cast<std::uint64_t>(params.t);
  if (m < c) return 0;
  int level = 0;
  std::uint64_t span = c;
  while (span <= m / t) {
    span *= t;
    ++level;
  }
  return level;
}

struct LevelSchedule {
  std::uint64_t m = 0;
  std::vector<int> levels;  // levels[i] for relay i; entries 0 and m unused
  int decoder_level = 0;

  std::uint64_t count_at_least(int l) const {
    return static_cast<std::uint64_t>(
        std::count_if(levels.begin() + 1, levels.end() - 1, [l](int v) { return v >= l; }));
  }
};

inline LevelSchedule make_schedule(std::uint64_t m, const OneBitParams& params) {
  params.validate();
  LevelSchedule schedule;
  schedule.m = m;
  schedule.decoder_level = decoder_level(m, params);
  schedule.levels.assign(m + 1, 0);
  for (std::uint64_t i = 1; i < m; ++i) schedule.levels[i] = node_level(i, params);
  return schedule;
}

inline std::uint8_t majority(std::span<const std::uint8_t> bits) {
  require(bits.size() % 2 == 1, "majority needs an odd number of votes");
  const auto ones = static_cast<std::size_t>(std::count(bits.begin(), bits.end(), std::uint8_t{1}));
  return static_cast<std::uint8_t>(2 * ones > bits.size());
}

// Majority that also accepts even counts; a tie resolves to the first vote.
inline std::uint8_t majority_first_tiebreak(std::span<const std::uint8_t> votes) {
  require(!votes.empty(), "no votes");
  const auto ones = static_cast<std::size_t>(std::count(votes.begin(), votes.end(), std::uint8_t{1}));
  if (2 * ones == votes.size()) return votes.front();
  return static_cast<std::uint8_t>(2 * ones > votes.size());
}

// Recursive b-ary majority over b^l bits.
inline std::uint8_t decode_block(std::span<const std::uint8_t> bits, int level, int b) {
  require(level >= 0 && b >= 3 && b % 2 == 1, "bad decode_block parameters");
  require(bits.size() == ipow(static_cast<std::uint64_t>(b), level), "block length must be b^l");
  if (level == 0) return bits[0];
  const std::size_t sub = bits.size() / static_cast<std::size_t>(b);
  std::vector<std::uint8_t> votes(static_cast<std::size_t>(b));
  for (std::size_t k = 0; k < votes.size(); ++k) {
    votes[k] = decode_block(bits.subspan(k * sub, sub), level - 1, b);
  }
  return majority(votes);
}

// Incremental recursive majority. Arities are listed innermost first: a block
// is arity[0] * arity[1] * ... bits, the first arity[0] bits are reduced to one
// vote, arity[1] such votes are reduced to one, and so on. Per-bit work is at
// most the tree depth; memory is three counters per level.
class StreamingMajority {
 public:
  explicit StreamingMajority(std::vector<std::uint32_t> arities) : arities_(std::move(arities)) {
    block_ = 1;
    for (auto a : arities_) {
      require(a >= 1, "arity must be >= 1");
      block_ *= a;
    }
    counters_.resize(arities_.size());
  }

  static StreamingMajority uniform(int level, int b) {
    require(level >= 0 && b >= 3 && b % 2 == 1, "bad streaming decoder parameters");
    return StreamingMajority(std::vector<std::uint32_t>(static_cast<std::size_t>(level),
                                                        static_cast<std::uint32_t>(b)));
  }

  std::uint64_t block_length() const noexcept { return block_; }
  bool complete() const noexcept { return done_; }

  void feed(std::uint8_t bit) {
    require(!done_, "block already complete; call finish() first");
    std::uint8_t vote = bit;
    for (std::size_t l = 0; l < arities_.size(); ++l) {
      Counter& ctr = counters_[l];
      if (ctr.seen == 0) ctr.first = vote;
      ctr.ones += vote;
      if (++ctr.seen < arities_[l]) return;
      if (2 * ctr.ones == ctr.seen) {
        vote = ctr.first;
      } else {
        vote = static_cast<std::uint8_t>(2 * ctr.ones > ctr.seen);
      }
      ctr = Counter{};
    }
    result_ = vote;
    done_ = true;
  }

  std::uint8_t finish() {
    require(done_, "streaming decoder finished before a full block was fed");
    done_ = false;
    return result_;
  }

 private:
  struct Counter {
    std::uint32_t ones = 0;
    std::uint32_t seen = 0;
    std::uint8_t first = 0;
  };
  std::vector<std::uint32_t> arities_;
  std::vector<Counter> counters_;
  std::uint64_t block_ = 1;
  std::uint8_t result_ = 0;
  bool done_ = false;
};

// Exact P[Binomial(r, p) >= (r + 1) / 2] for odd r, summed in log space.
inline double effective_crossover(double p, int r) {
  require(p >= 0.0 && p < 0.5, "crossover probability must satisfy 0 <= p < 1/2");
  require(r >= 1 && r % 2 == 1, "repetition count must be odd and >= 1");
  if (p == 0.0) return 0.0;
  const double lp = std::log(p);
  const double lq = std::log1p(-p);
  const double lg_r = std::lgamma(r + 1.0);
  double sum = 0.0;
  for (int k = r; k >= (r + 1) / 2; --k) {
    const double log_term = lg_r - std::lgamma(k + 1.0) - std::lgamma(r - k + 1.0) + k * lp + (r - k) * lq;
    sum += std::exp(log_term);
  }
  return std::min(1.0, sum);
}

// Smallest odd r whose exact majority error is at most `target`.
inline int minimal_odd_repetitions(double p, double target, int max_r = 100001) {
  require(target > 0.0 && target < 1.0, "target must lie in (0, 1)");
  for (int r = 1; r <= max_r; r += 2) {
    if (effective_crossover(p, r) <= target) return r;
  }
  throw ConfigError("no odd repetition count up to " + std::to_string(max_r) + " reaches the target");
}

// Relay that majority-decodes each input block and forwards the verdict as
// many times as the block is long.
class MajorityRelay {
 public:
  explicit MajorityRelay(StreamingMajority decoder) : decoder_(std::move(decoder)) {}

  std::uint64_t block_length() const noexcept { return decoder_.block_length(); }

  void receive(std::uint8_t bit) {
    decoder_.feed(bit);
    if (!decoder_.complete()) return;
    ensure(pending_ < queue_.size(), "relay output queue overflow");
    queue_[(head_ + pending_) % queue_.size()] = decoder_.finish();
    ++pending_;
  }

  std::uint8_t emit() {
    if (left_ == 0) {
      ensure(pending_ > 0, "relay asked to emit before its block was received");
      current_ = queue_[head_];
      head_ = (head_ + 1) % queue_.size();
      --pending_;
      left_ = decoder_.block_length();
    }
    --left_;
    return current_;
  }

 private:
  StreamingMajority decoder_;
  std::array<std::uint8_t, 4> queue_{};
  std::size_t head_ = 0;
  std::size_t pending_ = 0;
  std::uint64_t left_ = 0;
  std::uint8_t current_ = 0;
};

class ConstantSource {
 public:
  explicit ConstantSource(std::uint8_t bit) : bit_(bit) {}
  std::uint8_t emit() const noexcept { return bit_; }

 private:
  std::uint8_t bit_;
};

// Decodes consecutive instances and keeps each verdict.
class VerdictSink {
 public:
  explicit VerdictSink(StreamingMajority decoder) : decoder_(std::move(decoder)) {}

  void receive(std::uint8_t bit) {
    decoder_.feed(bit);
    if (decoder_.complete()) verdicts_.push_back(decoder_.finish());
  }

  const Bits& verdicts() const noexcept { return verdicts_; }

 private:
  StreamingMajority decoder_;
  Bits verdicts_;
};

// Description of a chain whose every node is a recursive-majority node.
struct MajorityChainSpec {
  std::vector<std::vector<std::uint32_t>> relay_arities;  // one entry per relay 1..m-1
  std::vector<std::uint32_t> sink_arities;
  std::uint64_t instances = 1;
  std::uint32_t reps = 1;
};

inline TrialResult run_majority_chain(std::uint8_t theta, const MajorityChainSpec& spec,
                                      std::span<NoiseTape> tapes, EngineOptions options = {}) {
  require(theta <= 1, "theta must be 0 or 1");
  require(spec.instances >= 1, "need at least one instance");
  std::vector<MajorityRelay> relays;
  relays.reserve(spec.relay_arities.size());
  for (const auto& arities : spec.relay_arities) relays.emplace_back(StreamingMajority(arities));
  VerdictSink sink{StreamingMajority(spec.sink_arities)};
  ConstantSource source{theta};
  std::uint64_t block = 1;
  for (auto a : spec.sink_arities) block *= a;

  const ChainTiming timing = run_sync_chain(source, std::span<MajorityRelay>(relays), sink,
                                            block * spec.instances, spec.reps, tapes, options);
  ensure(sink.verdicts().size() == spec.instances, "sink produced wrong number of verdicts");
  TrialResult result;
  result.estimate = {majority_first_tiebreak(sink.verdicts())};
  result.correct = result.estimate[0] == theta;
  result.transmission_delay = timing.transmission_delay;
  result.propagation_delay = timing.propagation_delay;
  result.n_total = timing.n_total;
  return result;
}

inline MajorityChainSpec onebit_chain_spec(std::uint64_t m, const OneBitParams& params,
                                           std::uint64_t instances = 1) {
  params.validate();
  require(m >= 1, "m must be >= 1");
  const LevelSchedule schedule = make_schedule(m, params);
  const auto b = static_cast<std::uint32_t>(params.b);
  MajorityChainSpec spec;
  spec.relay_arities.reserve(m - 1);
  for (std::uint64_t i = 1; i < m; ++i) {
    spec.relay_arities.emplace_back(static_cast<std::size_t>(schedule.levels[i]), b);
  }
  spec.sink_arities.assign(static_cast<std::size_t>(schedule.decoder_level), b);
  spec.instances = instances;
  spec.reps = static_cast<std::uint32_t>(params.r);
  return spec;
}

inline TrialResult run_onebit(std::uint8_t theta, std::uint64_t m, const OneBitParams& params,
                              std::span<NoiseTape> tapes, EngineOptions options = {}) {
  return run_majority_chain(theta, onebit_chain_spec(m, params), tapes, options);
}

// Back-to-back instances: relays see one continuous stream, so the propagation
// delay is paid once; the decoder majority-votes the per-instance verdicts.
inline TrialResult run_onebit_chained(std::uint8_t theta, std::uint64_t m, const OneBitParams& params,
                                      const ChainParams& chain, std::span<NoiseTape> tapes,
                                      EngineOptions options = {}) {
  return run_majority_chain(theta, onebit_chain_spec(m, params, chain.instances(m)), tapes, options);
}

}  // namespace infovel
