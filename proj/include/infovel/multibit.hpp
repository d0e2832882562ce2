#pragma once

// k-bit relay protocol built from nested block-redundancy codes.
//
// A level-l codeword carries k_l = b_1 * ... * b_l message bits in
// n_l = B_1 * ... * B_l channel bits, B_i = b_i + red(b_i). Level l splits its
// message into b_l blocks, appends red(b_l) redundancy blocks and level-(l-1)
// encodes every block. Relays at level l decode and re-encode each n_l-bit
// block they receive.

#include <algorithm>
#include <cstdint>
#include <deque>
#include <span>
#include <string>
#include <vector>

#include "infovel/channel.hpp"
#include "infovel/core.hpp"
#include "infovel/engine.hpp"
#include "infovel/hamming.hpp"

namespace infovel {

struct MultiBitParams {
  std::vector<int> b_seq;  // b_seq[l - 1] = b_l
  std::vector<int> t_seq;  // t_seq[l - 1] = t_l
  int r = 1;

  // t_l = (l + 2)^2, b_l = floor((l + 2)^2 / 4).
  static MultiBitParams defaults(int levels = 8) {
    MultiBitParams params;
    for (int l = 1; l <= levels; ++l) {
      params.t_seq.push_back((l + 2) * (l + 2));
      params.b_seq.push_back((l + 2) * (l + 2) / 4);
    }
    return params;
  }

  int max_level() const noexcept { return static_cast<int>(b_seq.size()); }
  int b(int l) const { return b_seq.at(static_cast<std::size_t>(l - 1)); }
  int t(int l) const { return t_seq.at(static_cast<std::size_t>(l - 1)); }

  void validate() const {
    require(!b_seq.empty(), "need at least one level");
    require(b_seq.size() == t_seq.size(), "b and t sequences must have equal length");
    for (std::size_t i = 0; i < b_seq.size(); ++i) {
      require(b_seq[i] >= 2, "b_l must be >= 2");
      require(t_seq[i] >= 2, "t_l must be >= 2");
    }
    require(r >= 1 && r % 2 == 1, "reps must be odd and >= 1");
  }
};

struct LevelDims {
  std::vector<std::uint64_t> k_of;  // index 0..max_level
  std::vector<std::uint64_t> n_of;
};

inline LevelDims level_dims(const MultiBitParams& params) {
  params.validate();
  LevelDims dims;
  dims.k_of = {1};
  dims.n_of = {1};
  for (int l = 1; l <= params.max_level(); ++l) {
    const auto b = static_cast<std::uint64_t>(params.b(l));
    const auto blocks = b + static_cast<std::uint64_t>(redundancy_count(b));
    ensure(dims.n_of.back() <= UINT64_MAX / blocks, "codeword length overflow");
    dims.k_of.push_back(dims.k_of.back() * b);
    dims.n_of.push_back(dims.n_of.back() * blocks);
  }
  return dims;
}

class MultiLevelCode {
 public:
  explicit MultiLevelCode(MultiBitParams params) : params_(std::move(params)), dims_(level_dims(params_)) {
    for (int l = 1; l <= params_.max_level(); ++l) {
      codes_.emplace_back(static_cast<std::uint64_t>(params_.b(l)));
    }
  }

  const MultiBitParams& params() const noexcept { return params_; }
  const LevelDims& dims() const noexcept { return dims_; }
  int max_level() const noexcept { return params_.max_level(); }
  std::uint64_t k(int l) const { return dims_.k_of.at(static_cast<std::size_t>(l)); }
  std::uint64_t n(int l) const { return dims_.n_of.at(static_cast<std::size_t>(l)); }
  const BlockCode& block_code(int l) const { return codes_.at(static_cast<std::size_t>(l - 1)); }

  Bits encode_level(std::span<const std::uint8_t> message, int l) const {
    check_level(l);
    require(message.size() == k(l), "message length must be k_l");
    Bits out;
    out.reserve(n(l));
    encode_into(message, l, out);
    return out;
  }

  Bits decode_level(std::span<const std::uint8_t> bits, int l) const {
    check_level(l);
    require(bits.size() == n(l), "codeword length must be n_l");
    Bits out;
    out.reserve(k(l));
    decode_into(bits, l, out);
    return out;
  }

 private:
  void check_level(int l) const {
    require(l >= 0 && l <= max_level(), "level out of range: " + std::to_string(l));
  }

  void encode_into(std::span<const std::uint8_t> message, int l, Bits& out) const {
    if (l == 0) {
      out.push_back(message[0]);
      return;
    }
    const std::size_t sub = k(l - 1);
    const Bits blocks = block_code(l).encode_blocks(message, sub);
    const std::span<const std::uint8_t> view(blocks);
    for (std::size_t i = 0; i * sub < blocks.size(); ++i) encode_into(view.subspan(i * sub, sub), l - 1, out);
  }

  void decode_into(std::span<const std::uint8_t> bits, int l, Bits& out) const {
    if (l == 0) {
      out.push_back(bits[0]);
      return;
    }
    const std::size_t sub = n(l - 1);
    Bits inner;
    inner.reserve(block_code(l).total_blocks() * k(l - 1));
    for (std::size_t i = 0; i * sub < bits.size(); ++i) decode_into(bits.subspan(i * sub, sub), l - 1, inner);
    block_code(l).decode_blocks_into(inner, k(l - 1), out);
  }

  MultiBitParams params_;
  LevelDims dims_;
  std::vector<BlockCode> codes_;
};

// Largest l with (t_1 * ... * t_l) | j, capped at the configured depth.
inline int node_level_multibit(std::uint64_t j, const MultiBitParams& params) {
  require(j >= 1, "node index must be >= 1");
  int level = 0;
  std::uint64_t span = 1;
  for (int l = 1; l <= params.max_level(); ++l) {
    span *= static_cast<std::uint64_t>(params.t(l));
    if (j % span != 0) break;
    level = l;
  }
  return level;
}

struct MessagePlan {
  int case_id = 1;             // 1: zero-pad to k_{L'}; 2: split into level-L blocks
  int level = 0;               // encode level L with k_L <= k < k_{L+1}
  int relay_max_level = 0;     // L'
  int decode_level = 0;        // max(L, L')
  std::uint64_t blocks = 1;
  std::uint64_t pad = 0;       // zero bits appended to the message
  std::uint64_t stream_bits = 0;
};

struct MultiBitSchedule {
  std::uint64_t m = 0;
  std::vector<int> node_levels;  // index 1..m-1
  MessagePlan plan;
};

inline MessagePlan plan_message(std::uint64_t k, int relay_max_level, const MultiLevelCode& code) {
  require(k >= 1, "message must have at least one bit");
  int level = 0;
  while (level < code.max_level() && code.k(level + 1) <= k) ++level;
  MessagePlan plan;
  plan.level = level;
  plan.relay_max_level = relay_max_level;
  plan.decode_level = std::max(level, relay_max_level);
  const int enc = plan.decode_level;
  if (k <= code.k(relay_max_level)) {
    plan.case_id = 1;
    plan.blocks = 1;
    plan.pad = code.k(enc) - k;
  } else {
    plan.case_id = 2;
    plan.blocks = (k + code.k(enc) - 1) / code.k(enc);
    plan.pad = plan.blocks * code.k(enc) - k;
  }
  plan.stream_bits = plan.blocks * code.n(enc);
  return plan;
}

inline MultiBitSchedule make_multibit_schedule(std::uint64_t m, std::uint64_t k, const MultiLevelCode& code) {
  require(m >= 1, "m must be >= 1");
  MultiBitSchedule schedule;
  schedule.m = m;
  schedule.node_levels.assign(m + 1, 0);
  int relay_max = 0;
  for (std::uint64_t j = 1; j < m; ++j) {
    schedule.node_levels[j] = node_level_multibit(j, code.params());
    relay_max = std::max(relay_max, schedule.node_levels[j]);
  }
  schedule.plan = plan_message(k, relay_max, code);
  ensure(relay_max <= schedule.plan.decode_level, "relay level above decoder level");
  return schedule;
}

struct EncodedMessage {
  Bits stream;
  MessagePlan plan;
};

inline EncodedMessage encode_message(std::span<const std::uint8_t> message, const MessagePlan& plan,
                                     const MultiLevelCode& code) {
  const std::uint64_t kl = code.k(plan.decode_level);
  Bits padded(message.begin(), message.end());
  padded.resize(message.size() + plan.pad, 0);
  ensure(padded.size() == plan.blocks * kl, "padding does not fill the blocks");
  EncodedMessage out;
  out.plan = plan;
  out.stream.reserve(plan.stream_bits);
  const std::span<const std::uint8_t> view(padded);
  for (std::uint64_t q = 0; q < plan.blocks; ++q) {
    const Bits cw = code.encode_level(view.subspan(q * kl, kl), plan.decode_level);
    out.stream.insert(out.stream.end(), cw.begin(), cw.end());
  }
  return out;
}

inline Bits decode_message(std::span<const std::uint8_t> stream, std::uint64_t k, const MessagePlan& plan,
                           const MultiLevelCode& code) {
  const std::uint64_t nl = code.n(plan.decode_level);
  require(stream.size() == plan.blocks * nl, "stream length does not match the plan");
  Bits out;
  for (std::uint64_t q = 0; q < plan.blocks; ++q) {
    const Bits part = code.decode_level(stream.subspan(q * nl, nl), plan.decode_level);
    out.insert(out.end(), part.begin(), part.end());
  }
  out.resize(k);
  return out;
}

// Relay that decodes each n_l-bit block and forwards its re-encoding.
class RecodeRelay {
 public:
  RecodeRelay(const MultiLevelCode& code, int level) : code_(&code), level_(level) {
    in_.reserve(code.n(level));
  }

  std::uint64_t block_length() const { return code_->n(level_); }

  void receive(std::uint8_t bit) {
    in_.push_back(bit);
    if (in_.size() < block_length()) return;
    if (level_ == 0) {
      out_.push_back(std::move(in_));
    } else {
      out_.push_back(code_->encode_level(code_->decode_level(in_, level_), level_));
    }
    in_.clear();
    in_.reserve(block_length());
  }

  std::uint8_t emit() {
    ensure(!out_.empty(), "relay asked to emit before its block was received");
    const std::uint8_t bit = out_.front()[pos_];
    if (++pos_ == out_.front().size()) {
      out_.pop_front();
      pos_ = 0;
    }
    return bit;
  }

 private:
  const MultiLevelCode* code_;
  int level_;
  Bits in_;
  std::deque<Bits> out_;
  std::size_t pos_ = 0;
};

class StreamSource {
 public:
  explicit StreamSource(const Bits& stream) : stream_(&stream) {}
  std::uint8_t emit() {
    ensure(pos_ < stream_->size(), "source stream exhausted");
    return (*stream_)[pos_++];
  }

 private:
  const Bits* stream_;
  std::size_t pos_ = 0;
};

class CollectSink {
 public:
  void receive(std::uint8_t bit) { bits_.push_back(bit); }
  const Bits& bits() const noexcept { return bits_; }

 private:
  Bits bits_;
};

inline TrialResult run_multibit(std::span<const std::uint8_t> message, std::uint64_t m,
                                const MultiLevelCode& code, std::span<NoiseTape> tapes,
                                EngineOptions options = {}) {
  const MultiBitSchedule schedule = make_multibit_schedule(m, message.size(), code);
  const EncodedMessage encoded = encode_message(message, schedule.plan, code);

  std::vector<RecodeRelay> relays;
  relays.reserve(m - 1);
  for (std::uint64_t j = 1; j < m; ++j) relays.emplace_back(code, schedule.node_levels[j]);
  StreamSource source(encoded.stream);
  CollectSink sink;
  const ChainTiming timing =
      run_sync_chain(source, std::span<RecodeRelay>(relays), sink, encoded.stream.size(),
                     static_cast<std::uint32_t>(code.params().r), tapes, options);

  TrialResult result;
  result.estimate = decode_message(sink.bits(), message.size(), schedule.plan, code);
  result.correct = std::equal(result.estimate.begin(), result.estimate.end(), message.begin(), message.end());
  result.transmission_delay = timing.transmission_delay;
  result.propagation_delay = timing.propagation_delay;
  result.n_total = timing.n_total;
  return result;
}

// Streaming encoder that needs no knowledge of the message length: every
// message bit goes out immediately, and whenever the length reaches a multiple
// of k_l the level-(l-1)-encoded redundancy blocks of the just-completed level-l
// group are appended, innermost level first. Emitted bits are never revised.
class AnytimeEncoder {
 public:
  explicit AnytimeEncoder(const MultiLevelCode& code) : code_(&code) {}

  Bits push(std::uint8_t bit) {
    require(bit <= 1, "bits must be 0 or 1");
    message_.push_back(bit);
    Bits emitted{bit};
    for (int l = 1; l <= code_->max_level(); ++l) {
      const std::uint64_t kl = code_->k(l);
      if (message_.size() % kl != 0) break;
      const std::uint64_t sub = code_->k(l - 1);
      const std::span<const std::uint8_t> group(message_.data() + message_.size() - kl, kl);
      const Bits blocks = code_->block_code(l).encode_blocks(group, sub);
      const std::span<const std::uint8_t> view(blocks);
      for (std::size_t i = code_->block_code(l).data_blocks(); i * sub < blocks.size(); ++i) {
        const Bits enc = code_->encode_level(view.subspan(i * sub, sub), l - 1);
        emitted.insert(emitted.end(), enc.begin(), enc.end());
      }
    }
    return emitted;
  }

  std::uint64_t length() const noexcept { return message_.size(); }

 private:
  const MultiLevelCode* code_;
  Bits message_;
};

}  // namespace infovel
