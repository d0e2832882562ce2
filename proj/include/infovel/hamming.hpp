#pragma once

// Block-redundancy code: b data blocks of k' bits each are followed by
// redundancy blocks such that any single arbitrarily modified block can be
// undone. Every bit position is coded independently with a shortened Hamming
// code.
//
// Frozen layout (do not change without bumping the format):
//   * codeword positions are 1 .. 2^r - 1; parity bit q sits at position 2^q;
//   * data block i occupies the i-th non-power-of-two position in increasing
//     order; data positions beyond b are the padded (always zero) bits;
//   * parity of position j = bit q of XOR{pos(i) : data bit i at j is 1}, so a
//     valid codeword has zero syndrome (XOR of the positions holding ones);
//   * block order on the wire: b data blocks, r parity blocks (q = 0..r-1),
//     then all-zero dummy blocks up to red = max(r, ceil(log2 b) + 1).

#include <bit>
#include <cstdint>
#include <span>
#include <vector>

#include "infovel/core.hpp"

namespace infovel {

// Smallest e with 2^e >= n.
inline int ceil_log2(std::uint64_t n) {
  require(n >= 1, "ceil_log2 of zero");
  return n == 1 ? 0 : 64 - std::countl_zero(n - 1);
}

// Least r with b <= 2^r - r - 1.
inline int parity_bit_count(std::uint64_t b) {
  require(b >= 2, "block code needs b >= 2");
  int r = 2;
  while ((std::uint64_t{1} << r) - static_cast<std::uint64_t>(r) - 1 < b) ++r;
  return r;
}

inline int redundancy_count(std::uint64_t b) {
  require(b >= 2, "block code needs b >= 2 (b = 1 cannot correct a single corrupted copy)");
  return std::max(parity_bit_count(b), ceil_log2(b) + 1);
}

class BlockCode {
 public:
  explicit BlockCode(std::uint64_t b)
      : b_(b), r_bits_(parity_bit_count(b)), red_(redundancy_count(b)) {
    const std::uint64_t n = (std::uint64_t{1} << r_bits_) - 1;
    data_index_.assign(n + 1, -1);
    for (std::uint64_t pos = 1; pos <= n && data_pos_.size() < b_; ++pos) {
      if (std::has_single_bit(pos)) continue;
      data_index_[pos] = static_cast<std::int64_t>(data_pos_.size());
      data_pos_.push_back(pos);
    }
    pad_ = (n - static_cast<std::uint64_t>(r_bits_)) - b_;
  }

  std::uint64_t data_blocks() const noexcept { return b_; }
  int parity_blocks() const noexcept { return r_bits_; }
  int redundancy_blocks() const noexcept { return red_; }
  std::uint64_t total_blocks() const noexcept { return b_ + static_cast<std::uint64_t>(red_); }
  std::uint64_t padding() const noexcept { return pad_; }

  // data: b blocks of k' bits, block-major. Returns (b + red) blocks of k' bits.
  Bits encode_blocks(std::span<const std::uint8_t> data, std::size_t k_prime) const {
    Bits out;
    encode_blocks_into(data, k_prime, out);
    return out;
  }

  void encode_blocks_into(std::span<const std::uint8_t> data, std::size_t k_prime, Bits& out) const {
    require(k_prime >= 1, "blocks must hold at least one bit");
    require(data.size() == b_ * k_prime, "data length must be b * k'");
    const std::size_t base = out.size();
    out.insert(out.end(), data.begin(), data.end());
    out.resize(base + total_blocks() * k_prime, 0);
    for (std::size_t j = 0; j < k_prime; ++j) {
      std::uint64_t s = 0;
      for (std::uint64_t i = 0; i < b_; ++i) {
        if (data[i * k_prime + j]) s ^= data_pos_[i];
      }
      for (int q = 0; q < r_bits_; ++q) {
        out[base + (b_ + static_cast<std::uint64_t>(q)) * k_prime + j] =
            static_cast<std::uint8_t>((s >> q) & 1U);
      }
    }
  }

  // received: (b + red) blocks of k' bits. Returns the b data blocks, corrected
  // position by position using the syndrome. Dummy blocks are ignored.
  Bits decode_blocks(std::span<const std::uint8_t> received, std::size_t k_prime) const {
    Bits out;
    decode_blocks_into(received, k_prime, out);
    return out;
  }

  void decode_blocks_into(std::span<const std::uint8_t> received, std::size_t k_prime, Bits& out) const {
    require(k_prime >= 1, "blocks must hold at least one bit");
    require(received.size() == total_blocks() * k_prime, "received length must be (b + red) * k'");
    const std::size_t base = out.size();
    out.insert(out.end(), received.begin(), received.begin() + static_cast<std::ptrdiff_t>(b_ * k_prime));
    for (std::size_t j = 0; j < k_prime; ++j) {
      std::uint64_t s = 0;
      for (std::uint64_t i = 0; i < b_; ++i) {
        if (received[i * k_prime + j]) s ^= data_pos_[i];
      }
      for (int q = 0; q < r_bits_; ++q) {
        if (received[(b_ + static_cast<std::uint64_t>(q)) * k_prime + j]) s ^= std::uint64_t{1} << q;
      }
      if (s == 0 || s >= data_index_.size()) continue;
      const std::int64_t idx = data_index_[s];
      if (idx >= 0) out[base + static_cast<std::size_t>(idx) * k_prime + j] ^= 1U;
    }
  }

 private:
  std::uint64_t b_;
  int r_bits_;
  int red_;
  std::uint64_t pad_ = 0;
  std::vector<std::uint64_t> data_pos_;
  std::vector<std::int64_t> data_index_;
};

inline Bits encode_blocks(std::span<const std::uint8_t> data, std::uint64_t b, std::size_t k_prime) {
  return BlockCode(b).encode_blocks(data, k_prime);
}

inline Bits decode_blocks(std::span<const std::uint8_t> received, std::uint64_t b, std::size_t k_prime) {
  return BlockCode(b).decode_blocks(received, k_prime);
}

}  // namespace infovel
