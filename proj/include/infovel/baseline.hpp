#pragma once

// Reference protocols that forward after per-hop repetition.
//
// P0: every hop repeats each estimate N times; relays majority-vote N bits and
// forward; block_count such blocks are chained back to back and the decoder
// votes over the block verdicts.
//
// P1: the chain is cut into sub-chains of s = floor(log2 m) hops (the last one
// may be shorter). Sub-chain endpoints collect s blocks of N bits, vote twice
// and forward the verdict for s * N steps. ceil(m / s) such instances are
// chained and the decoder votes over them.

#include <bit>
#include <cstdint>
#include <span>

#include "infovel/core.hpp"
#include "infovel/onebit.hpp"

namespace infovel {

enum class BaselineVariant { p0, p1 };

struct BaselineParams {
  int reps_per_hop = 1;
  std::uint64_t block_count = 1;
  BaselineVariant variant = BaselineVariant::p0;

  void validate() const {
    require(reps_per_hop >= 1 && reps_per_hop % 2 == 1, "reps_per_hop must be odd and >= 1");
    require(block_count >= 1, "block_count must be >= 1");
  }
};

// Per-hop reps with exact per-hop error <= 1/m^2 and m chained blocks.
inline BaselineParams p0_params(std::uint64_t m, double p) {
  require(m >= 1, "m must be >= 1");
  const double md = static_cast<double>(m);
  BaselineParams params;
  params.reps_per_hop = minimal_odd_repetitions(p, std::min(0.5, 1.0 / (md * md)));
  params.block_count = m;
  params.variant = BaselineVariant::p0;
  return params;
}

inline MajorityChainSpec p0_chain_spec(std::uint64_t m, const BaselineParams& params) {
  params.validate();
  require(m >= 1, "m must be >= 1");
  const auto n = static_cast<std::uint32_t>(params.reps_per_hop);
  MajorityChainSpec spec;
  spec.relay_arities.assign(m - 1, {n});
  spec.sink_arities = {n};
  spec.instances = params.block_count;
  return spec;
}

inline TrialResult run_p0(std::uint8_t theta, std::uint64_t m, const BaselineParams& params,
                          std::span<NoiseTape> tapes, EngineOptions options = {}) {
  return run_majority_chain(theta, p0_chain_spec(m, params), tapes, options);
}

struct P1Layout {
  std::uint64_t subchain_length = 0;
  std::uint64_t subchains = 0;
  std::uint64_t instances = 0;
  int reps_per_hop = 1;
};

inline P1Layout p1_layout(std::uint64_t m, double p) {
  require(m >= 8, "P1 needs m >= 8");
  P1Layout layout;
  layout.subchain_length = static_cast<std::uint64_t>(std::bit_width(m) - 1);
  layout.subchains = (m + layout.subchain_length - 1) / layout.subchain_length;
  layout.instances = layout.subchains;
  const double s = static_cast<double>(layout.subchain_length);
  layout.reps_per_hop = minimal_odd_repetitions(p, 1.0 / (s * s));
  return layout;
}

inline MajorityChainSpec p1_chain_spec(std::uint64_t m, const P1Layout& layout) {
  const auto n = static_cast<std::uint32_t>(layout.reps_per_hop);
  const auto s = static_cast<std::uint32_t>(layout.subchain_length);
  MajorityChainSpec spec;
  spec.relay_arities.reserve(m - 1);
  for (std::uint64_t j = 1; j < m; ++j) {
    if (j % layout.subchain_length == 0) {
      spec.relay_arities.push_back({n, s});
    } else {
      spec.relay_arities.push_back({n});
    }
  }
  spec.sink_arities = {n, s};
  spec.instances = layout.instances;
  return spec;
}

inline TrialResult run_p1(std::uint8_t theta, std::uint64_t m, double p, std::span<NoiseTape> tapes,
                          EngineOptions options = {}) {
  return run_majority_chain(theta, p1_chain_spec(m, p1_layout(m, p)), tapes, options);
}

}  // namespace infovel
