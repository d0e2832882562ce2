#pragma once

// Synchronous discrete-time execution of a relay chain.
//
// Node 0 is the source, nodes 1..m-1 are relays, node m is the sink. At every
// step each active node first emits one raw bit computed from what it received
// at strictly earlier steps; only then are the bits pushed through their links
// and delivered. Each logical bit is carried by `reps` raw bits; receivers
// majority-vote every group of `reps` raw bits back into one logical bit.
//
// The schedule is public: a relay whose block is w logical bits starts
// transmitting reps * w steps after its first reception, so node j first
// transmits at T_j = 1 + reps * (w_1 + ... + w_j).

#include <concepts>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "infovel/channel.hpp"
#include "infovel/core.hpp"

namespace infovel {

template <class S>
concept BitSource = requires(S s) {
  { s.emit() } -> std::convertible_to<std::uint8_t>;
};

template <class S>
concept BitSink = requires(S s, std::uint8_t b) { s.receive(b); };

template <class R>
concept BitRelay = BitSource<R> && BitSink<R> && requires(const R r) {
  { r.block_length() } -> std::convertible_to<std::uint64_t>;
};

struct EngineOptions {
  // Cross-check every relay emission against the public schedule: the block
  // being emitted must have been fully received at an earlier step.
  bool audit = false;
};

struct ChainTiming {
  std::uint64_t transmission_delay = 0;
  std::uint64_t propagation_delay = 0;
  std::uint64_t n_total = 0;
  std::uint64_t audit_checks = 0;
};

template <BitSource Source, BitRelay Relay, BitSink Sink>
ChainTiming run_sync_chain(Source& source, std::span<Relay> relays, Sink& sink,
                           std::uint64_t stream_bits, std::uint32_t reps,
                           std::span<NoiseTape> tapes, EngineOptions options = {}) {
  const std::size_t m = relays.size() + 1;
  require(reps >= 1, "reps must be >= 1");
  require(stream_bits >= 1, "stream must carry at least one bit");
  require(tapes.size() == m, "need one noise tape per hop");

  for (const auto& relay : relays) {
    ensure(stream_bits % relay.block_length() == 0,
           "relay block length must divide the stream length");
  }

  const std::uint64_t raw_len = stream_bits * reps;
  std::vector<std::uint64_t> first_tx(m);
  first_tx[0] = 1;
  for (std::size_t j = 1; j < m; ++j) {
    first_tx[j] = first_tx[j - 1] + reps * relays[j - 1].block_length();
  }
  const std::uint64_t end_step = first_tx[m - 1] + raw_len - 1;

  struct Port {
    std::uint8_t out = 0;
    std::uint32_t out_phase = 0;
    std::uint32_t in_ones = 0;
    std::uint32_t in_count = 0;
    std::uint64_t logical_in = 0;
    std::uint64_t logical_out = 0;
  };
  std::vector<Port> ports(m + 1);
  std::vector<std::uint8_t> sent(m);

  ChainTiming timing;
  std::uint64_t last_sink_rx = 0;
  std::size_t lo = 0;
  std::size_t hi = 0;

  for (std::uint64_t step = 1; step <= end_step; ++step) {
    while (hi + 1 < m && first_tx[hi + 1] <= step) ++hi;
    while (first_tx[lo] + raw_len - 1 < step) ++lo;

    // Emit phase: only receptions from steps < `step` are visible here.
    for (std::size_t j = lo; j <= hi; ++j) {
      Port& port = ports[j];
      if (port.out_phase == 0) {
        if (j == 0) {
          port.out = static_cast<std::uint8_t>(source.emit());
        } else {
          Relay& relay = relays[j - 1];
          if (options.audit) {
            const std::uint64_t w = relay.block_length();
            const std::uint64_t needed = (port.logical_out / w + 1) * w;
            ensure(port.logical_in >= needed,
                   "causality violation at node " + std::to_string(j) + ", step " +
                       std::to_string(step));
            ++timing.audit_checks;
          }
          port.out = static_cast<std::uint8_t>(relay.emit());
        }
        ++port.logical_out;
      }
      sent[j] = port.out;
      if (++port.out_phase == reps) port.out_phase = 0;
    }

    // Delivery phase.
    for (std::size_t j = lo; j <= hi; ++j) {
      const std::uint8_t y = transmit(sent[j], tapes[j].next_flip());
      Port& rx = ports[j + 1];
      rx.in_ones += y;
      if (++rx.in_count < reps) continue;
      const auto logical = static_cast<std::uint8_t>(2 * rx.in_ones > reps);
      rx.in_ones = 0;
      rx.in_count = 0;
      ++rx.logical_in;
      if (j + 1 == m) {
        sink.receive(logical);
        last_sink_rx = step;
      } else {
        relays[j].receive(logical);
      }
    }
  }

  ensure(ports[m].logical_in == stream_bits, "sink did not receive the full stream");
  timing.transmission_delay = raw_len;
  timing.propagation_delay = first_tx[m - 1] - 1;
  timing.n_total = last_sink_rx;
  ensure(timing.n_total == timing.transmission_delay + timing.propagation_delay,
         "delay identity n_total = transmission + propagation violated");
  return timing;
}

}  // namespace infovel
