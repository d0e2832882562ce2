#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace infovel {

// One bit per element, values restricted to {0, 1}.
using Bits = std::vector<std::uint8_t>;

// Invalid parameters or configuration. The CLI maps this to exit code 2.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Broken internal invariant (causality, delay identity). CLI exit code 3.
class InternalError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

inline void require(bool cond, std::string_view what) {
  if (!cond) throw ConfigError(std::string(what));
}

inline void ensure(bool cond, std::string_view what) {
  if (!cond) throw InternalError(std::string(what));
}

// Outcome of a single protocol execution over the chain.
struct TrialResult {
  bool correct = false;
  Bits estimate;
  std::uint64_t transmission_delay = 0;  // raw bits emitted by node 0
  std::uint64_t propagation_delay = 0;   // first emission -> its arrival at node m
  std::uint64_t n_total = 0;             // step of the decoder's last reception
};

}  // namespace infovel
