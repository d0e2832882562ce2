#pragma once

// Monte Carlo harness. Trial tau draws its bit (or message) from a generator
// seeded with derive_seed(master, tau, kMessageLink) and hop j's flips from
// NoiseTape::for_trial(master, tau, j). Results are gathered by trial index,
// so the output does not depend on the number of workers.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <exception>
#include <limits>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "infovel/analysis.hpp"
#include "infovel/baseline.hpp"
#include "infovel/channel.hpp"
#include "infovel/core.hpp"
#include "infovel/engine.hpp"
#include "infovel/multibit.hpp"
#include "infovel/onebit.hpp"

namespace infovel {

enum class Protocol { onebit, onebit_chained, multibit, p0, p1 };

inline std::string_view to_string(Protocol protocol) {
  switch (protocol) {
    case Protocol::onebit: return "onebit";
    case Protocol::onebit_chained: return "onebit_chained";
    case Protocol::multibit: return "multibit";
    case Protocol::p0: return "p0";
    case Protocol::p1: return "p1";
  }
  throw InternalError("unknown protocol");
}

inline Protocol parse_protocol(std::string_view name) {
  for (Protocol p : {Protocol::onebit, Protocol::onebit_chained, Protocol::multibit, Protocol::p0, Protocol::p1}) {
    if (to_string(p) == name) return p;
  }
  throw ConfigError("unknown protocol: " + std::string(name));
}

inline constexpr std::uint64_t kMessageLink = std::numeric_limits<std::uint64_t>::max();

struct SimConfig {
  Protocol protocol = Protocol::onebit;
  std::uint64_t m = 1;
  std::uint64_t k = 1;
  double p = 0.0;
  OneBitParams onebit;
  ChainParams chain;
  MultiBitParams multibit = MultiBitParams::defaults();
  std::optional<BaselineParams> baseline;  // P0 sizing; derived from (m, p) when absent
  std::uint64_t trials = 1;
  std::uint64_t master_seed = 0;
  unsigned jobs = 1;
  bool audit = false;

  void validate() const {
    require(m >= 1, "m must be >= 1");
    require(trials >= 1, "trials must be >= 1");
    require(jobs >= 1, "jobs must be >= 1");
    (void)CrossoverProb(p);
    require(k >= 1, "k must be >= 1");
    switch (protocol) {
      case Protocol::onebit:
        onebit.validate();
        require(k == 1, "one-bit protocols carry k = 1");
        break;
      case Protocol::onebit_chained:
        onebit.validate();
        chain.validate();
        require(k == 1, "one-bit protocols carry k = 1");
        break;
      case Protocol::multibit:
        multibit.validate();
        break;
      case Protocol::p0:
        require(k == 1, "baselines carry k = 1");
        require(p > 0.0 || baseline.has_value(), "p0 sizing needs p > 0 or explicit parameters");
        if (baseline) baseline->validate();
        break;
      case Protocol::p1:
        require(k == 1, "baselines carry k = 1");
        require(p > 0.0, "p1 sizing needs p > 0");
        require(m >= 8, "p1 needs m >= 8");
        break;
    }
  }
};

struct ErrorEstimate {
  std::uint64_t errors = 0;
  std::uint64_t trials = 0;
  double rate = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
};

inline constexpr double kWilsonZ = 1.959963984540054;

// Wilson score interval at 95%.
inline ErrorEstimate wilson_estimate(std::uint64_t errors, std::uint64_t trials) {
  require(trials >= 1 && errors <= trials, "need 0 <= errors <= trials, trials >= 1");
  const double n = static_cast<double>(trials);
  const double x = static_cast<double>(errors);
  const double z2 = kWilsonZ * kWilsonZ;
  const double denom = n + z2;
  const double center = (x + z2 / 2.0) / denom;
  const double half = kWilsonZ / denom * std::sqrt(x * (n - x) / n + z2 / 4.0);
  ErrorEstimate e;
  e.errors = errors;
  e.trials = trials;
  e.rate = x / n;
  e.ci_low = errors == 0 ? 0.0 : std::clamp(center - half, 0.0, e.rate);
  e.ci_high = errors == trials ? 1.0 : std::clamp(center + half, e.rate, 1.0);
  return e;
}

struct DelayStats {
  std::uint64_t min = 0;
  std::uint64_t max = 0;
  double mean = 0.0;
};

struct RunSummary {
  SimConfig config;
  ErrorEstimate estimate;
  DelayStats transmission;
  DelayStats propagation;
  DelayStats n_total;
  bool delay_identity_held = true;
};

// Per-configuration state shared read-only by all workers.
class TrialRunner {
 public:
  explicit TrialRunner(const SimConfig& config) : config_(config) {
    config_.validate();
    switch (config_.protocol) {
      case Protocol::onebit:
        spec_ = onebit_chain_spec(config_.m, config_.onebit);
        break;
      case Protocol::onebit_chained:
        spec_ = onebit_chain_spec(config_.m, config_.onebit, config_.chain.instances(config_.m));
        break;
      case Protocol::p0:
        spec_ = p0_chain_spec(config_.m, config_.baseline ? *config_.baseline : p0_params(config_.m, config_.p));
        break;
      case Protocol::p1:
        spec_ = p1_chain_spec(config_.m, p1_layout(config_.m, config_.p));
        break;
      case Protocol::multibit:
        code_.emplace(config_.multibit);
        break;
    }
  }

  TrialResult run(std::uint64_t trial, std::vector<NoiseTape>& tapes) const {
    tapes.clear();
    const CrossoverProb p(config_.p);
    for (std::uint64_t j = 0; j < config_.m; ++j) tapes.push_back(NoiseTape::for_trial(config_.master_seed, trial, j, p));
    Xoshiro256 draw(derive_seed(config_.master_seed, trial, kMessageLink));
    const EngineOptions options{config_.audit};
    if (config_.protocol == Protocol::multibit) {
      Bits message(config_.k);
      for (auto& bit : message) bit = static_cast<std::uint8_t>(draw() >> 63);
      return run_multibit(message, config_.m, *code_, tapes, options);
    }
    const auto theta = static_cast<std::uint8_t>(draw() >> 63);
    return run_majority_chain(theta, spec_, tapes, options);
  }

  const SimConfig& config() const noexcept { return config_; }

 private:
  SimConfig config_;
  MajorityChainSpec spec_;
  std::optional<MultiLevelCode> code_;
};

inline RunSummary run_trials(const SimConfig& config) {
  const TrialRunner runner(config);
  const std::uint64_t trials = config.trials;
  std::vector<TrialResult> results(trials);
  std::atomic<std::uint64_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;

  const auto worker = [&] {
    std::vector<NoiseTape> tapes;
    tapes.reserve(config.m);
    try {
      for (std::uint64_t tau = next++; tau < trials; tau = next++) {
        results[tau] = runner.run(tau, tapes);
        results[tau].estimate.clear();
      }
    } catch (...) {
      const std::lock_guard lock(failure_mutex);
      if (!failure) failure = std::current_exception();
      next = trials;
    }
  };

  const auto workers = static_cast<unsigned>(std::min<std::uint64_t>(config.jobs, trials));
  if (workers <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (failure) std::rethrow_exception(failure);

  RunSummary summary;
  summary.config = config;
  std::uint64_t errors = 0;
  const auto init = [](DelayStats& s, std::uint64_t v) { s.min = s.max = v; };
  init(summary.transmission, results[0].transmission_delay);
  init(summary.propagation, results[0].propagation_delay);
  init(summary.n_total, results[0].n_total);
  double sum_tx = 0.0;
  double sum_prop = 0.0;
  double sum_total = 0.0;
  for (const TrialResult& r : results) {
    if (!r.correct) ++errors;
    summary.delay_identity_held =
        summary.delay_identity_held && r.n_total == r.transmission_delay + r.propagation_delay;
    const auto fold = [](DelayStats& s, std::uint64_t v) {
      s.min = std::min(s.min, v);
      s.max = std::max(s.max, v);
    };
    fold(summary.transmission, r.transmission_delay);
    fold(summary.propagation, r.propagation_delay);
    fold(summary.n_total, r.n_total);
    sum_tx += static_cast<double>(r.transmission_delay);
    sum_prop += static_cast<double>(r.propagation_delay);
    sum_total += static_cast<double>(r.n_total);
  }
  ensure(summary.delay_identity_held, "n_total != transmission + propagation");
  const double n = static_cast<double>(trials);
  summary.transmission.mean = sum_tx / n;
  summary.propagation.mean = sum_prop / n;
  summary.n_total.mean = sum_total / n;
  summary.estimate = wilson_estimate(errors, trials);
  return summary;
}

// Empty lists keep the template's value.
struct SweepGrid {
  std::vector<std::uint64_t> m;
  std::vector<double> p;
  std::vector<int> reps;
  std::vector<int> c;
};

struct SweepRow {
  RunSummary summary;
  double ratio = 0.0;  // m / worst-case n_total
};

inline std::vector<SweepRow> sweep(const SimConfig& base, const SweepGrid& grid) {
  const auto or_base = [](const auto& list, auto value) {
    using T = typename std::decay_t<decltype(list)>::value_type;
    return list.empty() ? std::vector<T>{static_cast<T>(value)} : list;
  };
  const auto ms = or_base(grid.m, base.m);
  const auto ps = or_base(grid.p, base.p);
  const int base_reps = base.protocol == Protocol::multibit ? base.multibit.r : base.onebit.r;
  const auto reps = or_base(grid.reps, base_reps);
  const auto cs = or_base(grid.c, base.onebit.c);

  std::vector<SimConfig> points;
  for (auto m : ms) {
    for (auto p : ps) {
      for (auto r : reps) {
        for (auto c : cs) {
          SimConfig config = base;
          config.m = m;
          config.p = p;
          config.onebit.r = r;
          config.multibit.r = r;
          config.onebit.c = c;
          config.validate();
          points.push_back(config);
        }
      }
    }
  }
  require(!points.empty(), "sweep grid is empty");

  std::vector<SweepRow> rows;
  rows.reserve(points.size());
  for (const SimConfig& config : points) {
    SweepRow row;
    row.summary = run_trials(config);
    row.ratio = static_cast<double>(config.m) / static_cast<double>(row.summary.n_total.max);
    rows.push_back(row);
  }
  return rows;
}

struct AnalyticBound {
  Protocol protocol = Protocol::onebit;
  std::uint64_t m = 0;
  std::uint64_t k = 1;
  double p = 0.0;
  double value = 1.0;
};

// End-to-end union bound for the configuration, where one is available.
inline AnalyticBound analytic_bound(const SimConfig& config) {
  config.validate();
  AnalyticBound bound{config.protocol, config.m, config.k, config.p, 1.0};
  switch (config.protocol) {
    case Protocol::onebit:
      bound.value = onebit_end_to_end_bound(config.m, config.p, config.onebit);
      break;
    case Protocol::multibit:
      bound.value = multibit_end_to_end_bound(config.m, config.k, config.p, MultiLevelCode(config.multibit)).value;
      break;
    default:
      throw ConfigError("no analytical bound for protocol " + std::string(to_string(config.protocol)));
  }
  return bound;
}

struct BoundComparison {
  double empirical = 0.0;
  double bound = 0.0;
  double standard_error = 0.0;
  bool pass = false;
};

// Passes when the empirical rate is within three binomial standard errors of the bound.
inline BoundComparison compare_to_bounds(const RunSummary& run, const AnalyticBound& bound) {
  require(run.config.protocol == bound.protocol && run.config.m == bound.m && run.config.k == bound.k &&
              run.config.p == bound.p,
          "run and bound describe different configurations");
  BoundComparison out;
  out.empirical = run.estimate.rate;
  out.bound = bound.value;
  out.standard_error = std::sqrt(out.empirical * (1.0 - out.empirical) / static_cast<double>(run.estimate.trials));
  out.pass = out.empirical <= out.bound + 3.0 * out.standard_error;
  return out;
}

}  // namespace infovel
