#pragma once

// Closed-form bounds for the relay protocols: block-error recursions, repetition
// sizing, velocity bounds, delay budgets and the converse recursion on the
// information f(i, j) node j holds about the bit after i steps.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <string>
#include <vector>

#include "infovel/core.hpp"
#include "infovel/hamming.hpp"
#include "infovel/multibit.hpp"
#include "infovel/onebit.hpp"

namespace infovel {

inline constexpr double kThreeToMinusEight = 1.0 / 6561.0;

inline double binomial_coefficient(std::uint64_t n, std::uint64_t k) {
  if (k > n) return 0.0;
  k = std::min(k, n - k);
  double out = 1.0;
  for (std::uint64_t i = 1; i <= k; ++i) out = out * static_cast<double>(n - k + i) / static_cast<double>(i);
  return std::round(out);
}

// eps[l] bounds the failure probability of one level-l block across one span
// between consecutive level-l nodes.
struct BoundTable {
  std::vector<double> eps;
  std::vector<double> eps_simplified;

  int levels() const noexcept { return static_cast<int>(eps.size()) - 1; }
};

// eps_{l+1} = min(1, C(b, (b+1)/2) (t eps_l)^((b+1)/2)); the first step spans
// c * t hops when level-0 spacing is used. The simplified column drops all
// constants: eps0^(((b+1)/2)^l).
inline BoundTable onebit_error_recursion(double eps0, int b, int t, int levels, int c = 1) {
  require(eps0 >= 0.0 && eps0 <= 1.0, "eps0 must lie in [0, 1]");
  require(b >= 3 && b % 2 == 1 && t > b && c >= 1 && levels >= 0, "bad recursion parameters");
  const int half = (b + 1) / 2;
  const double lead = binomial_coefficient(static_cast<std::uint64_t>(b), static_cast<std::uint64_t>(half));
  BoundTable table;
  table.eps = {eps0};
  table.eps_simplified = {eps0};
  double power = 1.0;
  for (int l = 0; l < levels; ++l) {
    const double span = (l == 0 ? static_cast<double>(c) : 1.0) * t;
    table.eps.push_back(std::min(1.0, lead * std::pow(span * table.eps.back(), half)));
    power *= half;
    table.eps_simplified.push_back(std::pow(eps0, power));
  }
  return table;
}

// Exact form eps_l = min(1, C(B_l, 2) (t_l eps_{l-1})^2) with B_l = b_l + red(b_l),
// alongside the simplified 2 (b_l t_l eps_{l-1})^2.
inline BoundTable multibit_error_recursion(double eps0, const MultiBitParams& params, int levels) {
  params.validate();
  require(eps0 >= 0.0 && eps0 <= 1.0, "eps0 must lie in [0, 1]");
  require(levels >= 0 && levels <= params.max_level(), "recursion depth exceeds configured levels");
  BoundTable table;
  table.eps = {eps0};
  table.eps_simplified = {eps0};
  for (int l = 1; l <= levels; ++l) {
    const auto b = static_cast<std::uint64_t>(params.b(l));
    const double blocks = static_cast<double>(b + static_cast<std::uint64_t>(redundancy_count(b)));
    const double t = params.t(l);
    const double prev = table.eps.back();
    table.eps.push_back(std::min(1.0, blocks * (blocks - 1.0) / 2.0 * (t * prev) * (t * prev)));
    const double sprev = table.eps_simplified.back();
    const double x = static_cast<double>(b) * t * sprev;
    table.eps_simplified.push_back(std::min(1.0, 2.0 * x * x));
  }
  return table;
}

struct ConditionRow {
  int level = 0;
  int b = 0;
  int t = 0;
  bool ratio_ok = false;       // b_l / t_l <= 1/2
  double eps_bar = 0.0;        // exact recursion
  double tb_eps = 0.0;         // t_{l+1} b_{l+1} eps_bar_l
  double log_sum = 0.0;        // sum_{i<=l} ln(b_i) / b_i
};

// Finite-horizon diagnostics for the three sufficient conditions. Conditions
// (i) and (iii) are asymptotic; only trends over the horizon are reported.
struct ConditionReport {
  std::vector<ConditionRow> rows;
  bool ratio_condition = true;           // (ii), exact on the horizon
  bool tb_eps_decreasing = true;         // (i) proxy: strictly decreasing for l >= 2
  bool log_sum_increments_shrinking = true;  // (iii) proxy
};

inline ConditionReport check_sufficient_conditions(const MultiBitParams& params, double eps0, int horizon) {
  params.validate();
  require(horizon >= 1 && horizon + 1 <= params.max_level(), "horizon must leave one spare configured level");
  const BoundTable table = multibit_error_recursion(eps0, params, horizon);
  ConditionReport report;
  double log_sum = 0.0;
  for (int l = 1; l <= horizon; ++l) {
    ConditionRow row;
    row.level = l;
    row.b = params.b(l);
    row.t = params.t(l);
    row.ratio_ok = 2 * row.b <= row.t;
    row.eps_bar = table.eps[static_cast<std::size_t>(l)];
    row.tb_eps = static_cast<double>(params.t(l + 1)) * params.b(l + 1) * row.eps_bar;
    log_sum += std::log(static_cast<double>(row.b)) / row.b;
    row.log_sum = log_sum;
    report.ratio_condition = report.ratio_condition && row.ratio_ok;
    report.rows.push_back(row);
  }
  for (std::size_t i = 1; i < report.rows.size(); ++i) {
    const auto& prev = report.rows[i - 1];
    const auto& cur = report.rows[i];
    if (cur.level >= 3 && !(cur.tb_eps < prev.tb_eps)) report.tb_eps_decreasing = false;
    if (i >= 2) {
      const double inc = cur.log_sum - prev.log_sum;
      const double prev_inc = prev.log_sum - report.rows[i - 2].log_sum;
      if (inc > prev_inc) report.log_sum_increments_shrinking = false;
    }
  }
  return report;
}

struct RepetitionReport {
  int hoeffding = 1;   // ceil(ln(1/target) / (2 (1/2 - p)^2)), forced odd
  int exact = 1;       // smallest odd N with exact majority error <= target
  double exact_tail = 0.0;
};

// Hoeffding sizing with natural log; rounded up to the next odd integer.
inline int hoeffding_repetitions(double p, double target) {
  require(p > 0.0 && p < 0.5, "repetition sizing needs 0 < p < 1/2");
  require(target > 0.0 && target < 1.0, "target must lie in (0, 1)");
  const double gap = 0.5 - p;
  const double raw = std::log(1.0 / target) / (2.0 * gap * gap);
  auto n = static_cast<int>(std::ceil(raw - 1e-12));
  n = std::max(n, 1);
  if (n % 2 == 0) ++n;
  return n;
}

inline RepetitionReport repetition_count(double p, double target) {
  RepetitionReport report;
  report.hoeffding = hoeffding_repetitions(p, target);
  report.exact = minimal_odd_repetitions(p, target);
  report.exact_tail = effective_crossover(p, report.exact);
  return report;
}

// c = max(1, floor(1 / (48 p))) for p <= 1/48, else 1.
inline int low_noise_spacing(double p) {
  require(p > 0.0 && p < 0.5, "spacing needs 0 < p < 1/2");
  if (p > 1.0 / 48.0 + 1e-15) return 1;
  const double raw = 1.0 / (48.0 * p);
  const int c = std::max(1, static_cast<int>(std::floor(raw + 1e-9)));
  const double eps1 = 3.0 * std::pow(4.0 * p * c, 2);
  ensure(eps1 <= 1.0 / 48.0 + 1e-12, "spacing does not keep eps_1 below 1/48");
  return c;
}

struct VelocityBounds {
  double lower = 0.0;
  double upper = 0.0;
  double lower_annotation = 0.0;  // (1/31)(1 - 2p)^2, valid only when the ceiling is tight
};

inline VelocityBounds velocity_bounds(double p) {
  require(p > 0.0 && p < 0.5, "velocity bounds need 0 < p < 1/2");
  const double delta = 1.0 - 2.0 * p;
  VelocityBounds v;
  v.upper = delta * delta;
  if (p <= 1.0 / 48.0) {
    v.lower = 0.25;
  } else {
    v.lower = 1.0 / (4.0 * std::ceil(2.0 * std::log(48.0) / (delta * delta)));
  }
  v.lower_annotation = delta * delta / 31.0;
  ensure(v.lower <= v.upper, "velocity lower bound exceeds upper bound");
  return v;
}

struct DelayBudget {
  std::uint64_t hop_wait = 0;           // one step per relay
  std::uint64_t higher_level_wait = 0;  // sum_{l>=1} #(level >= l) * block_l
  std::uint64_t propagation_bound = 0;  // reps * (hop_wait + higher_level_wait)
  double closed_form_bound = 0.0;       // reps * m * (1 + sum_{l>=1} (b/t)^l / c), one-bit only
  std::uint64_t transmission_bits = 0;  // raw bits sent by node 0

  std::uint64_t total_bound() const noexcept { return propagation_bound + transmission_bits; }
};

inline DelayBudget delay_budget(std::uint64_t m, const OneBitParams& params, std::uint64_t instances = 1) {
  params.validate();
  require(m >= 1, "m must be >= 1");
  DelayBudget budget;
  budget.hop_wait = m - 1;
  const auto c = static_cast<std::uint64_t>(params.c);
  const auto t = static_cast<std::uint64_t>(params.t);
  const auto b = static_cast<std::uint64_t>(params.b);
  std::uint64_t span = c * t;
  std::uint64_t block = b;
  while (span <= m - 1 && m > 1) {
    budget.higher_level_wait += ((m - 1) / span) * block;
    span *= t;
    block *= b;
  }
  const auto r = static_cast<std::uint64_t>(params.r);
  budget.propagation_bound = r * (budget.hop_wait + budget.higher_level_wait);
  const double ratio = static_cast<double>(params.b) / params.t;
  budget.closed_form_bound = static_cast<double>(r) * static_cast<double>(m) * (1.0 + ratio / (1.0 - ratio) / params.c);
  budget.transmission_bits = r * ipow(b, decoder_level(m, params)) * instances;
  return budget;
}

inline DelayBudget delay_budget(std::uint64_t m, std::uint64_t k, const MultiLevelCode& code) {
  require(m >= 1, "m must be >= 1");
  const MultiBitSchedule schedule = make_multibit_schedule(m, k, code);
  DelayBudget budget;
  budget.hop_wait = m - 1;
  std::uint64_t span = 1;
  for (int l = 1; l <= code.max_level(); ++l) {
    span *= static_cast<std::uint64_t>(code.params().t(l));
    if (m < 1 || span > m - 1) break;
    budget.higher_level_wait += ((m - 1) / span) * code.n(l);
  }
  const auto r = static_cast<std::uint64_t>(code.params().r);
  budget.propagation_bound = r * (budget.hop_wait + budget.higher_level_wait);
  budget.transmission_bits = r * schedule.plan.stream_bits;
  return budget;
}

// Union bound over the level-L spans of the chain.
inline double onebit_end_to_end_bound(std::uint64_t m, double p, const OneBitParams& params) {
  params.validate();
  const int levels = decoder_level(m, params);
  const BoundTable table = onebit_error_recursion(effective_crossover(p, params.r), params.b, params.t, levels, params.c);
  std::uint64_t spans = m;
  if (levels > 0) {
    const std::uint64_t span = static_cast<std::uint64_t>(params.c) * ipow(static_cast<std::uint64_t>(params.t), levels);
    spans = (m + span - 1) / span;
  }
  return std::min(1.0, static_cast<double>(spans) * table.eps.back());
}

struct MultiBitBound {
  int case_id = 1;
  double value = 0.0;
  BoundTable table;
};

// Case 1: t_{L'+1} b_{L'+1} eps_{L'}. Case 2: blocks * spans * eps_L.
inline MultiBitBound multibit_end_to_end_bound(std::uint64_t m, std::uint64_t k, double p, const MultiLevelCode& code) {
  const MultiBitSchedule schedule = make_multibit_schedule(m, k, code);
  const MessagePlan& plan = schedule.plan;
  const auto& params = code.params();
  MultiBitBound bound;
  bound.case_id = plan.case_id;
  bound.table = multibit_error_recursion(effective_crossover(p, params.r), params, plan.decode_level);
  const double eps = bound.table.eps.back();
  if (plan.case_id == 1) {
    const int next = plan.relay_max_level + 1;
    require(next <= params.max_level(), "need one configured level above L'");
    bound.value = static_cast<double>(params.t(next)) * params.b(next) * eps;
  } else {
    std::uint64_t span = 1;
    for (int l = 1; l <= plan.decode_level; ++l) span *= static_cast<std::uint64_t>(params.t(l));
    const std::uint64_t spans = (m + span - 1) / span;
    bound.value = static_cast<double>(plan.blocks) * static_cast<double>(spans) * eps;
  }
  bound.value = std::min(1.0, bound.value);
  return bound;
}

struct LowNoiseT1 {
  int t1 = 9;
  double eps1 = 0.0;
  double relay_fraction = 0.0;  // fraction of nodes above level 0, = 1 / t1
  double fraction_over_p = 0.0;
};

// Largest t_1 >= 9 keeping the level-1 bound at or below 3^-8 / 4, with b_1
// and all higher levels unchanged.
inline LowNoiseT1 low_noise_t1(double p, MultiBitParams params = MultiBitParams::defaults()) {
  const double threshold = kThreeToMinusEight / 4.0;
  require(p > 0.0 && p < threshold, "low-noise t_1 needs 0 < p < 3^-8/4");
  params.validate();
  const auto b1 = static_cast<std::uint64_t>(params.b(1));
  const double blocks = static_cast<double>(b1 + static_cast<std::uint64_t>(redundancy_count(b1)));
  const double lead = blocks * (blocks - 1.0) / 2.0;
  const auto eps1_at = [&](double t) { return lead * (t * p) * (t * p); };
  double t = std::floor(std::sqrt(threshold / lead) / p);
  while (t > 9 && eps1_at(t) > threshold) t -= 1;
  while (eps1_at(t + 1) <= threshold) t += 1;
  require(t >= 9 && eps1_at(9) <= threshold, "no feasible t_1 >= 9");
  LowNoiseT1 out;
  out.t1 = static_cast<int>(t);
  out.eps1 = eps1_at(t);
  out.relay_fraction = 1.0 / t;
  out.fraction_over_p = out.relay_fraction / p;
  return out;
}

// F(i, j): F(i, 0) = 1, F(0, j) = 0 for j >= 1,
// F(i, j) = F(i-1, j) + delta^2 (F(i-1, j-1) - F(i-1, j)).
class ConverseTable {
 public:
  ConverseTable(double delta, std::size_t i_max, std::size_t j_max)
      : delta_(delta), i_max_(i_max), j_max_(j_max), f_((i_max + 1) * (j_max + 1), 0.0) {
    require(delta > 0.0 && delta < 1.0, "delta must lie in (0, 1)");
    const double d2 = delta * delta;
    for (std::size_t i = 0; i <= i_max; ++i) at(i, 0) = 1.0;
    for (std::size_t i = 1; i <= i_max; ++i) {
      for (std::size_t j = 1; j <= j_max; ++j) {
        at(i, j) = at(i - 1, j) + d2 * (at(i - 1, j - 1) - at(i - 1, j));
      }
    }
  }

  double operator()(std::size_t i, std::size_t j) const { return f_.at(i * (j_max_ + 1) + j); }
  double delta() const noexcept { return delta_; }
  std::size_t i_max() const noexcept { return i_max_; }
  std::size_t j_max() const noexcept { return j_max_; }

 private:
  double& at(std::size_t i, std::size_t j) { return f_[i * (j_max_ + 1) + j]; }

  double delta_;
  std::size_t i_max_;
  std::size_t j_max_;
  std::vector<double> f_;
};

inline ConverseTable converse_table(double delta, std::size_t i_max, std::size_t j_max) {
  return ConverseTable(delta, i_max, j_max);
}

// e^{c gamma} - 1 - delta^2 (e^c - 1); non-negative iff c is admissible.
inline double envelope_residual(double c, double gamma, double delta) {
  return std::expm1(c * gamma) - delta * delta * std::expm1(c);
}

// Largest admissible c, by bisection on [0, hi]. The bracket starts at hi = 1
// and doubles until the residual turns negative; the returned end is always on
// the admissible side.
inline double find_envelope_c(double gamma, double delta) {
  require(delta > 0.0 && delta < 1.0, "delta must lie in (0, 1)");
  require(gamma > delta * delta, "gamma must exceed delta^2");
  require(gamma < 1.0, "gamma must be below 1");
  double lo = 0.0;
  double hi = 1.0;
  while (envelope_residual(hi, gamma, delta) >= 0.0) {
    lo = hi;
    hi *= 2.0;
    ensure(hi < 1e6, "envelope bracket did not close");
  }
  for (int iter = 0; iter < 200 && hi - lo > 1e-15 * hi; ++iter) {
    const double mid = 0.5 * (lo + hi);
    if (envelope_residual(mid, gamma, delta) >= 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  ensure(lo > 0.0, "envelope constant collapsed to zero");
  return lo;
}

struct ConverseParams {
  double delta = 0.5;
  double gamma = 0.3;
  double c_exp = 0.0;
  double v0 = 0.35;

  void validate() const {
    require(delta > 0.0 && delta < 1.0, "delta must lie in (0, 1)");
    require(delta * delta < gamma && gamma < v0, "need delta^2 < gamma < v0");
    require(c_exp > 0.0, "c must be positive");
    require(envelope_residual(c_exp, gamma, delta) >= -1e-12, "c violates e^{c gamma} >= 1 + delta^2 (e^c - 1)");
  }
};

struct EnvelopeReport {
  bool envelope_holds = true;
  double worst_residual = -1.0;  // max over the grid of F - envelope
  std::size_t probe_j = 0;
  double probe_value = 1.0;      // F(i_max, floor(v0 * i_max))
  bool probe_decayed = false;

  bool ok() const noexcept { return envelope_holds && probe_decayed; }
};

inline double envelope(double c, double gamma, std::size_t i, std::size_t j) {
  return std::exp(c * (gamma * static_cast<double>(i) - static_cast<double>(j)));
}

inline constexpr double kEnvelopeTolerance = 1e-12;

inline std::size_t probe_column(double v0, std::size_t i) {
  return static_cast<std::size_t>(std::floor(v0 * static_cast<double>(i) + 1e-12));
}

inline EnvelopeReport verify_envelope(const ConverseTable& table, const ConverseParams& params,
                                      double probe_threshold = 1e-6) {
  params.validate();
  require(std::abs(table.delta() - params.delta) < 1e-15, "table and parameters use different delta");
  EnvelopeReport report;
  for (std::size_t i = 0; i <= table.i_max(); ++i) {
    for (std::size_t j = 0; j <= table.j_max(); ++j) {
      const double residual = table(i, j) - envelope(params.c_exp, params.gamma, i, j);
      report.worst_residual = std::max(report.worst_residual, residual);
      if (residual > kEnvelopeTolerance) report.envelope_holds = false;
    }
  }
  report.probe_j = probe_column(params.v0, table.i_max());
  require(report.probe_j <= table.j_max(), "table too narrow for the v0 probe");
  report.probe_value = table(table.i_max(), report.probe_j);
  report.probe_decayed = report.probe_value < probe_threshold;
  return report;
}

}  // namespace infovel
