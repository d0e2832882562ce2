#include "cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cerrno>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "infovel/infovel.hpp"

namespace infovel::cli {
namespace {

constexpr const char* kVersion = "0.1.0";

using Cell = std::variant<std::string, std::uint64_t, std::int64_t, double, bool>;

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
  std::vector<std::pair<std::string, Cell>> metadata;
};

std::string format_double(double value) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

std::string format_cell(const Cell& cell) {
  struct Visitor {
    std::string operator()(const std::string& s) const { return s; }
    std::string operator()(std::uint64_t v) const { return std::to_string(v); }
    std::string operator()(std::int64_t v) const { return std::to_string(v); }
    std::string operator()(double v) const { return format_double(v); }
    std::string operator()(bool v) const { return v ? "true" : "false"; }
  };
  return std::visit(Visitor{}, cell);
}

nlohmann::ordered_json to_json(const Cell& cell) {
  return std::visit([](const auto& v) { return nlohmann::ordered_json(v); }, cell);
}

struct Options {
  std::string protocol = "onebit";
  std::string m = "64";
  std::uint64_t k = 1;
  std::string p = "1/48";
  std::optional<int> b;
  std::optional<int> t;
  std::string c = "1";
  std::string reps = "1";
  double alpha = ChainParams{}.alpha;
  std::uint64_t trials = 1000;
  std::uint64_t seed = 1;
  unsigned jobs = 1;
  std::string out;
  std::string format = "csv";
  int levels = 6;
  double delta = 0.5;
  double gamma = 0.3;
  double v0 = 0.35;
  std::size_t imax = 500;
  std::size_t jmax = 200;
  std::string target = "1/48";
  bool audit = false;
  std::string kind;
};

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> items;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    const auto first = item.find_first_not_of(" \t");
    const auto last = item.find_last_not_of(" \t");
    require(first != std::string::npos, "empty entry in list: '" + text + "'");
    items.push_back(item.substr(first, last - first + 1));
  }
  require(!items.empty(), "empty list");
  return items;
}

std::uint64_t parse_uint(const std::string& text) {
  require(!text.empty() && text.find_first_not_of("0123456789") == std::string::npos,
          "not a non-negative integer: '" + text + "'");
  errno = 0;
  const auto value = std::strtoull(text.c_str(), nullptr, 10);
  require(errno == 0, "integer out of range: '" + text + "'");
  return value;
}

int parse_int(const std::string& text) {
  const std::uint64_t v = parse_uint(text);
  require(v <= 1'000'000'000ULL, "integer too large: '" + text + "'");
  return static_cast<int>(v);
}

double parse_real(const std::string& text) {
  char* end = nullptr;
  const double value = std::strtod(text.c_str(), &end);
  require(!text.empty() && end == text.c_str() + text.size() && std::isfinite(value),
          "not a number: '" + text + "'");
  return value;
}

template <class T, class F>
std::vector<T> parse_list(const std::string& text, F parse) {
  std::vector<T> out;
  for (const auto& item : split_list(text)) out.push_back(parse(item));
  return out;
}

template <class T>
T single(const std::vector<T>& values, const char* flag) {
  require(values.size() == 1, std::string("--") + flag + " takes a single value here; use sweep for grids");
  return values.front();
}

std::string effective_config(const Options& o, const std::string& command) {
  std::ostringstream s;
  s << "command=" << command;
  if (!o.kind.empty()) s << ";kind=" << o.kind;
  s << ";protocol=" << o.protocol << ";m=" << o.m << ";k=" << o.k << ";p=" << o.p
    << ";b=" << (o.b ? std::to_string(*o.b) : "default") << ";t=" << (o.t ? std::to_string(*o.t) : "default")
    << ";c=" << o.c << ";reps=" << o.reps << ";alpha=" << format_double(o.alpha) << ";trials=" << o.trials
    << ";levels=" << o.levels << ";delta=" << format_double(o.delta)
    << ";gamma=" << format_double(o.gamma) << ";v0=" << format_double(o.v0) << ";imax=" << o.imax
    << ";jmax=" << o.jmax << ";target=" << o.target << ";audit=" << (o.audit ? "true" : "false");
  return s.str();
}

OneBitParams onebit_params(const Options& o, int reps, int c) {
  OneBitParams params;
  if (o.b) params.b = *o.b;
  if (o.t) params.t = *o.t;
  params.c = c;
  params.r = reps;
  return params;
}

MultiBitParams multibit_params(const Options& o, int reps) {
  MultiBitParams params = MultiBitParams::defaults();
  if (o.b) params.b_seq[0] = *o.b;
  if (o.t) params.t_seq[0] = *o.t;
  params.r = reps;
  return params;
}

SimConfig base_config(const Options& o, std::uint64_t m, double p, int reps, int c) {
  SimConfig config;
  config.protocol = parse_protocol(o.protocol);
  config.m = m;
  config.k = o.k;
  config.p = p;
  config.onebit = onebit_params(o, reps, c);
  config.chain.alpha = o.alpha;
  config.multibit = multibit_params(o, reps);
  config.trials = o.trials;
  config.master_seed = o.seed;
  config.jobs = o.jobs;
  config.audit = o.audit;
  return config;
}

int effective_reps(const SimConfig& config) {
  switch (config.protocol) {
    case Protocol::multibit: return config.multibit.r;
    case Protocol::p0: return config.baseline ? config.baseline->reps_per_hop : p0_params(config.m, config.p).reps_per_hop;
    case Protocol::p1: return p1_layout(config.m, config.p).reps_per_hop;
    default: return config.onebit.r;
  }
}

const std::vector<std::string> kRunColumns = {
    "protocol", "m", "k", "p", "b", "t", "c", "reps", "alpha", "trials", "errors", "error_rate", "ci_low",
    "ci_high", "transmission_delay", "propagation_delay", "n_total", "ratio_m_over_n", "seed"};

std::vector<Cell> run_row(const RunSummary& s) {
  const SimConfig& c = s.config;
  const bool multi = c.protocol == Protocol::multibit;
  const auto b = static_cast<std::int64_t>(multi ? c.multibit.b(1) : c.onebit.b);
  const auto t = static_cast<std::int64_t>(multi ? c.multibit.t(1) : c.onebit.t);
  return {std::string(to_string(c.protocol)),
          c.m,
          c.k,
          c.p,
          b,
          t,
          static_cast<std::int64_t>(c.onebit.c),
          static_cast<std::int64_t>(effective_reps(c)),
          c.chain.alpha,
          c.trials,
          s.estimate.errors,
          s.estimate.rate,
          s.estimate.ci_low,
          s.estimate.ci_high,
          s.transmission.max,
          s.propagation.max,
          s.n_total.max,
          static_cast<double>(c.m) / static_cast<double>(s.n_total.max),
          c.master_seed};
}

Table cmd_simulate(const Options& o) {
  const auto m = single(parse_list<std::uint64_t>(o.m, parse_uint), "m");
  const auto p = single(parse_list<double>(o.p, parse_probability), "p");
  const auto reps = single(parse_list<int>(o.reps, parse_int), "reps");
  const auto c = single(parse_list<int>(o.c, parse_int), "c");
  Table table;
  table.columns = kRunColumns;
  table.rows.push_back(run_row(run_trials(base_config(o, m, p, reps, c))));
  return table;
}

Table cmd_sweep(const Options& o) {
  SweepGrid grid;
  grid.m = parse_list<std::uint64_t>(o.m, parse_uint);
  grid.p = parse_list<double>(o.p, parse_probability);
  grid.reps = parse_list<int>(o.reps, parse_int);
  grid.c = parse_list<int>(o.c, parse_int);
  const SimConfig base = base_config(o, grid.m.front(), grid.p.front(), grid.reps.front(), grid.c.front());
  Table table;
  table.columns = kRunColumns;
  for (const SweepRow& row : sweep(base, grid)) table.rows.push_back(run_row(row.summary));
  return table;
}

Table analyze_recursion(const Options& o) {
  const double p = single(parse_list<double>(o.p, parse_probability), "p");
  const int reps = single(parse_list<int>(o.reps, parse_int), "reps");
  const int c = single(parse_list<int>(o.c, parse_int), "c");
  require(o.levels >= 0, "--levels must be >= 0");
  const double eps0 = effective_crossover(CrossoverProb(p).value(), reps);
  BoundTable bounds;
  if (o.protocol == "multibit") {
    bounds = multibit_error_recursion(eps0, multibit_params(o, reps), o.levels);
  } else {
    require(o.protocol == "onebit", "recursion supports --protocol onebit or multibit");
    const OneBitParams params = onebit_params(o, reps, c);
    params.validate();
    bounds = onebit_error_recursion(eps0, params.b, params.t, o.levels, params.c);
  }
  Table table;
  table.columns = {"level", "epsilon_bound", "epsilon_bound_simplified"};
  for (std::size_t l = 0; l < bounds.eps.size(); ++l) {
    table.rows.push_back({static_cast<std::uint64_t>(l), bounds.eps[l], bounds.eps_simplified[l]});
  }
  return table;
}

Table analyze_velocity(const Options& o) {
  Table table;
  table.columns = {"p", "lower", "upper", "lower_annotation"};
  for (double p : parse_list<double>(o.p, parse_probability)) {
    const VelocityBounds v = velocity_bounds(p);
    table.rows.push_back({p, v.lower, v.upper, v.lower_annotation});
  }
  return table;
}

Table analyze_converse(const Options& o) {
  ConverseParams params;
  params.delta = o.delta;
  params.gamma = o.gamma;
  params.v0 = o.v0;
  params.c_exp = find_envelope_c(o.gamma, o.delta);
  const ConverseTable f = converse_table(o.delta, o.imax, o.jmax);
  const EnvelopeReport report = verify_envelope(f, params);
  Table table;
  table.columns = {"i", "j", "F", "envelope", "within_envelope"};
  for (std::size_t i = 0; i <= f.i_max(); ++i) {
    for (std::size_t j = 0; j <= f.j_max(); ++j) {
      const double env = envelope(params.c_exp, params.gamma, i, j);
      table.rows.push_back({static_cast<std::uint64_t>(i), static_cast<std::uint64_t>(j), f(i, j), env,
                            f(i, j) - env <= kEnvelopeTolerance});
    }
  }
  table.metadata = {{"envelope_ok", report.ok()},
                    {"c", params.c_exp},
                    {"worst_residual", report.worst_residual},
                    {"probe_value", report.probe_value}};
  return table;
}

Table analyze_repetition(const Options& o) {
  const double target = parse_probability(o.target);
  Table table;
  table.columns = {"p", "target", "hoeffding_n", "exact_n", "exact_tail"};
  for (double p : parse_list<double>(o.p, parse_probability)) {
    const RepetitionReport r = repetition_count(p, target);
    table.rows.push_back({p, target, static_cast<std::int64_t>(r.hoeffding), static_cast<std::int64_t>(r.exact),
                          r.exact_tail});
  }
  return table;
}

Table analyze_delay(const Options& o) {
  const int reps = single(parse_list<int>(o.reps, parse_int), "reps");
  const int c = single(parse_list<int>(o.c, parse_int), "c");
  Table table;
  table.columns = {"m", "hop_wait", "higher_level_wait", "propagation_bound", "transmission_bits", "total_bound"};
  for (std::uint64_t m : parse_list<std::uint64_t>(o.m, parse_uint)) {
    DelayBudget budget;
    if (o.protocol == "multibit") {
      budget = delay_budget(m, o.k, MultiLevelCode(multibit_params(o, reps)));
    } else {
      require(o.protocol == "onebit", "delay supports --protocol onebit or multibit");
      budget = delay_budget(m, onebit_params(o, reps, c));
    }
    table.rows.push_back({m, budget.hop_wait, budget.higher_level_wait, budget.propagation_bound,
                          budget.transmission_bits, budget.total_bound()});
  }
  return table;
}

void write_table(const Table& table, const Options& o, const std::string& command, std::ostream& out) {
  const std::string config = effective_config(o, command);
  if (o.format == "json") {
    nlohmann::ordered_json doc;
    doc["metadata"]["version"] = kVersion;
    doc["metadata"]["seed"] = o.seed;
    doc["metadata"]["config"] = config;
    for (const auto& [key, value] : table.metadata) doc["metadata"][key] = to_json(value);
    doc["columns"] = table.columns;
    doc["rows"] = nlohmann::ordered_json::array();
    for (const auto& row : table.rows) {
      nlohmann::ordered_json obj;
      for (std::size_t i = 0; i < row.size(); ++i) obj[table.columns[i]] = to_json(row[i]);
      doc["rows"].push_back(std::move(obj));
    }
    out << doc.dump(2) << '\n';
    return;
  }
  out << "# version=" << kVersion << ", seed=" << o.seed << ", config=" << config;
  for (const auto& [key, value] : table.metadata) out << ", " << key << '=' << format_cell(value);
  out << '\n';
  for (std::size_t i = 0; i < table.columns.size(); ++i) out << (i ? "," : "") << table.columns[i];
  out << '\n';
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << format_cell(row[i]);
    out << '\n';
  }
}

}  // namespace

double parse_probability(const std::string& text) {
  const auto slash = text.find('/');
  if (slash == std::string::npos) return parse_real(text);
  const double num = parse_real(text.substr(0, slash));
  const double den = parse_real(text.substr(slash + 1));
  require(den != 0.0, "zero denominator in '" + text + "'");
  return num / den;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"Relay protocols over chains of binary symmetric channels", "infovel"};
  app.set_version_flag("--version", kVersion);
  app.set_config("--config", "", "TOML/INI file whose keys mirror the flags; flags win");
  app.fallthrough();
  app.require_subcommand(1);

  app.add_option("--protocol", o.protocol, "onebit | onebit_chained | multibit | p0 | p1")
      ->check(CLI::IsMember({"onebit", "onebit_chained", "multibit", "p0", "p1"}));
  app.add_option("--m", o.m, "hops; comma list for sweep/delay");
  app.add_option("--k", o.k, "message bits (multibit)");
  app.add_option("--p", o.p, "crossover probability, decimal or fraction; comma list allowed");
  app.add_option("--b", o.b, "majority arity (one-bit) or b_1 (multibit)");
  app.add_option("--t", o.t, "level spacing (one-bit) or t_1 (multibit)");
  app.add_option("--c", o.c, "level-0 spacing multiplier; comma list for sweep");
  app.add_option("--reps", o.reps, "per-link repetitions (odd); comma list for sweep");
  app.add_option("--alpha", o.alpha, "instance exponent for onebit_chained");
  app.add_option("--trials", o.trials, "Monte Carlo trials");
  app.add_option("--seed", o.seed, "master seed");
  app.add_option("--jobs", o.jobs, "worker threads");
  app.add_option("--out", o.out, "write output here instead of stdout");
  app.add_option("--format", o.format, "csv | json")->check(CLI::IsMember({"csv", "json"}));
  app.add_option("--levels", o.levels, "recursion depth");
  app.add_option("--delta", o.delta, "converse: 1 - 2p");
  app.add_option("--gamma", o.gamma, "converse: envelope slope");
  app.add_option("--v0", o.v0, "converse: probe velocity");
  app.add_option("--imax", o.imax, "converse: last time step");
  app.add_option("--jmax", o.jmax, "converse: last node");
  app.add_option("--target", o.target, "repetition: target error");
  app.add_flag("--audit", o.audit, "audit causality inside the engine");

  auto* simulate = app.add_subcommand("simulate", "run Monte Carlo trials for one configuration");
  auto* sweep_cmd = app.add_subcommand("sweep", "run a grid over m, p, reps and c");
  auto* analyze = app.add_subcommand("analyze", "print analytical tables");
  analyze->add_option("kind", o.kind, "recursion | velocity | converse | repetition | delay")
      ->required()
      ->check(CLI::IsMember({"recursion", "velocity", "converse", "repetition", "delay"}));

  std::vector<const char*> argv;
  argv.reserve(args.size());
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      out << (e.get_name() == "CallForVersion" ? std::string(kVersion) + "\n" : app.help());
      return kExitOk;
    }
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  }

  try {
    std::string command;
    Table table;
    if (*simulate) {
      command = "simulate";
      table = cmd_simulate(o);
    } else if (*sweep_cmd) {
      command = "sweep";
      table = cmd_sweep(o);
    } else {
      command = "analyze";
      if (o.kind == "recursion") table = analyze_recursion(o);
      else if (o.kind == "velocity") table = analyze_velocity(o);
      else if (o.kind == "converse") table = analyze_converse(o);
      else if (o.kind == "repetition") table = analyze_repetition(o);
      else table = analyze_delay(o);
    }
    if (o.out.empty()) {
      write_table(table, o, command, out);
    } else {
      std::ofstream file(o.out, std::ios::binary);
      require(static_cast<bool>(file), "cannot open output file: " + o.out);
      write_table(table, o, command, file);
      require(static_cast<bool>(file), "failed writing output file: " + o.out);
    }
    return kExitOk;
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << '\n';
    return kExitInternal;
  }
}

}  // namespace infovel::cli
