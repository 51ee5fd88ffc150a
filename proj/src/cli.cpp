#include "specmarkov/cli.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <future>
#include <limits>
#include <sstream>

#include "specmarkov/combinatorics.hpp"
#include "specmarkov/errors.hpp"

namespace specmarkov::cli {

namespace {

const std::vector<std::string> kMetrics{"theta", "pr_collision", "ds", "q"};
const std::vector<std::string> kSweepKeys{"M", "N", "c", "h", "p", "s", "v", "Ts"};

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    parts.push_back(trim(s.substr(start, pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return parts;
}

[[noreturn]] void bad_value(std::string_view key, std::string_view value,
                            std::string_view expected) {
  std::ostringstream msg;
  msg << "invalid value '" << value << "' for " << key << ": expected "
      << expected;
  throw ValidationError(msg.str());
}

template <typename T>
T parse_number(std::string_view key, std::string_view value,
               std::string_view expected) {
  T result{};
  const auto* end = value.data() + value.size();
  const auto [ptr, ec] = std::from_chars(value.data(), end, result);
  if (value.empty() || ec != std::errc{} || ptr != end) {
    bad_value(key, value, expected);
  }
  return result;
}

double parse_real(std::string_view key, std::string_view value, double lo,
                  double hi, bool lo_open, std::string_view range) {
  const double x = parse_number<double>(key, value, std::string("a number in ") + std::string(range));
  if (!std::isfinite(x) || x > hi || x < lo || (lo_open && x == lo)) {
    std::ostringstream msg;
    msg << key << " = " << value << " is out of range " << range;
    throw ValidationError(msg.str());
  }
  return x;
}

long parse_int(std::string_view key, std::string_view value, long lo, long hi,
               std::string_view range) {
  const long x = parse_number<long>(key, value, std::string("an integer in ") + std::string(range));
  if (x < lo || x > hi) {
    std::ostringstream msg;
    msg << key << " = " << value << " is out of range " << range;
    throw ValidationError(msg.str());
  }
  return x;
}

bool parse_bool(std::string_view key, std::string_view value) {
  if (value == "true" || value == "1") return true;
  if (value == "false" || value == "0") return false;
  bad_value(key, value, "true or false");
}

constexpr long kIntMax = std::numeric_limits<int>::max();

struct Builder {
  RunSpec spec;
  bool ts_set = false;

  void apply(std::string_view key, std::string_view value) {
    ModelParams& m = spec.sim.params;
    if (key == "M") {
      m.channels = static_cast<int>(parse_int(key, value, 1, kIntMax, "[1, inf)"));
    } else if (key == "N") {
      m.pairs = static_cast<int>(parse_int(key, value, 1, kIntMax, "[1, inf)"));
    } else if (key == "c") {
      m.slots_per_frame = static_cast<int>(parse_int(key, value, 1, kIntMax, "[1, inf)"));
    } else if (key == "h") {
      m.frames_per_packet = static_cast<int>(parse_int(key, value, 1, kIntMax, "[1, inf)"));
    } else if (key == "p") {
      m.pu_arrival = parse_real(key, value, 0.0, 1.0, false, "[0, 1]");
    } else if (key == "s") {
      m.su_arrival = parse_real(key, value, 0.0, 1.0, false, "[0, 1]");
    } else if (key == "v") {
      m.pu_completion = parse_real(key, value, 0.0, 1.0, true, "(0, 1]");
    } else if (key == "Ts") {
      m.sensing_delay = static_cast<int>(parse_int(key, value, 1, kIntMax, "[1, c]"));
      ts_set = true;
    } else if (key == "scheme") {
      m.scheme = parse_scheme(value);
    } else if (key == "slots") {
      spec.sim.slots = parse_int(key, value, 1, std::numeric_limits<long>::max(), "[1, inf)");
    } else if (key == "warmup") {
      spec.sim.warmup = parse_int(key, value, 0, std::numeric_limits<long>::max(), "[0, slots)");
    } else if (key == "seed") {
      spec.sim.seed = parse_number<std::uint64_t>(key, value, "an unsigned 64-bit integer");
    } else if (key == "exclude_su_occupied") {
      spec.sim.exclude_su_occupied = parse_bool(key, value);
    } else if (key == "saturated") {
      spec.sim.saturated = parse_bool(key, value);
    } else if (key == "sweep") {
      apply_sweep(value);
    } else if (key == "tolerance") {
      spec.tolerance = parse_real(key, value, 0.0, std::numeric_limits<double>::max(), false, "[0, inf)");
    } else if (key == "validate_metrics") {
      apply_metrics(value);
    } else if (key == "oracle_max") {
      spec.oracle_max = static_cast<int>(parse_int(key, value, 1, 8, "[1, 8]"));
    } else if (key == "trace") {
      spec.trace = std::string(value);
    } else {
      std::ostringstream msg;
      msg << "unknown key '" << key << "'; valid keys:";
      for (const auto& k : valid_keys()) msg << ' ' << k;
      throw ValidationError(msg.str());
    }
  }

  void apply_sweep(std::string_view value) {
    const auto colon = value.find(':');
    if (colon == std::string_view::npos) {
      bad_value("sweep", value, "key:v1,v2,...");
    }
    SweepAxis axis;
    axis.key = std::string(trim(value.substr(0, colon)));
    if (std::find(kSweepKeys.begin(), kSweepKeys.end(), axis.key) == kSweepKeys.end()) {
      bad_value("sweep", value, "one of M, N, c, h, p, s, v, Ts before ':'");
    }
    for (auto part : split(value.substr(colon + 1), ',')) {
      axis.values.push_back(parse_number<double>("sweep", part, "a comma-separated list of numbers"));
    }
    spec.sweep = std::move(axis);
  }

  void apply_metrics(std::string_view value) {
    std::vector<std::string> metrics;
    for (auto part : split(value, ',')) {
      if (part.empty()) continue;
      if (std::find(kMetrics.begin(), kMetrics.end(), part) == kMetrics.end()) {
        bad_value("validate_metrics", value, "a comma-separated subset of theta, pr_collision, ds, q");
      }
      metrics.emplace_back(part);
    }
    spec.validate_metrics = std::move(metrics);
  }

  void finish() {
    if (!ts_set) spec.sim.params.sensing_delay = spec.sim.params.slots_per_frame;
    spec.sim.validate();
  }
};

Builder build(Command command, const std::vector<Setting>& settings) {
  Builder b;
  b.spec.command = command;
  for (const auto& [key, value] : settings) b.apply(key, value);
  b.finish();
  return b;
}

const char* kAnalyticHeader = "M,N,c,h,p,s,v,Ts,scheme,u,q,theta,pr_collision,ds";
const char* kSimHeader = "slots,warmup,seed,theta_sim,pr_collision_sim,ds_sim,q_hat";

std::string analytic_row(const ModelParams& m, const AnalyticResult& a) {
  std::ostringstream row;
  row << m.channels << ',' << m.pairs << ',' << m.slots_per_frame << ','
      << m.frames_per_packet << ',' << format_number(m.pu_arrival) << ','
      << format_number(m.su_arrival) << ',' << format_number(m.pu_completion)
      << ',' << m.sensing_delay << ',' << to_string(m.scheme) << ','
      << format_number(a.u) << ',' << format_number(a.q) << ','
      << format_number(a.metrics.theta) << ','
      << format_number(a.metrics.pr_collision) << ','
      << format_number(a.metrics.ds);
  return row.str();
}

std::string sim_row(const sim::SimConfig& config, const sim::SimResult& r) {
  std::ostringstream row;
  row << config.slots << ',' << config.warmup << ',' << config.seed << ','
      << format_number(r.theta) << ',' << format_number(r.pr_collision) << ','
      << format_number(r.ds) << ',' << format_number(r.q_hat);
  return row.str();
}

struct PointResult {
  AnalyticResult analytic;
  sim::SimResult sim;
};

std::vector<PointResult> run_points(const std::vector<sim::SimConfig>& points) {
  std::vector<std::future<PointResult>> futures;
  futures.reserve(points.size());
  for (const auto& config : points) {
    futures.push_back(std::async(std::launch::async, [&config] {
      return PointResult{analyze(config.params), sim::run(config)};
    }));
  }
  std::vector<PointResult> results;
  results.reserve(points.size());
  for (auto& f : futures) results.push_back(f.get());
  return results;
}

/// |sim - analytic| / |analytic|; the absolute difference when the analytic
/// value is 0, 0 when both are infinite.
double relative_difference(double analytic, double simulated) {
  if (std::isinf(analytic) && std::isinf(simulated)) return 0.0;
  if (std::isnan(analytic) || std::isnan(simulated)) {
    return std::numeric_limits<double>::quiet_NaN();
  }
  if (std::isinf(analytic) || std::isinf(simulated)) {
    return std::numeric_limits<double>::infinity();
  }
  const double diff = std::abs(simulated - analytic);
  return analytic == 0.0 ? diff : diff / std::abs(analytic);
}

int run_analytic(const RunSpec& spec, std::ostream& out) {
  out << kAnalyticHeader << '\n';
  std::vector<std::future<AnalyticResult>> futures;
  for (const auto& config : spec.points) {
    futures.push_back(std::async(std::launch::async,
                                 [&config] { return analyze(config.params); }));
  }
  for (std::size_t i = 0; i < futures.size(); ++i) {
    out << analytic_row(spec.points[i].params, futures[i].get()) << '\n';
  }
  return 0;
}

int run_simulate(const RunSpec& spec, std::ostream& out) {
  std::vector<PointResult> results;
  if (!spec.trace.empty() && spec.points.size() == 1) {
    std::ofstream trace(spec.trace);
    if (!trace) throw ValidationError("cannot open trace file " + spec.trace);
    const auto& config = spec.points.front();
    results.push_back({analyze(config.params), sim::run(config, trace)});
  } else {
    results = run_points(spec.points);
  }
  out << kAnalyticHeader << ',' << kSimHeader << '\n';
  for (std::size_t i = 0; i < results.size(); ++i) {
    out << analytic_row(spec.points[i].params, results[i].analytic) << ','
        << sim_row(spec.points[i], results[i].sim) << '\n';
  }
  return 0;
}

int run_validate(const RunSpec& spec, std::ostream& out, std::ostream& err) {
  const auto results = run_points(spec.points);
  out << "point," << kAnalyticHeader << ',' << kSimHeader
      << ",rel_theta,rel_pr_collision,rel_ds,rel_q\n";
  std::array<double, 4> worst{0.0, 0.0, 0.0, 0.0};
  bool failed = false;
  for (std::size_t i = 0; i < results.size(); ++i) {
    const auto& a = results[i].analytic;
    const auto& s = results[i].sim;
    const std::array<double, 4> rel{
        relative_difference(a.metrics.theta, s.theta),
        relative_difference(a.metrics.pr_collision, s.pr_collision),
        relative_difference(a.metrics.ds, s.ds),
        relative_difference(a.q, s.q_hat)};
    out << i << ',' << analytic_row(spec.points[i].params, a) << ','
        << sim_row(spec.points[i], s);
    for (std::size_t k = 0; k < rel.size(); ++k) {
      out << ',' << format_number(rel[k]);
      const bool gated = std::find(spec.validate_metrics.begin(),
                                   spec.validate_metrics.end(),
                                   kMetrics[k]) != spec.validate_metrics.end();
      if (std::isnan(rel[k]) || rel[k] > worst[k]) worst[k] = rel[k];
      if (gated && !(rel[k] <= spec.tolerance)) {
        failed = true;
        err << "point " << i << ": " << kMetrics[k] << " differs by "
            << format_number(rel[k]) << " > tolerance "
            << format_number(spec.tolerance) << '\n';
      }
    }
    out << '\n';
  }
  out << "max";
  // 14 analytic + 7 simulation columns left blank on the summary row.
  for (int k = 0; k < 21; ++k) out << ',';
  for (double w : worst) out << ',' << format_number(w);
  out << '\n';
  return failed ? 1 : 0;
}

int run_oracle(const RunSpec& spec, std::ostream& out, std::ostream& err) {
  out << "n1,theta,d,s_count,s_count_oracle\n";
  long cases = 0;
  long mismatches = 0;
  for (int n1 = 1; n1 <= spec.oracle_max; ++n1) {
    for (int theta = 1; theta <= spec.oracle_max; ++theta) {
      for (int d = 0; d <= n1; ++d) {
        ++cases;
        const auto fast = static_cast<long long>(s_count(n1, theta, d));
        const long slow = s_count_oracle(n1, theta, d);
        if (fast != slow) {
          ++mismatches;
          out << n1 << ',' << theta << ',' << d << ',' << fast << ',' << slow
              << '\n';
        }
      }
    }
  }
  err << cases << " cases, " << mismatches << " mismatches\n";
  return mismatches == 0 ? 0 : 1;
}

} // namespace

Command parse_command(std::string_view name) {
  if (name == "analytic") return Command::analytic;
  if (name == "simulate") return Command::simulate;
  if (name == "sweep") return Command::sweep;
  if (name == "validate") return Command::validate;
  if (name == "oracle") return Command::oracle;
  throw ValidationError("unknown command '" + std::string(name) +
                        "'; expected analytic, simulate, sweep, validate or oracle");
}

std::string_view to_string(Command command) {
  switch (command) {
    case Command::analytic: return "analytic";
    case Command::simulate: return "simulate";
    case Command::sweep: return "sweep";
    case Command::validate: return "validate";
    case Command::oracle: return "oracle";
  }
  return "?";
}

const std::vector<std::string>& valid_keys() {
  static const std::vector<std::string> keys{
      "M",     "N",      "c",    "h",         "p",
      "s",     "v",      "Ts",   "scheme",    "slots",
      "warmup", "seed",  "exclude_su_occupied", "saturated",
      "sweep", "tolerance", "validate_metrics", "oracle_max", "trace"};
  return keys;
}

std::vector<Setting> parse_settings(std::string_view text) {
  std::vector<Setting> settings;
  int line_no = 0;
  for (auto line : split(text, '\n')) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string_view::npos) line = trim(line.substr(0, hash));
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ValidationError("config line " + std::to_string(line_no) +
                            ": expected key = value");
    }
    settings.emplace_back(std::string(trim(line.substr(0, eq))),
                          std::string(trim(line.substr(eq + 1))));
  }
  return settings;
}

RunSpec build_run_spec(Command command, const std::vector<Setting>& settings) {
  Builder base = build(command, settings);
  RunSpec spec = std::move(base.spec);
  if (!spec.sweep) {
    spec.points = {spec.sim};
    return spec;
  }
  for (double value : spec.sweep->values) {
    auto point_settings = settings;
    point_settings.emplace_back(spec.sweep->key, format_number(value));
    spec.points.push_back(build(command, point_settings).spec.sim);
  }
  return spec;
}

RunSpec parse_config(std::string_view text, Command command) {
  return build_run_spec(command, parse_settings(text));
}

std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", x);
  return buf;
}

int run_command(const RunSpec& spec, std::ostream& out, std::ostream& err) {
  try {
    switch (spec.command) {
      case Command::analytic: return run_analytic(spec, out);
      case Command::simulate:
      case Command::sweep: return run_simulate(spec, out);
      case Command::validate: return run_validate(spec, out, err);
      case Command::oracle: return run_oracle(spec, out, err);
    }
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }
  return 2;
}

} // namespace specmarkov::cli
