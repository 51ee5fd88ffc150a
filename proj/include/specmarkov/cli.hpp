#ifndef SPECMARKOV_CLI_HPP
#define SPECMARKOV_CLI_HPP

#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "specmarkov/handoff.hpp"
#include "specmarkov/sim.hpp"

namespace specmarkov::cli {

enum class Command { analytic, simulate, sweep, validate, oracle };

Command parse_command(std::string_view name);
std::string_view to_string(Command command);

struct SweepAxis {
  std::string key;
  std::vector<double> values;
};

struct RunSpec {
  Command command = Command::analytic;
  /// Model parameters live in sim.params; the simulator and the analytic
  /// engine read the same record.
  sim::SimConfig sim;
  std::optional<SweepAxis> sweep;
  double tolerance = 0.08;
  std::vector<std::string> validate_metrics{"theta", "pr_collision"};
  int oracle_max = 6;
  std::string out;
  std::string trace;
  /// One configuration per sweep value, or just `sim` without a sweep.
  std::vector<sim::SimConfig> points;

  const ModelParams& params() const { return sim.params; }
};

using Setting = std::pair<std::string, std::string>;

/// Keys accepted in a config file or as --key value flags.
const std::vector<std::string>& valid_keys();

/// Parses the flat `key = value` format. Blank lines and text after `#` are
/// ignored.
std::vector<Setting> parse_settings(std::string_view text);

/// Applies settings in order (later ones win) on top of the documented
/// defaults, then validates. Ts defaults to c when not given.
RunSpec build_run_spec(Command command, const std::vector<Setting>& settings);

/// parse_settings + build_run_spec.
RunSpec parse_config(std::string_view text, Command command = Command::analytic);

/// Writes CSV to `out`, diagnostics to `err`. Returns 0 on success, 1 on a
/// validation failure (bad input, tolerance exceeded, oracle mismatch), 2 on
/// an engine or structural error.
int run_command(const RunSpec& spec, std::ostream& out, std::ostream& err);

/// Numbers in CSV output: 10 significant digits, "inf"/"nan" spelled out.
std::string format_number(double x);

} // namespace specmarkov::cli

#endif // SPECMARKOV_CLI_HPP
