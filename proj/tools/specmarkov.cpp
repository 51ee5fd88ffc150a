// specmarkov <command> [--config FILE] [--key value ...] [--out FILE]

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "specmarkov/cli.hpp"
#include "specmarkov/errors.hpp"

namespace cli = specmarkov::cli;

namespace {

/// Turns the unrecognized `--key value` / `--key=value` arguments into
/// settings that override the config file.
std::vector<cli::Setting> parse_overrides(const std::vector<std::string>& extras) {
  std::vector<cli::Setting> settings;
  for (std::size_t i = 0; i < extras.size(); ++i) {
    const std::string& arg = extras[i];
    if (arg.rfind("--", 0) != 0 || arg.size() == 2) {
      throw specmarkov::ValidationError("unexpected argument '" + arg + "'");
    }
    const std::string body = arg.substr(2);
    const auto eq = body.find('=');
    if (eq != std::string::npos) {
      settings.emplace_back(body.substr(0, eq), body.substr(eq + 1));
    } else if (i + 1 < extras.size()) {
      settings.emplace_back(body, extras[++i]);
    } else {
      throw specmarkov::ValidationError("missing value for '" + arg + "'");
    }
  }
  return settings;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw specmarkov::ValidationError("cannot read config file " + path);
  std::ostringstream text;
  text << in.rdbuf();
  return text.str();
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spectrum handoff Markov model: analytic solver and slot simulator"};
  app.allow_extras();
  std::string command;
  std::string config_path;
  std::string out_path;
  app.add_option("command", command, "analytic | simulate | sweep | validate | oracle")
      ->required();
  app.add_option("--config", config_path, "flat key = value file");
  app.add_option("--out", out_path, "CSV output file (default stdout)");
  app.footer("Any other --key value pair overrides the config file. Keys: M N c h p "
             "s v Ts scheme slots warmup seed exclude_su_occupied saturated sweep "
             "tolerance validate_metrics oracle_max trace");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  cli::RunSpec spec;
  try {
    const auto cmd = cli::parse_command(command);
    std::vector<cli::Setting> settings;
    if (!config_path.empty()) settings = cli::parse_settings(read_file(config_path));
    for (auto& s : parse_overrides(app.remaining())) settings.push_back(std::move(s));
    spec = cli::build_run_spec(cmd, settings);
  } catch (const specmarkov::ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }

  if (out_path.empty()) return cli::run_command(spec, std::cout, std::cerr);
  std::ofstream out(out_path);
  if (!out) {
    std::cerr << "error: cannot write " << out_path << '\n';
    return 1;
  }
  return cli::run_command(spec, out, std::cerr);
}
