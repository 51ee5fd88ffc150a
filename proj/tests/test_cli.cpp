#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include "specmarkov/cli.hpp"
#include "specmarkov/errors.hpp"

using namespace specmarkov;

namespace {

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> lines;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) lines.push_back(line);
  return lines;
}

std::vector<std::string> fields(const std::string& line) {
  std::vector<std::string> out;
  std::istringstream in(line);
  for (std::string f; std::getline(in, f, ',');) out.push_back(f);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

std::string error_of(const std::string& text) {
  try {
    cli::parse_config(text);
  } catch (const ValidationError& e) {
    return e.what();
  }
  return {};
}

int shell(const std::string& command) {
  const int status = std::system(command.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path);
  std::ostringstream text;
  text << in.rdbuf();
  return text.str();
}

} // namespace

TEST_CASE("empty config gives the defaults") {
  const auto spec = cli::parse_config("");
  const auto& m = spec.params();
  CHECK(m.channels == 10);
  CHECK(m.pairs == 2);
  CHECK(m.slots_per_frame == 10);
  CHECK(m.frames_per_packet == 1);
  CHECK(m.pu_arrival == 0.05);
  CHECK(m.su_arrival == 1.0);
  CHECK(m.pu_completion == 0.1);
  CHECK(m.sensing_delay == 10);
  CHECK(m.scheme == Scheme::random);
  CHECK(spec.sim.slots == 1'000'000);
  CHECK(spec.sim.warmup == 100'000);
  CHECK(spec.sim.seed == 1);
  CHECK(spec.points.size() == 1);
}

TEST_CASE("config parsing") {
  const auto spec = cli::parse_config(
      "# comment\n"
      "M = 6\n"
      "  c=4   # frame length\n"
      "scheme = pseudorandom\n"
      "\n"
      "seed = 99\n");
  CHECK(spec.params().channels == 6);
  CHECK(spec.params().slots_per_frame == 4);
  CHECK(spec.params().sensing_delay == 4);
  CHECK(spec.params().scheme == Scheme::pseudorandom);
  CHECK(spec.sim.seed == 99);

  const auto later = cli::build_run_spec(cli::Command::analytic,
                                         {{"p", "0.1"}, {"p", "0.2"}, {"Ts", "3"}});
  CHECK(later.params().pu_arrival == 0.2);
  CHECK(later.params().sensing_delay == 3);
}

TEST_CASE("out-of-range values name the key and the range") {
  const auto message = error_of("p = 1.5");
  CHECK(message.find("p") != std::string::npos);
  CHECK(message.find("[0, 1]") != std::string::npos);
  CHECK(error_of("v = 0").find("(0, 1]") != std::string::npos);
  CHECK(error_of("N = 0").find("N") != std::string::npos);
  CHECK_FALSE(error_of("Ts = 11").empty());
  CHECK_FALSE(error_of("M = ten").empty());
  CHECK_FALSE(error_of("scheme = roundrobin").empty());
  CHECK_FALSE(error_of("warmup = 2000000").empty());
  CHECK_FALSE(error_of("sweep = p:0.1,2").empty());
  CHECK_FALSE(error_of("just text").empty());
}

TEST_CASE("unknown keys list the valid ones") {
  const auto message = error_of("colour = blue");
  CHECK(message.find("colour") != std::string::npos);
  for (const auto& key : cli::valid_keys()) CHECK(message.find(key) != std::string::npos);
}

TEST_CASE("sweep gives one row per value") {
  auto spec = cli::parse_config(
      "sweep = p:0.01,0.05,0.1\nslots = 20000\nwarmup = 2000", cli::Command::sweep);
  REQUIRE(spec.points.size() == 3);
  CHECK(spec.points[2].params.pu_arrival == 0.1);
  std::ostringstream out, err;
  CHECK(cli::run_command(spec, out, err) == 0);
  const auto lines = lines_of(out.str());
  REQUIRE(lines.size() == 4);
  CHECK(lines[0] ==
        "M,N,c,h,p,s,v,Ts,scheme,u,q,theta,pr_collision,ds,"
        "slots,warmup,seed,theta_sim,pr_collision_sim,ds_sim,q_hat");
  CHECK(fields(lines[1])[4] == "0.01");
  CHECK(fields(lines[2])[4] == "0.05");
  CHECK(fields(lines[3])[4] == "0.1");
}

TEST_CASE("sweeping c keeps Ts tied to c") {
  const auto spec = cli::parse_config("sweep = c:4,6", cli::Command::analytic);
  CHECK(spec.points[0].params.sensing_delay == 4);
  CHECK(spec.points[1].params.sensing_delay == 6);
}

TEST_CASE("analytic row for greedy with three pairs") {
  const auto spec = cli::parse_config("scheme = greedy\nN = 3");
  std::ostringstream out, err;
  CHECK(cli::run_command(spec, out, err) == 0);
  const auto lines = lines_of(out.str());
  REQUIRE(lines.size() == 2);
  CHECK(lines[0] == "M,N,c,h,p,s,v,Ts,scheme,u,q,theta,pr_collision,ds");
  const auto row = fields(lines[1]);
  CHECK(row[8] == "greedy");
  CHECK(row[10] == "1");
  CHECK(row[11] == "0");
  CHECK(row[13] == "inf");
}

TEST_CASE("oracle reports zero mismatches") {
  const auto spec = cli::parse_config("", cli::Command::oracle);
  std::ostringstream out, err;
  CHECK(cli::run_command(spec, out, err) == 0);
  CHECK(err.str().find("0 mismatches") != std::string::npos);
  CHECK(lines_of(out.str()).size() == 1);
}

TEST_CASE("validate at the defaults") {
  const auto spec = cli::parse_config("tolerance = 0.08", cli::Command::validate);
  std::ostringstream out, err;
  CHECK(cli::run_command(spec, out, err) == 0);
  const auto lines = lines_of(out.str());
  REQUIRE(lines.size() == 3);
  CHECK(fields(lines[0]).size() == fields(lines[1]).size());
  CHECK(fields(lines[2]).size() == fields(lines[1]).size());
  CHECK(fields(lines[2])[0] == "max");
}

TEST_CASE("validate fails when a gated metric exceeds the tolerance") {
  const auto spec = cli::parse_config(
      "tolerance = 0\nvalidate_metrics = theta\nslots = 20000\nwarmup = 100",
      cli::Command::validate);
  std::ostringstream out, err;
  CHECK(cli::run_command(spec, out, err) == 1);
  CHECK(err.str().find("theta") != std::string::npos);
}

TEST_CASE("number formatting") {
  CHECK(cli::format_number(0.1) == "0.1");
  CHECK(cli::format_number(10.0 / 11) == "0.9090909091");
  CHECK(cli::format_number(1234567.891234) == "1234567.891");
  CHECK(cli::format_number(1.0 / 0.0) == "inf");
  CHECK(cli::format_number(std::nan("")) == "nan");
}

TEST_CASE("identical specs give identical bytes") {
  const auto spec = cli::parse_config("slots = 50000\nwarmup = 5000", cli::Command::simulate);
  std::ostringstream a, b, err;
  CHECK(cli::run_command(spec, a, err) == 0);
  CHECK(cli::run_command(spec, b, err) == 0);
  CHECK(a.str() == b.str());
}

TEST_CASE("command-line binary") {
  const std::string bin = SPECMARKOV_BINARY;
  const auto dir = std::filesystem::temp_directory_path() / "specmarkov_cli_test";
  std::filesystem::create_directories(dir);
  const auto config = dir / "run.cfg";
  std::ofstream(config) << "N = 3\nscheme = greedy\n";

  const auto out = dir / "out.csv";
  CHECK(shell(bin + " analytic --config " + config.string() + " --out " + out.string()) == 0);
  const auto lines = lines_of(slurp(out));
  REQUIRE(lines.size() == 2);
  CHECK(fields(lines[1])[1] == "3");

  const auto overridden = dir / "override.csv";
  CHECK(shell(bin + " analytic --config " + config.string() + " --N 1 --p=0.02 --out " +
              overridden.string()) == 0);
  const auto row = fields(lines_of(slurp(overridden))[1]);
  CHECK(row[1] == "1");
  CHECK(row[4] == "0.02");

  CHECK(shell(bin + " analytic --p 1.5 2>/dev/null") == 1);
  CHECK(shell(bin + " analytic --colour blue 2>/dev/null") == 1);
  CHECK(shell(bin + " frobnicate 2>/dev/null") == 1);
  CHECK(shell(bin + " oracle --out " + (dir / "oracle.csv").string() + " 2>/dev/null") == 0);
  std::filesystem::remove_all(dir);
}
