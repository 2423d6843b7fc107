#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include <json.hpp>

namespace {

struct RunResult {
  int exit_code = -1;
  std::string output;  // stdout and stderr merged
};

const char* cli_path() {
  const char* bin = std::getenv("KEMENY_CLI");
  REQUIRE_MESSAGE(bin != nullptr, "KEMENY_CLI must point at the built binary");
  return bin;
}

RunResult run_cli(const std::string& args) {
  const std::string cmd = std::string(cli_path()) + " " + args + " 2>&1";
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  RunResult r;
  char buf[4096];
  size_t got = 0;
  while ((got = fread(buf, 1, sizeof buf, pipe)) > 0) r.output.append(buf, got);
  const int status = pclose(pipe);
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::filesystem::path scratch() {
  static const std::filesystem::path dir = [] {
    auto d = std::filesystem::temp_directory_path() /
             ("kemeny_cli_" + std::to_string(::getpid()));
    std::filesystem::create_directories(d);
    return d;
  }();
  return dir;
}

std::string write_fixture(const std::string& name, const std::string& text) {
  const auto path = scratch() / name;
  std::ofstream out(path, std::ios::binary);
  out << text;
  return path.string();
}

std::string e1_path() {
  static const std::string path = write_fixture("e1.soc",
                                                "# NUMBER ALTERNATIVES: 3\n"
                                                "# ALTERNATIVE NAME 1: a\n"
                                                "# ALTERNATIVE NAME 2: b\n"
                                                "# ALTERNATIVE NAME 3: c\n"
                                                "2: 1,2,3\n"
                                                "1: 2,3,1\n");
  return path;
}

}  // namespace

TEST_CASE("reduce emits a report and exits zero") {
  RunResult r = run_cli("reduce " + e1_path() + " --rule combined --no-timing");
  REQUIRE(r.exit_code == 0);
  nlohmann::json j = nlohmann::json::parse(r.output);
  CHECK(j["instance"]["n"] == 3);
  CHECK(j["reports"].size() == 1);
  CHECK(j["reports"][0]["rule"] == "combined");
  CHECK(j["reports"][0]["positions_solved"] == 3);
  CHECK(j["reports"][0].count("elapsed_ms") == 0);

  RunResult timed = run_cli("reduce " + e1_path() + " --rule mot");
  CHECK(timed.exit_code == 0);
  CHECK(nlohmann::json::parse(timed.output)["reports"][0].count("elapsed_ms") == 1);
}

TEST_CASE("reduce repeats byte-identically without timing") {
  const std::string args = "reduce " + e1_path() +
                           " --rule betzler34 --rule ab-majority --rule combined --no-timing";
  RunResult a = run_cli(args);
  RunResult b = run_cli(args);
  CHECK(a.exit_code == 0);
  CHECK(a.output == b.output);
}

TEST_CASE("zero-margin profiles reduce to nothing") {
  const std::string path = write_fixture("tied.soc",
                                         "# NUMBER ALTERNATIVES: 3\n"
                                         "1: 1,2,3\n"
                                         "1: 3,2,1\n");
  RunResult r = run_cli("reduce " + path + " --rule mot --no-timing");
  REQUIRE(r.exit_code == 0);
  CHECK(nlohmann::json::parse(r.output)["reports"][0]["pairs_solved"] == 0);
}

TEST_CASE("exit statuses follow the documented contract") {
  const std::string bad = write_fixture("bad.soc",
                                        "# NUMBER ALTERNATIVES: 3\n"
                                        "1: 1,1,2\n");
  RunResult malformed = run_cli("reduce " + bad + " --rule mot");
  CHECK(malformed.exit_code == 2);
  CHECK(malformed.output.find("line 2") != std::string::npos);

  CHECK(run_cli("reduce " + e1_path() + " --rule nosuch").exit_code == 1);
  CHECK(run_cli("reduce " + e1_path()).exit_code == 1);              // missing --rule
  CHECK(run_cli("reduce " + e1_path() + " --rule combined --threshold 1").exit_code == 1);
  CHECK(run_cli("nosuchcommand").exit_code == 1);

  RunResult missing = run_cli("reduce " + (scratch() / "absent.soc").string() + " --rule mot");
  CHECK(missing.exit_code == 1);
  CHECK(missing.output.find("cannot open") != std::string::npos);
}

TEST_CASE("sample is deterministic and writes parseable instances") {
  const std::string args = "sample --n 6 --m 5 --theta 0.5 --seed 42";
  RunResult a = run_cli(args);
  RunResult b = run_cli(args);
  REQUIRE(a.exit_code == 0);
  CHECK(a.output == b.output);
  CHECK(a.output.find("# NUMBER ALTERNATIVES: 6") != std::string::npos);
  CHECK(run_cli("sample --n 6 --m 5 --theta 0.5 --seed 43").output != a.output);

  const auto dir = (scratch() / "batch").string();
  RunResult batch = run_cli("sample --n 4 --m 3 --theta 0.8 --seed 7 --count 3 --out " + dir);
  REQUIRE(batch.exit_code == 0);
  for (int k = 0; k < 3; ++k) {
    char name[32];
    std::snprintf(name, sizeof name, "instance_%04d.soc", k);
    CHECK(std::filesystem::exists(std::filesystem::path(dir) / name));
  }
  RunResult roundtrip =
      run_cli("reduce " + (std::filesystem::path(dir) / "instance_0000.soc").string() +
              " --rule combined --no-timing");
  CHECK(roundtrip.exit_code == 0);

  CHECK(run_cli("sample --n 4 --m 3 --theta 1.5").exit_code == 1);
}

TEST_CASE("stats emits one data row per instance-rule and one mean row per rule") {
  RunResult r = run_cli("stats " + e1_path() + " --rule mot --no-timing");
  REQUIRE(r.exit_code == 0);
  CHECK(r.output ==
        "n,m,theta,rule,pairs_total,pairs_solved,positions_solved,rounds,millis\n"
        "3,3,,mot,3,2,1,0,\n"
        "3,3,,mot:mean,3,2,1,0,\n");

  RunResult gen = run_cli(
      "stats --rule mot --rule ab-mot --n 5 --m 4 --theta 0.7 --count 4 --seed 9 --certify "
      "--no-timing");
  REQUIRE(gen.exit_code == 0);
  int lines = 0;
  for (char c : gen.output) lines += c == '\n';
  CHECK(lines == 1 + 4 * 2 + 2);  // header, data rows, aggregate rows
  CHECK(gen.output.find(",certified") != std::string::npos);
  CHECK(gen.output.find("false") == std::string::npos);

  RunResult js = run_cli("stats " + e1_path() + " --rule mot --format json --no-timing");
  REQUIRE(js.exit_code == 0);
  nlohmann::json parsed = nlohmann::json::parse(js.output);
  REQUIRE(parsed.is_array());
  CHECK(parsed.size() == 1);
  CHECK(parsed[0]["source"].get<std::string>().find("e1.soc") != std::string::npos);

  CHECK(run_cli("stats --rule mot").exit_code == 1);  // no files, no generator
}

TEST_CASE("verify certifies the shared instance and guards large ones") {
  RunResult ok = run_cli(
      "verify " + e1_path() +
      " --rule betzler34 --rule ab-majority --rule mot --rule iterated-mot --rule ab-mot "
      "--rule combined");
  REQUIRE(ok.exit_code == 0);
  CHECK(ok.output.find("violation") == std::string::npos);
  CHECK(ok.output.find("combined: certified") != std::string::npos);

  RunResult sampled = run_cli("sample --n 12 --m 3 --seed 1 --out " +
                              (scratch() / "big.soc").string());
  REQUIRE(sampled.exit_code == 0);
  RunResult guarded = run_cli("verify " + (scratch() / "big.soc").string() + " --rule mot");
  CHECK(guarded.exit_code == 4);
  CHECK(guarded.output.find("refused") != std::string::npos);
}

TEST_CASE("incomplete-order files flag completion-sensitive pairs in the report") {
  const std::string path = write_fixture("prefix.soi",
                                         "# NUMBER ALTERNATIVES: 3\n"
                                         "1: 3\n"
                                         "2: 1,2\n");
  RunResult r = run_cli("reduce " + path + " --rule mot --no-timing");
  REQUIRE(r.exit_code == 0);
  nlohmann::json j = nlohmann::json::parse(r.output);
  REQUIRE(j["instance"]["completion_sensitive"].size() == 1);
  CHECK(j["instance"]["completion_sensitive"][0] == nlohmann::json::array({0, 1}));
}
