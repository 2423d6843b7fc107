#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "kemeny/data.hpp"
#include "kemeny/oracle.hpp"
#include "kemeny/rng.hpp"
#include "kemeny/rules.hpp"

namespace {

using namespace kemeny;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw input_error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_output(const std::string& path, const std::string& content) {
  if (path.empty()) {
    std::cout << content;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw input_error("cannot write " + path);
  out << content;
}

PreflibKind kind_of_path(const std::string& path) {
  return path.size() >= 4 && path.compare(path.size() - 4, 4, ".soi") == 0 ? PreflibKind::soi
                                                                           : PreflibKind::soc;
}

VoteProfile load_instance(const std::string& path) {
  return parse_preflib(read_file(path), kind_of_path(path));
}

std::string format_double(double value, const char* fmt) {
  char buf[48];
  std::snprintf(buf, sizeof buf, fmt, value);
  return buf;
}

nlohmann::ordered_json report_json(const ReductionReport& r, bool timing) {
  return nlohmann::ordered_json::parse(serialize_report(r, timing));
}

nlohmann::ordered_json instance_json(const std::string& source, const VoteProfile& v) {
  nlohmann::ordered_json inst;
  inst["source"] = source;
  inst["n"] = v.n;
  inst["m"] = v.total_votes();
  auto sens = nlohmann::ordered_json::array();
  for (const auto& [x, y] : v.completion_sensitive)
    sens.push_back(nlohmann::ordered_json::array({x, y}));
  inst["completion_sensitive"] = std::move(sens);
  return inst;
}

int cmd_reduce(const std::string& input, const std::vector<std::string>& rules, int threshold,
               const std::string& out, bool timing) {
  const VoteProfile v = load_instance(input);
  nlohmann::ordered_json j;
  j["instance"] = instance_json(input, v);
  auto reports = nlohmann::ordered_json::array();
  for (const std::string& rule : rules) reports.push_back(report_json(run_rule(rule, v, threshold), timing));
  j["reports"] = std::move(reports);
  write_output(out, j.dump(2) + "\n");
  return 0;
}

int cmd_sample(int n, long long m, double theta, int count, uint64_t seed,
               const std::string& out) {
  if (count < 1) throw input_error("count must be positive");
  std::vector<std::string> texts;
  for (int k = 0; k < count; ++k) {
    MallowsParams p;
    p.n = n;
    p.m = m;
    p.theta = theta;
    p.seed = derive_seed(seed, static_cast<uint64_t>(k));
    texts.push_back(serialize_instance(mallows_sample(p)));
  }
  if (out.empty()) {
    for (const std::string& t : texts) std::cout << t;
    return 0;
  }
  if (count == 1) {
    write_output(out, texts[0]);
    return 0;
  }
  std::filesystem::create_directories(out);
  for (int k = 0; k < count; ++k) {
    char name[32];
    std::snprintf(name, sizeof name, "instance_%04d.soc", k);
    write_output((std::filesystem::path(out) / name).string(), texts[static_cast<size_t>(k)]);
  }
  return 0;
}

int cmd_verify(const std::string& input, const std::vector<std::string>& rules, int threshold) {
  const VoteProfile v = load_instance(input);
  const MedianSet ms = enumerate_medians(v);
  std::ostringstream out;
  out << input << ": " << ms.medians.size() << " median(s), score " << ms.score << "\n";
  bool violated = false;
  for (const std::string& rule : rules) {
    const ReductionReport r = run_rule(rule, v, threshold);
    const std::vector<Violation> bad = certify(v, r.solved_pairs.pairs(), r.solved_positions);
    if (bad.empty()) {
      out << rule << ": certified (" << r.solved_pairs.size() << " pairs, "
          << r.solved_positions.size() << " positions)\n";
    } else {
      violated = true;
      out << rule << ": " << bad.size() << " violation(s)\n";
      for (const Violation& viol : bad) out << "  " << viol.describe() << "\n";
    }
  }
  std::cout << out.str();
  return violated ? 5 : 0;
}

struct StatsInstance {
  std::string source;
  std::string theta;
  VoteProfile v;
};

struct RuleAggregate {
  long long count = 0;
  double n = 0, m = 0, pairs_total = 0, pairs_solved = 0, positions_solved = 0, rounds = 0,
         millis = 0;
  bool all_certified = true;
};

int cmd_stats(const std::vector<std::string>& files, const std::vector<std::string>& rules,
              int threshold, int n, long long m, double theta, int count, uint64_t seed,
              bool with_certify, const std::string& format, const std::string& out, bool timing) {
  std::vector<StatsInstance> instances;
  if (!files.empty()) {
    for (const std::string& f : files) instances.push_back({f, "", load_instance(f)});
  } else {
    if (n <= 0 || m <= 0) throw input_error("stats needs input files or --n/--m to generate");
    if (count < 1) throw input_error("count must be positive");
    const std::string theta_text = format_double(theta, "%g");
    for (int k = 0; k < count; ++k) {
      MallowsParams p;
      p.n = n;
      p.m = m;
      p.theta = theta;
      p.seed = derive_seed(seed, static_cast<uint64_t>(k));
      instances.push_back(
          {"mallows:" + std::to_string(k), theta_text, mallows_sample(p)});
    }
  }

  bool violated = false;
  std::map<std::string, RuleAggregate> agg;
  std::ostringstream csv;
  csv << csv_header(with_certify);
  auto json_rows = nlohmann::ordered_json::array();
  for (const StatsInstance& inst : instances) {
    for (const std::string& rule : rules) {
      const ReductionReport r = run_rule(rule, inst.v, threshold);
      std::optional<bool> certified;
      if (with_certify) {
        certified = certify(inst.v, r.solved_pairs.pairs(), r.solved_positions).empty();
        if (!*certified) violated = true;
      }
      csv << csv_row(r, inst.theta, timing, certified);
      RuleAggregate& a = agg[rule];
      ++a.count;
      a.n += r.n;
      a.m += static_cast<double>(r.m);
      a.pairs_total += static_cast<double>(static_cast<long long>(r.n) * (r.n - 1) / 2);
      a.pairs_solved += r.solved_pairs.size();
      a.positions_solved += static_cast<double>(r.solved_positions.size());
      a.rounds += r.rounds;
      a.millis += r.elapsed_ms;
      if (certified && !*certified) a.all_certified = false;
      if (format == "json") {
        nlohmann::ordered_json row = report_json(r, timing);
        row["source"] = inst.source;
        if (!inst.theta.empty()) row["theta"] = inst.theta;
        if (certified) row["certified"] = *certified;
        json_rows.push_back(std::move(row));
      }
    }
  }

  // One aggregate row per rule, in the order the rules were requested.
  for (const std::string& rule : rules) {
    const RuleAggregate& a = agg[rule];
    const double k = static_cast<double>(a.count);
    csv << format_double(a.n / k, "%.6g") << ',' << format_double(a.m / k, "%.6g") << ','
        << (instances[0].theta) << ',' << rule << ":mean,"
        << format_double(a.pairs_total / k, "%.6g") << ','
        << format_double(a.pairs_solved / k, "%.6g") << ','
        << format_double(a.positions_solved / k, "%.6g") << ','
        << format_double(a.rounds / k, "%.6g") << ',';
    if (timing) csv << format_double(a.millis / k, "%.6g");
    if (with_certify) csv << ',' << (a.all_certified ? "true" : "false");
    csv << '\n';
  }

  write_output(out, format == "json" ? json_rows.dump(2) + "\n" : csv.str());
  return violated ? 5 : 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Search-space reduction rules for Kemeny rank aggregation"};
  app.require_subcommand(1);

  std::vector<std::string> rules;
  std::vector<std::string> inputs;
  std::string input;
  std::string out;
  std::string format = "csv";
  int threshold = 2;
  int n = 0;
  long long m = 0;
  double theta = 1.0;
  int count = 1;
  uint64_t seed = 0;
  bool no_timing = false;
  bool with_certify = false;

  CLI::App* reduce = app.add_subcommand("reduce", "Run rules on one instance, emit a JSON report");
  reduce->add_option("input", input, "Instance file (.soc or .soi)")->required();
  reduce->add_option("--rule", rules, "Rule to run (repeatable)")->required();
  reduce->add_option("--threshold", threshold, "Recursion stops at blocks of this size");
  reduce->add_option("--out", out, "Output path (default stdout)");
  reduce->add_flag("--no-timing", no_timing, "Omit elapsed milliseconds from the report");

  CLI::App* stats = app.add_subcommand("stats", "Summarize rules over files or a generated batch");
  stats->add_option("inputs", inputs, "Instance files (.soc or .soi)");
  stats->add_option("--rule", rules, "Rule to run (repeatable)")->required();
  stats->add_option("--threshold", threshold, "Recursion stops at blocks of this size");
  stats->add_option("--n", n, "Generator: number of candidates");
  stats->add_option("--m", m, "Generator: number of votes");
  stats->add_option("--theta", theta, "Generator: dispersion in (0, 1]");
  stats->add_option("--count", count, "Generator: number of instances");
  stats->add_option("--seed", seed, "Generator: base seed");
  stats->add_flag("--certify", with_certify, "Check each output against the exact oracle");
  stats->add_option("--format", format, "Output format")
      ->check(CLI::IsMember({"csv", "json"}));
  stats->add_option("--out", out, "Output path (default stdout)");
  stats->add_flag("--no-timing", no_timing, "Blank the millis column");

  CLI::App* sample = app.add_subcommand("sample", "Draw Mallows instances and write canonical files");
  sample->add_option("--n", n, "Number of candidates")->required();
  sample->add_option("--m", m, "Number of votes")->required();
  sample->add_option("--theta", theta, "Dispersion in (0, 1]");
  sample->add_option("--count", count, "Number of instances");
  sample->add_option("--seed", seed, "Base seed; instance k uses a derived sub-seed");
  sample->add_option("--out", out, "File (count=1) or directory (default stdout)");

  CLI::App* verify = app.add_subcommand("verify", "Certify rule outputs against enumerated medians");
  verify->add_option("input", input, "Instance file (.soc or .soi)")->required();
  verify->add_option("--rule", rules, "Rule to check (repeatable)")->required();
  verify->add_option("--threshold", threshold, "Recursion stops at blocks of this size");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    // Help and version return 0 from exit(); everything else is usage.
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*reduce) return cmd_reduce(input, rules, threshold, out, !no_timing);
    if (*stats)
      return cmd_stats(inputs, rules, threshold, n, m, theta, count, seed, with_certify, format,
                       out, !no_timing);
    if (*sample) return cmd_sample(n, m, theta, count, seed, out);
    if (*verify) return cmd_verify(input, rules, threshold);
  } catch (const oracle_guard_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  } catch (const parse_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const input_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const internal_inconsistency_error& e) {
    std::cerr << "internal inconsistency: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 3;
  }
  return 1;
}
