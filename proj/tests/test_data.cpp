#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "helpers.hpp"
#include "kemeny/data.hpp"

using namespace kemeny;
using kemeny::testing::e1;
using kemeny::testing::profile;

namespace {

const char* kE1Soc =
    "# DATA TYPE: soc\n"
    "# NUMBER ALTERNATIVES: 3\n"
    "# NUMBER VOTERS: 3\n"
    "# NUMBER UNIQUE ORDERS: 2\n"
    "# ALTERNATIVE NAME 1: a\n"
    "# ALTERNATIVE NAME 2: b\n"
    "# ALTERNATIVE NAME 3: c\n"
    "2: 1,2,3\n"
    "1: 2,3,1\n";

int error_line(const std::string& text, PreflibKind kind) {
  try {
    parse_preflib(text, kind);
  } catch (const parse_error& e) {
    return e.line;
  }
  return -1;
}

}  // namespace

TEST_CASE("modern complete-order file parses to the shared instance") {
  VoteProfile v = parse_preflib(kE1Soc, PreflibKind::soc);
  CHECK(v.n == 3);
  CHECK(v.votes == e1().votes);
  CHECK(v.labels == std::vector<std::string>{"a", "b", "c"});
  CHECK(v.completion_sensitive.empty());

  PreflibDocument d = parse_preflib_document(kE1Soc, PreflibKind::soc);
  CHECK(d.metadata.at("DATA TYPE") == "soc");
  CHECK(d.metadata.at("NUMBER VOTERS") == "3");
  CHECK(d.names.at(2) == "b");
  CHECK(d.lines.size() == 2);
  CHECK(d.lines[1].line == 9);
}

TEST_CASE("legacy header style parses to the same profile") {
  const char* text =
      "3\n"
      "1,a\n"
      "2,b\n"
      "3,c\n"
      "3,3,2\n"
      "2,1,2,3\n"
      "1,2,3,1\n";
  VoteProfile v = parse_preflib(text, PreflibKind::soc);
  CHECK(v.votes == e1().votes);
  CHECK(v.labels == std::vector<std::string>{"a", "b", "c"});

  PreflibDocument d = parse_preflib_document(text, PreflibKind::soc);
  CHECK(d.metadata.at("NUMBER ALTERNATIVES") == "3");
  CHECK(d.metadata.at("NUMBER UNIQUE ORDERS") == "2");
}

TEST_CASE("carriage returns, blank lines, and unknown headers are tolerated") {
  const char* text =
      "# DATA TYPE: soc\r\n"
      "# NUMBER ALTERNATIVES: 2\r\n"
      "# SOME FUTURE KEY: kept verbatim\r\n"
      "\r\n"
      "1: 2,1\r\n";
  VoteProfile v = parse_preflib(text, PreflibKind::soc);
  CHECK(v.n == 2);
  CHECK(v.votes.size() == 1);
  CHECK(v.votes[0].first.order == std::vector<CandidateId>{1, 0});
  // No name rows: labels synthesize to the decimal ids.
  CHECK(v.labels == std::vector<std::string>{"1", "2"});
  PreflibDocument d = parse_preflib_document(text, PreflibKind::soc);
  CHECK(d.metadata.at("SOME FUTURE KEY") == "kept verbatim");
}

TEST_CASE("incomplete votes complete after the prefix in id order") {
  const char* text =
      "# NUMBER ALTERNATIVES: 3\n"
      "1: 3\n"
      "2: 1,2\n";
  VoteProfile asc = parse_preflib(text, PreflibKind::soi);
  REQUIRE(asc.votes.size() == 2);
  CHECK(asc.votes[0].first.order == std::vector<CandidateId>{2, 0, 1});
  CHECK(asc.votes[1].first.order == std::vector<CandidateId>{0, 1, 2});
  // Only the pair left entirely unlisted by some vote depends on the order.
  CHECK(asc.completion_sensitive ==
        std::vector<std::pair<CandidateId, CandidateId>>{{0, 1}});

  VoteProfile desc = parse_preflib(text, PreflibKind::soi, SoiCompletion::descending);
  CHECK(desc.votes[0].first.order == std::vector<CandidateId>{2, 1, 0});
  CHECK(desc.votes[1].first.order == std::vector<CandidateId>{0, 1, 2});
  CHECK(desc.completion_sensitive == asc.completion_sensitive);

  // A complete-order file must not contain prefixes.
  CHECK(error_line(text, PreflibKind::soc) == 2);
}

TEST_CASE("unflagged pairs tally identically under both completions") {
  SplitMix64 rng(60);
  for (int trial = 0; trial < 30; ++trial) {
    const int n = 3 + static_cast<int>(rng.below(5));
    PreflibDocument d;
    d.metadata["NUMBER ALTERNATIVES"] = std::to_string(n);
    d.end_line = 1;
    const int votes = 1 + static_cast<int>(rng.below(6));
    for (int k = 0; k < votes; ++k) {
      PreflibDocument::OrderLine o;
      o.line = k + 1;
      o.mult = 1 + static_cast<long long>(rng.below(3));
      Ranking full = kemeny::testing::random_ranking(n, rng);
      const size_t keep = 1 + rng.below(static_cast<uint64_t>(n));
      for (size_t i = 0; i < keep; ++i) o.ids.push_back(full.order[i] + 1);
      d.lines.push_back(std::move(o));
    }
    VoteProfile asc = profile_from_document(d, PreflibKind::soi, SoiCompletion::ascending);
    VoteProfile desc = profile_from_document(d, PreflibKind::soi, SoiCompletion::descending);
    CHECK(asc.completion_sensitive == desc.completion_sensitive);
    std::set<std::pair<CandidateId, CandidateId>> flagged(asc.completion_sensitive.begin(),
                                                          asc.completion_sensitive.end());
    PairTally ta = tally(asc), td = tally(desc);
    for (CandidateId x = 0; x < n; ++x)
      for (CandidateId y = x + 1; y < n; ++y)
        if (!flagged.count({x, y})) {
          CHECK(ta.at(x, y) == td.at(x, y));
          CHECK(ta.at(y, x) == td.at(y, x));
        }
  }
}

TEST_CASE("parse errors carry 1-based line numbers") {
  CHECK(error_line("", PreflibKind::soc) == 1);
  CHECK(error_line("# NUMBER ALTERNATIVES: 3\n1: 1,1,2\n", PreflibKind::soc) == 2);
  CHECK(error_line("# NUMBER ALTERNATIVES: 3\n1: 1,2,4\n", PreflibKind::soc) == 2);
  CHECK(error_line("# NUMBER ALTERNATIVES: 3\n1: 1,2,3\n0: 3,2,1\n", PreflibKind::soc) == 3);
  CHECK(error_line("# NUMBER ALTERNATIVES: 3\n", PreflibKind::soc) == 1);        // no votes
  CHECK(error_line("# NUMBER ALTERNATIVES\n1: 1\n", PreflibKind::soi) == 1);     // no colon
  CHECK(error_line("# NUMBER ALTERNATIVES: 3\n1: 1,2\n", PreflibKind::soc) == 2);
  CHECK(error_line("# NUMBER ALTERNATIVES: 3\nx: 1,2,3\n", PreflibKind::soc) == 2);
  CHECK(error_line("# NUMBER ALTERNATIVES: 2\n# ALTERNATIVE NAME 1: a\n1: 1\n",
                   PreflibKind::soi) == 1);  // declared 2, one name row
  CHECK(error_line("2\n1,a\n2,b\n1,1\n1,1,2\n", PreflibKind::soc) == 4);  // bad counts header
  CHECK_THROWS_AS(parse_preflib("# NUMBER ALTERNATIVES: 3\n1: 1,1,2\n", PreflibKind::soc),
                  parse_error);
}

TEST_CASE("canonical serialization round-trips") {
  VoteProfile v = parse_preflib(kE1Soc, PreflibKind::soc);
  CHECK(parse_preflib(serialize_instance(v), PreflibKind::soc) == v);

  // Unlabeled profiles pick up decimal labels after one pass, then stay put.
  VoteProfile hand = profile(4, {{{3, 1, 0, 2}, 2}, {{0, 1, 2, 3}, 5}});
  VoteProfile once = parse_preflib(serialize_instance(hand), PreflibKind::soc);
  CHECK(once.n == hand.n);
  CHECK(once.votes == hand.votes);
  CHECK(once.labels == std::vector<std::string>{"1", "2", "3", "4"});
  CHECK(parse_preflib(serialize_instance(once), PreflibKind::soc) == once);
}

TEST_CASE("sampler is deterministic and aggregates draws") {
  MallowsParams p;
  p.n = 6;
  p.m = 200;
  p.theta = 0.5;
  p.seed = 42;
  VoteProfile a = mallows_sample(p);
  VoteProfile b = mallows_sample(p);
  CHECK(a == b);
  CHECK(serialize_instance(a) == serialize_instance(b));
  CHECK(a.total_votes() == 200);
  CHECK(a.n == 6);
  a.validate();
  CHECK(std::is_sorted(a.votes.begin(), a.votes.end(), [](const auto& x, const auto& y) {
    if (x.second != y.second) return x.second > y.second;
    return x.first < y.first;
  }));
  CHECK(parse_preflib(serialize_instance(a), PreflibKind::soc) == a);

  p.seed = 43;
  CHECK(!(mallows_sample(p) == a));

  // Distinct derived sub-seeds give distinct instances.
  p.seed = derive_seed(7, 0);
  VoteProfile s0 = mallows_sample(p);
  p.seed = derive_seed(7, 1);
  CHECK(!(mallows_sample(p) == s0));
}

TEST_CASE("sampler rejects bad parameters") {
  MallowsParams p;
  p.n = 3;
  p.m = 1;
  p.theta = 0.0;
  CHECK_THROWS_AS(mallows_sample(p), input_error);
  p.theta = 1.5;
  CHECK_THROWS_AS(mallows_sample(p), input_error);
  p.theta = 0.5;
  p.m = 0;
  CHECK_THROWS_AS(mallows_sample(p), input_error);
  p.m = 1;
  p.n = 0;
  CHECK_THROWS_AS(mallows_sample(p), input_error);
  p.n = 3;
  p.center = Ranking{{0, 1}};
  CHECK_THROWS_AS(mallows_sample(p), input_error);
}

TEST_CASE("sampled frequencies match the stationary law exactly computed") {
  // n = 3, theta = 1/2: Z = 1 + 2t + 2t^2 + t^3 = 21/8, P(pi) = t^d / Z.
  MallowsParams p;
  p.n = 3;
  p.m = 200000;
  p.theta = 0.5;
  p.seed = 1234;
  VoteProfile v = mallows_sample(p);
  std::map<std::vector<CandidateId>, long long> freq;
  for (const auto& [r, c] : v.votes) freq[r.order] += c;

  const Ranking center{{0, 1, 2}};
  const double z = 1 + 2 * 0.5 + 2 * 0.25 + 0.125;
  std::vector<CandidateId> perm{0, 1, 2};
  do {
    const long long d = kendall_tau(Ranking{perm}, center);
    const double prob = std::pow(0.5, static_cast<double>(d)) / z;
    const double expect = prob * static_cast<double>(p.m);
    const double se = std::sqrt(prob * (1 - prob) * static_cast<double>(p.m));
    CHECK(std::abs(static_cast<double>(freq[perm]) - expect) <= 3 * se);
  } while (std::next_permutation(perm.begin(), perm.end()));
}

TEST_CASE("theta one is uniform; tiny theta concentrates on the center") {
  MallowsParams p;
  p.n = 3;
  p.m = 60000;
  p.theta = 1.0;
  p.seed = 99;
  VoteProfile v = mallows_sample(p);
  std::map<std::vector<CandidateId>, long long> freq;
  for (const auto& [r, c] : v.votes) freq[r.order] += c;
  const double expect = static_cast<double>(p.m) / 6.0;
  double chi2 = 0.0;
  std::vector<CandidateId> perm{0, 1, 2};
  do {
    const double diff = static_cast<double>(freq[perm]) - expect;
    chi2 += diff * diff / expect;
  } while (std::next_permutation(perm.begin(), perm.end()));
  CHECK(chi2 < 20.515);  // df = 5, significance 0.001

  MallowsParams tight;
  tight.n = 4;
  tight.m = 1000;
  tight.theta = 0.05;
  tight.center = Ranking{{2, 0, 3, 1}};
  tight.seed = 7;
  VoteProfile w = mallows_sample(tight);
  // The mode is the center; at this dispersion it dominates outright.
  CHECK(w.votes[0].first == tight.center);
  CHECK(w.votes[0].second > 700);
}

TEST_CASE("report serialization is stable and lossless enough to audit") {
  ReductionReport r = run_rule("combined", e1(), 2);
  const std::string once = serialize_report(r, false);
  CHECK(once == serialize_report(r, false));
  CHECK(once.find("elapsed_ms") == std::string::npos);
  CHECK(serialize_report(r, true).find("elapsed_ms") != std::string::npos);

  nlohmann::json j = nlohmann::json::parse(once);
  CHECK(j["rule"] == "combined");
  CHECK(j["n"] == 3);
  CHECK(j["pairs_total"] == 3);
  CHECK(j["pairs_solved"] == 3);
  CHECK(j["positions_solved"] == 3);
  CHECK(j["pairs"].size() == 3);
  CHECK(j["positions"]["0"] == 0);
  CHECK(j["partial"]["fixed"].size() == 3);

  // An empty relation serializes to an empty pair array, not null.
  ReductionReport none = run_rule("mot", profile(3, {{{0, 1, 2}, 1}, {{2, 1, 0}, 1}}), 2);
  nlohmann::json jn = nlohmann::json::parse(serialize_report(none, false));
  CHECK(jn["pairs"].is_array());
  CHECK(jn["pairs"].empty());
  CHECK(jn["partial"].is_null());
}

TEST_CASE("csv rows follow the documented column order") {
  CHECK(csv_header() == "n,m,theta,rule,pairs_total,pairs_solved,positions_solved,rounds,millis\n");
  CHECK(csv_header(true) ==
        "n,m,theta,rule,pairs_total,pairs_solved,positions_solved,rounds,millis,certified\n");
  ReductionReport r = run_rule("combined", e1(), 2);
  const std::string row = csv_row(r, "", false);
  CHECK(row == "3,3,,combined,3,3,3," + std::to_string(r.rounds) + ",\n");
  const std::string certified = csv_row(r, "0.5", false, true);
  CHECK(certified == "3,3,0.5,combined,3,3,3," + std::to_string(r.rounds) + ",,true\n");
  CHECK(csv_row(r, "", true).find(",\n") == std::string::npos);
}
