#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "kemeny/core.hpp"
#include "kemeny/rules.hpp"

namespace kemeny {

enum class PreflibKind { soc, soi };

// Order among the candidates an incomplete vote leaves unlisted. They always
// go after the listed prefix; only their mutual order is a convention.
enum class SoiCompletion { ascending, descending };

// Raw file structure: metadata headers, the alternative-id table, and the
// order lines verbatim. Line numbers are 1-based and kept for diagnostics.
struct PreflibDocument {
  struct OrderLine {
    int line = 0;
    long long mult = 0;
    std::vector<long long> ids;
  };

  std::map<std::string, std::string> metadata;
  std::map<long long, std::string> names;
  std::vector<OrderLine> lines;
  int end_line = 0;
};

// Accepts both header styles found in preference archives: '# KEY: value'
// lines with '# ALTERNATIVE NAME k: label' rows, and the legacy layout (a
// leading alternative count, an id,label table, and a count header line).
// Unknown '#' keys are preserved as opaque metadata.
PreflibDocument parse_preflib_document(const std::string& text, PreflibKind kind);

// Converts a parsed document, validating ids, repeats, and multiplicities.
// For incomplete votes the missing candidates are appended after the listed
// prefix in the chosen id order; every unordered pair that is entirely
// missing from some vote is recorded as completion-sensitive.
VoteProfile profile_from_document(const PreflibDocument& d, PreflibKind kind,
                                  SoiCompletion completion = SoiCompletion::ascending);

VoteProfile parse_preflib(const std::string& text, PreflibKind kind,
                          SoiCompletion completion = SoiCompletion::ascending);

// Canonical complete-order text: '#' headers, alternatives numbered 1..n,
// one 'count: order' line per stored vote. Parsing it back reproduces the
// profile exactly (unlabeled profiles acquire the decimal labels).
std::string serialize_instance(const VoteProfile& v);

struct MallowsParams {
  int n = 0;
  long long m = 0;      // number of votes to draw
  double theta = 1.0;   // dispersion, in (0, 1]
  Ranking center;       // empty means the identity ranking
  uint64_t seed = 0;
};

// m independent draws via repeated insertion: the i-th candidate of the
// center (i = 1..n) enters position j of the partial vote with probability
// theta^(i-j) / (1 + theta + ... + theta^(i-1)), which yields
// P(pi) = theta^d(pi, center) / Z exactly. Deterministic given the seed;
// equal draws are aggregated and the unique orders sorted by descending
// multiplicity, so the result serializes canonically.
VoteProfile mallows_sample(const MallowsParams& p);

// Report as JSON text with a stable key order. with_timing=false omits the
// elapsed-milliseconds field so repeated runs compare byte for byte.
std::string serialize_report(const ReductionReport& r, bool with_timing = true);

// CSV summary: one row per (instance, rule). Aggregate rows reuse the same
// columns with the rule name suffixed ':mean'. theta and millis may be blank.
std::string csv_header(bool with_certified = false);
std::string csv_row(const ReductionReport& r, const std::string& theta, bool with_timing,
                    std::optional<bool> certified = std::nullopt);

}  // namespace kemeny
