#include "kemeny/data.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <numeric>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "kemeny/rng.hpp"

namespace kemeny {

namespace {

std::string trim(const std::string& s) {
  size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

// Physical lines with 1-based numbers; accepts '\n' and '\r\n' endings.
std::vector<std::pair<int, std::string>> split_lines(const std::string& text) {
  std::vector<std::pair<int, std::string>> out;
  std::string cur;
  int line = 1;
  for (char c : text) {
    if (c == '\n') {
      if (!cur.empty() && cur.back() == '\r') cur.pop_back();
      out.emplace_back(line, cur);
      cur.clear();
      ++line;
    } else {
      cur.push_back(c);
    }
  }
  if (!cur.empty()) {
    if (cur.back() == '\r') cur.pop_back();
    out.emplace_back(line, cur);
  }
  return out;
}

long long parse_int(const std::string& s, int line, const char* what) {
  const std::string t = trim(s);
  if (t.empty()) throw parse_error(line, std::string("missing ") + what);
  size_t pos = 0;
  long long value = 0;
  try {
    value = std::stoll(t, &pos);
  } catch (const std::exception&) {
    throw parse_error(line, std::string("expected an integer ") + what + ", got '" + t + "'");
  }
  if (pos != t.size())
    throw parse_error(line, std::string("trailing characters after ") + what + " in '" + t + "'");
  return value;
}

std::vector<long long> parse_int_list(const std::string& s, int line, const char* what) {
  std::vector<long long> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_int(item, line, what));
  return out;
}

// 'KEY: value' after the leading '#'. ALTERNATIVE NAME rows feed the table.
void parse_header(const std::string& body, int line, PreflibDocument& d) {
  const size_t colon = body.find(':');
  if (colon == std::string::npos)
    throw parse_error(line, "malformed header, expected '# KEY: value'");
  const std::string key = trim(body.substr(0, colon));
  const std::string value = trim(body.substr(colon + 1));
  if (key.empty()) throw parse_error(line, "empty header key");
  const std::string prefix = "ALTERNATIVE NAME";
  if (key.rfind(prefix, 0) == 0) {
    long long id = parse_int(key.substr(prefix.size()), line, "alternative id");
    if (!d.names.emplace(id, value).second)
      throw parse_error(line, "duplicate name for alternative " + std::to_string(id));
  } else {
    d.metadata[key] = value;
  }
}

PreflibDocument::OrderLine parse_order_line(const std::string& s, int line) {
  const size_t colon = s.find(':');
  if (colon == std::string::npos) throw parse_error(line, "expected 'count: order'");
  PreflibDocument::OrderLine o;
  o.line = line;
  o.mult = parse_int(s.substr(0, colon), line, "vote count");
  o.ids = parse_int_list(s.substr(colon + 1), line, "alternative id");
  if (o.ids.empty()) throw parse_error(line, "empty order");
  return o;
}

// Legacy layout: alternative count, id,label table, 'voters,sum,unique'
// header, then 'count,order...' lines, all comma-separated.
PreflibDocument parse_legacy(const std::vector<std::pair<int, std::string>>& lines, size_t first,
                             int end_line) {
  PreflibDocument d;
  size_t i = first;
  auto next_line = [&]() -> const std::pair<int, std::string>* {
    while (i < lines.size() && trim(lines[i].second).empty()) ++i;
    return i < lines.size() ? &lines[i++] : nullptr;
  };
  const auto* head = next_line();
  long long count = parse_int(head->second, head->first, "alternative count");
  if (count < 1) throw parse_error(head->first, "alternative count must be positive");
  d.metadata["NUMBER ALTERNATIVES"] = std::to_string(count);
  for (long long k = 0; k < count; ++k) {
    const auto* row = next_line();
    if (!row) throw parse_error(end_line, "alternative table ended early");
    const std::string t = trim(row->second);
    const size_t comma = t.find(',');
    if (comma == std::string::npos) throw parse_error(row->first, "expected 'id,label'");
    long long id = parse_int(t.substr(0, comma), row->first, "alternative id");
    if (!d.names.emplace(id, trim(t.substr(comma + 1))).second)
      throw parse_error(row->first, "duplicate name for alternative " + std::to_string(id));
  }
  const auto* counts = next_line();
  if (!counts) throw parse_error(end_line, "missing 'voters,sum,unique' header");
  std::vector<long long> cs = parse_int_list(counts->second, counts->first, "count");
  if (cs.size() != 3) throw parse_error(counts->first, "expected 'voters,sum,unique'");
  d.metadata["NUMBER VOTERS"] = std::to_string(cs[0]);
  d.metadata["NUMBER UNIQUE ORDERS"] = std::to_string(cs[2]);
  for (const auto* row = next_line(); row; row = next_line()) {
    std::vector<long long> vals = parse_int_list(trim(row->second), row->first, "entry");
    if (vals.size() < 2) throw parse_error(row->first, "expected 'count,order...'");
    PreflibDocument::OrderLine o;
    o.line = row->first;
    o.mult = vals[0];
    o.ids.assign(vals.begin() + 1, vals.end());
    d.lines.push_back(std::move(o));
  }
  return d;
}

}  // namespace

PreflibDocument parse_preflib_document(const std::string& text, PreflibKind kind) {
  (void)kind;  // both kinds share the layout; completeness is checked later
  const auto lines = split_lines(text);
  const int end_line = lines.empty() ? 1 : lines.back().first;
  size_t first = 0;
  while (first < lines.size() && trim(lines[first].second).empty()) ++first;
  if (first == lines.size()) throw parse_error(end_line, "empty file");
  PreflibDocument d;
  if (trim(lines[first].second)[0] == '#') {
    for (size_t i = first; i < lines.size(); ++i) {
      const std::string t = trim(lines[i].second);
      if (t.empty()) continue;
      if (t[0] == '#')
        parse_header(trim(t.substr(1)), lines[i].first, d);
      else
        d.lines.push_back(parse_order_line(t, lines[i].first));
    }
  } else {
    d = parse_legacy(lines, first, end_line);
  }
  d.end_line = end_line;
  return d;
}

VoteProfile profile_from_document(const PreflibDocument& d, PreflibKind kind,
                                  SoiCompletion completion) {
  std::map<long long, std::string> names = d.names;
  const auto declared = d.metadata.find("NUMBER ALTERNATIVES");
  if (names.empty()) {
    if (declared == d.metadata.end()) throw parse_error(1, "no alternatives declared");
    long long count = parse_int(declared->second, 1, "alternative count");
    if (count < 1) throw parse_error(1, "alternative count must be positive");
    for (long long id = 1; id <= count; ++id) names.emplace(id, std::to_string(id));
  } else if (declared != d.metadata.end() &&
             parse_int(declared->second, 1, "alternative count") !=
                 static_cast<long long>(names.size())) {
    throw parse_error(1, "declared alternative count disagrees with the name table");
  }
  const int n = static_cast<int>(names.size());

  // Dense ids follow ascending external id, so completion order transfers.
  std::map<long long, CandidateId> dense;
  VoteProfile v;
  v.n = n;
  for (const auto& [id, label] : names) {
    dense.emplace(id, static_cast<CandidateId>(dense.size()));
    v.labels.push_back(label);
  }

  if (d.lines.empty()) throw parse_error(d.end_line > 0 ? d.end_line : 1, "no votes");
  std::set<std::pair<CandidateId, CandidateId>> sensitive;
  for (const PreflibDocument::OrderLine& o : d.lines) {
    if (o.mult <= 0) throw parse_error(o.line, "multiplicity must be positive");
    std::vector<CandidateId> order;
    std::vector<char> seen(static_cast<size_t>(n), 0);
    for (long long id : o.ids) {
      const auto f = dense.find(id);
      if (f == dense.end())
        throw parse_error(o.line, "unknown alternative id " + std::to_string(id));
      if (seen[static_cast<size_t>(f->second)])
        throw parse_error(o.line, "repeated alternative id " + std::to_string(id));
      seen[static_cast<size_t>(f->second)] = 1;
      order.push_back(f->second);
    }
    if (kind == PreflibKind::soc && static_cast<int>(order.size()) != n)
      throw parse_error(o.line,
                        "complete order must list all " + std::to_string(n) + " alternatives");
    if (static_cast<int>(order.size()) < n) {
      std::vector<CandidateId> missing;
      for (CandidateId c = 0; c < n; ++c)
        if (!seen[static_cast<size_t>(c)]) missing.push_back(c);
      for (size_t a = 0; a < missing.size(); ++a)
        for (size_t b = a + 1; b < missing.size(); ++b)
          sensitive.emplace(missing[a], missing[b]);
      if (completion == SoiCompletion::descending) std::reverse(missing.begin(), missing.end());
      order.insert(order.end(), missing.begin(), missing.end());
    }
    v.votes.emplace_back(Ranking{std::move(order)}, o.mult);
  }
  v.completion_sensitive.assign(sensitive.begin(), sensitive.end());
  v.validate();
  return v;
}

VoteProfile parse_preflib(const std::string& text, PreflibKind kind, SoiCompletion completion) {
  return profile_from_document(parse_preflib_document(text, kind), kind, completion);
}

std::string serialize_instance(const VoteProfile& v) {
  v.validate();
  if (v.n < 1) throw input_error("cannot serialize an instance without candidates");
  std::ostringstream out;
  out << "# DATA TYPE: soc\n";
  out << "# NUMBER ALTERNATIVES: " << v.n << "\n";
  out << "# NUMBER VOTERS: " << v.total_votes() << "\n";
  out << "# NUMBER UNIQUE ORDERS: " << v.votes.size() << "\n";
  for (int c = 0; c < v.n; ++c)
    out << "# ALTERNATIVE NAME " << (c + 1) << ": "
        << (v.labels.empty() ? std::to_string(c + 1) : v.labels[static_cast<size_t>(c)]) << "\n";
  for (const auto& [r, count] : v.votes) {
    out << count << ": ";
    for (size_t i = 0; i < r.order.size(); ++i) {
      if (i) out << ',';
      out << (r.order[i] + 1);
    }
    out << "\n";
  }
  return out.str();
}

VoteProfile mallows_sample(const MallowsParams& p) {
  if (p.n < 1) throw input_error("mallows: n must be positive");
  if (p.m < 1) throw input_error("mallows: m must be positive");
  if (!(p.theta > 0.0) || p.theta > 1.0) throw input_error("mallows: theta must lie in (0, 1]");
  Ranking center = p.center;
  if (center.order.empty()) {
    center.order.resize(static_cast<size_t>(p.n));
    std::iota(center.order.begin(), center.order.end(), 0);
  } else if (center.size() != p.n) {
    throw input_error("mallows: center size disagrees with n");
  } else {
    center = Ranking::of(std::move(center.order));
  }

  // theta^0 .. theta^(n-1) and their prefix sums, built by plain products so
  // the doubles come out identical on every platform.
  std::vector<double> pw(static_cast<size_t>(p.n), 1.0);
  for (size_t k = 1; k < pw.size(); ++k) pw[k] = pw[k - 1] * p.theta;
  std::vector<double> zsum(static_cast<size_t>(p.n) + 1, 0.0);
  for (size_t k = 0; k < pw.size(); ++k) zsum[k + 1] = zsum[k] + pw[k];

  SplitMix64 rng(p.seed);
  std::map<Ranking, long long> agg;
  std::vector<CandidateId> vote;
  for (long long draw = 0; draw < p.m; ++draw) {
    vote.clear();
    for (int i = 1; i <= p.n; ++i) {
      // Position j in 1..i carries weight theta^(i-j); j = i appends and adds
      // no disagreement with the center.
      double u = rng.unit() * zsum[static_cast<size_t>(i)];
      int pos = i;
      for (int j = 1; j <= i; ++j) {
        u -= pw[static_cast<size_t>(i - j)];
        if (u < 0.0) {
          pos = j;
          break;
        }
      }
      vote.insert(vote.begin() + (pos - 1), center.order[static_cast<size_t>(i - 1)]);
    }
    ++agg[Ranking{vote}];
  }

  VoteProfile v;
  v.n = p.n;
  v.votes.assign(agg.begin(), agg.end());
  std::sort(v.votes.begin(), v.votes.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  for (int c = 0; c < p.n; ++c) v.labels.push_back(std::to_string(c + 1));
  return v;
}

std::string serialize_report(const ReductionReport& r, bool with_timing) {
  nlohmann::ordered_json j;
  j["rule"] = r.rule;
  j["n"] = r.n;
  j["m"] = r.m;
  j["threshold"] = r.threshold;
  j["pairs_total"] = static_cast<long long>(r.n) * (r.n - 1) / 2;
  j["pairs_solved"] = r.solved_pairs.size();
  j["positions_solved"] = r.solved_positions.size();
  j["solved_count"] = r.solved_count;
  j["iterations"] = r.iterations;
  j["rounds"] = r.rounds;
  j["round_increments"] = r.round_increments;
  auto pairs = nlohmann::ordered_json::array();
  for (const auto& [x, y] : r.solved_pairs.pairs())
    pairs.push_back(nlohmann::ordered_json::array({x, y}));
  j["pairs"] = std::move(pairs);
  auto positions = nlohmann::ordered_json::object();
  for (const auto& [c, pos] : r.solved_positions) positions[std::to_string(c)] = pos;
  j["positions"] = std::move(positions);
  if (r.partial) {
    nlohmann::ordered_json part;
    part["fixed"] = r.partial->fixed;
    part["blocks"] = r.partial->blocks;
    j["partial"] = std::move(part);
  } else {
    j["partial"] = nullptr;
  }
  if (with_timing) j["elapsed_ms"] = r.elapsed_ms;
  return j.dump(2) + "\n";
}

std::string csv_header(bool with_certified) {
  std::string h = "n,m,theta,rule,pairs_total,pairs_solved,positions_solved,rounds,millis";
  if (with_certified) h += ",certified";
  return h + "\n";
}

std::string csv_row(const ReductionReport& r, const std::string& theta, bool with_timing,
                    std::optional<bool> certified) {
  std::ostringstream out;
  out << r.n << ',' << r.m << ',' << theta << ',' << r.rule << ','
      << static_cast<long long>(r.n) * (r.n - 1) / 2 << ',' << r.solved_pairs.size() << ','
      << r.solved_positions.size() << ',' << r.rounds << ',';
  if (with_timing) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3f", r.elapsed_ms);
    out << buf;
  }
  if (certified.has_value()) out << ',' << (*certified ? "true" : "false");
  out << '\n';
  return out.str();
}

}  // namespace kemeny
