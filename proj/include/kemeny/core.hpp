#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "kemeny/rational.hpp"

namespace kemeny {

using CandidateId = int;

// Invalid inputs (dimension mismatches, bad parameters).
struct input_error : std::runtime_error {
  explicit input_error(const std::string& msg) : std::runtime_error(msg) {}
};

// Malformed instance file; line is 1-based.
struct parse_error : std::runtime_error {
  int line;
  parse_error(int line_, const std::string& msg)
      : std::runtime_error("line " + std::to_string(line_) + ": " + msg), line(line_) {}
};

// A certified relation cycled: a soundness bug, never a user error.
struct internal_inconsistency_error : std::logic_error {
  explicit internal_inconsistency_error(const std::string& msg) : std::logic_error(msg) {}
};

// The exact oracle refuses instances it cannot enumerate.
struct oracle_guard_error : input_error {
  explicit oracle_guard_error(const std::string& msg) : input_error(msg) {}
};

// A strict total order over [0, n), best first.
struct Ranking {
  std::vector<CandidateId> order;

  Ranking() = default;
  explicit Ranking(std::vector<CandidateId> o) : order(std::move(o)) {}

  // Checked constructor: rejects anything that is not a permutation of [0, n).
  static Ranking of(std::vector<CandidateId> o);

  int size() const { return static_cast<int>(order.size()); }
  // positions[c] = rank of candidate c (0 = first).
  std::vector<int> positions() const;

  friend bool operator==(const Ranking& a, const Ranking& b) { return a.order == b.order; }
  friend bool operator<(const Ranking& a, const Ranking& b) { return a.order < b.order; }
};

// Votes with multiplicities over n candidates. Labels map dense ids back to
// the external alternative names of the source file.
struct VoteProfile {
  int n = 0;
  std::vector<std::pair<Ranking, long long>> votes;
  std::vector<std::string> labels;
  // Unordered pairs whose tally depends on the completion convention used for
  // incomplete votes (both candidates missing from some vote's prefix).
  std::vector<std::pair<CandidateId, CandidateId>> completion_sensitive;

  long long total_votes() const;
  void validate() const;

  friend bool operator==(const VoteProfile& a, const VoteProfile& b) {
    return a.n == b.n && a.votes == b.votes && a.labels == b.labels;
  }
};

// before[x][y] = number of votes (with multiplicity) ranking x ahead of y.
struct PairTally {
  int n = 0;
  long long m = 0;
  std::vector<long long> before;  // n*n, row-major

  long long at(CandidateId x, CandidateId y) const { return before[static_cast<size_t>(x) * n + y]; }
  long long& at(CandidateId x, CandidateId y) { return before[static_cast<size_t>(x) * n + y]; }
};

// Antisymmetric margin matrix in count scale: margin(x,y) = before(x,y) - before(y,x).
// May hold updated arcs at +/-m that no profile realizes (general weighted tournament).
struct MajorityGraph {
  int n = 0;
  long long m = 0;
  std::vector<long long> margin;  // n*n, row-major

  long long at(CandidateId x, CandidateId y) const { return margin[static_cast<size_t>(x) * n + y]; }
  long long& at(CandidateId x, CandidateId y) { return margin[static_cast<size_t>(x) * n + y]; }

  friend bool operator==(const MajorityGraph& a, const MajorityGraph& b) {
    return a.n == b.n && a.m == b.m && a.margin == b.margin;
  }
};

// Set of ordered pairs (x, y) certified as "x before y in every median".
// Irreflexive and acyclic; kept as a bit matrix so closure runs word-parallel.
class SolvedRelation {
 public:
  SolvedRelation() = default;
  explicit SolvedRelation(int n);

  int n() const { return n_; }
  int size() const { return count_; }
  bool contains(CandidateId x, CandidateId y) const {
    size_t bit = static_cast<size_t>(x) * n_ + y;
    return (bits_[bit >> 6] >> (bit & 63)) & 1;
  }
  // Returns true if the pair was new. Self-pairs indicate a soundness bug.
  bool add(CandidateId x, CandidateId y);

  // In-place transitive closure; throws internal_inconsistency_error on a cycle.
  void close();

  std::vector<CandidateId> predecessors(CandidateId x) const;
  std::vector<CandidateId> successors(CandidateId x) const;
  int pred_count(CandidateId x) const;
  int succ_count(CandidateId x) const;

  std::vector<std::pair<CandidateId, CandidateId>> pairs() const;
  bool subset_of(const SolvedRelation& other) const;
  void merge(const SolvedRelation& other);

  friend bool operator==(const SolvedRelation& a, const SolvedRelation& b) {
    return a.n_ == b.n_ && a.bits_ == b.bits_;
  }

 private:
  int n_ = 0;
  int count_ = 0;
  std::vector<uint64_t> bits_;
};

// Alternating block/fixed-candidate decomposition: blocks[0], fixed[0],
// blocks[1], fixed[1], ..., blocks[k]. Blocks may be empty; fixed candidates
// have exact positions in every median.
struct PartialResult {
  std::vector<std::vector<CandidateId>> blocks;  // size = fixed.size() + 1
  std::vector<CandidateId> fixed;

  std::map<CandidateId, int> fixed_positions() const;
  // Candidates counted as solved with threshold t: fixed ones plus members of
  // blocks small enough for an exact back-end solver.
  std::vector<CandidateId> counted_candidates(int threshold) const;

  friend bool operator==(const PartialResult& a, const PartialResult& b) {
    return a.blocks == b.blocks && a.fixed == b.fixed;
  }
};

long long kendall_tau(const Ranking& a, const Ranking& b);
long long kendall_tau_profile(const Ranking& r, const VoteProfile& v);
PairTally tally(const VoteProfile& v);
MajorityGraph graph_from_tally(const PairTally& t);
SolvedRelation transitive_closure(const SolvedRelation& r);
std::vector<CandidateId> predecessors(CandidateId x, const SolvedRelation& r);
std::vector<CandidateId> successors(CandidateId x, const SolvedRelation& r);

// Mean Kendall-tau distance over unordered pairs of vote instances, exact.
Rational avg_distance(const VoteProfile& v);

// Kemeny score of r against the tally: sum over pairs ordered (a, b) in r of
// before(b, a).
long long score_from_tally(const Ranking& r, const PairTally& t);

// Candidates related to every other candidate get an exact position |pred|.
std::map<CandidateId, int> positions_from_relation(const SolvedRelation& r);

}  // namespace kemeny
