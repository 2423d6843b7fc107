#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "kemeny/core.hpp"
#include "kemeny/rational.hpp"

namespace kemeny {

// Certificate that a candidate's exact position is forced: everyone in
// `left` is ranked before it and everyone in `right` after it, in every
// median. alpha bounds the support of left-side arcs, beta the right side.
struct NonDirtyCert {
  CandidateId candidate = 0;
  Rational alpha;
  Rational beta;
  std::vector<CandidateId> left;
  std::vector<CandidateId> right;
};

// Multiset of candidates lying strictly between u and v (in that order)
// across the votes: mult[z] = number of votes with u > z > v.
struct InferenceSets {
  CandidateId u = 0;
  CandidateId v = 0;
  std::map<CandidateId, long long> mult;

  long long total() const;
};

// F(alpha) = sum over terms (d_yz, d_zx) of max(0, alpha*d_yz + (1-alpha)*d_zx),
// a convex piecewise-linear function on [0, 1] in count scale.
struct PenaltyFunction {
  std::vector<std::pair<long long, long long>> terms;

  Rational eval(const Rational& alpha) const;
};

struct PenaltyMin {
  Rational value;
  Rational alpha;
};

// Outcome of one reduction rule on one instance. solved_pairs is always
// transitively closed; solved_positions holds only candidates whose exact
// median position is certified.
struct ReductionReport {
  std::string rule;
  int n = 0;
  long long m = 0;
  int threshold = 0;
  SolvedRelation solved_pairs;
  std::map<CandidateId, int> solved_positions;
  std::optional<PartialResult> partial;
  // For the recursive rules: certified candidates plus members of blocks
  // small enough for an exact back-end (the statistic the partial is for).
  int solved_count = 0;
  int iterations = 0;               // productive scan passes (pair rules)
  int rounds = 0;                   // full alternation rounds (combined)
  std::vector<int> round_increments;
  double elapsed_ms = 0.0;
};

enum class ScanOrder { ascending, descending };

// Closed relation snapshot taken after each scan pass; consecutive entries
// form a subset chain.
struct AbMotTrace {
  std::vector<SolvedRelation> after_pass;
};

// For each pass, the exclusion-filtered between-sets in effect while that
// pass scanned: passes[i][u*n + v] maps z to its surviving multiplicity in
// the (u, v) set. Multiplicities never grow from one pass to the next.
struct MotTrace {
  int n = 0;
  std::vector<std::vector<std::map<CandidateId, long long>>> passes;
};

// Fixed three-quarters threshold rule: a candidate splits its block when
// every pairwise margin against the block clears half the vote count in one
// direction; recursion stops at blocks of size <= threshold.
ReductionReport betzler34(const MajorityGraph& g, int threshold);

// Margin-derived support bounds for x against everyone else in a: alpha from
// the candidates beating or tying x, beta from those x beats or ties. An
// empty side has no constraint and yields 1.
std::pair<Rational, Rational> support_bounds(CandidateId x, const std::vector<CandidateId>& a,
                                             const MajorityGraph& g);

// Certificate test within sub-election a (|a| >= 3): with p = |a| - 2, x
// splits a iff both alpha + (p+1)/p * beta and beta + (p+1)/p * alpha exceed
// 3/2 + 1/(2p), exactly. One inequality per direction of x's pairs; either
// alone leaves the other direction unprotected.
std::optional<NonDirtyCert> good_ab_candidate(CandidateId x, const std::vector<CandidateId>& a,
                                              const MajorityGraph& g);

// Adaptive-threshold recursive split. Every certified candidate of a block is
// fixed at once (their before-sets always chain), so the output is identical
// for both scan orders and commutes with candidate relabeling; the order
// parameter only changes the iteration sequence.
ReductionReport ab_majority(const MajorityGraph& g, int threshold,
                            ScanOrder order = ScanOrder::ascending);

// Pair rule driven by certified position bounds: if x sits among the first
// p+1 candidates in every median (p from certified successors) and its
// support bounds clear alpha + (p+1)/p * beta > 3/2 + 1/(2p), then x beats
// every candidate it leads on margin; the last-p+1 direction uses the same
// test with alpha and beta swapped. The bounds ignore candidates already
// solved onto the far side of x. Returns the closure of the input plus
// everything derived.
SolvedRelation positional_refine(const MajorityGraph& g, const SolvedRelation& solved);

InferenceSets inference_sets(const VoteProfile& v, CandidateId u, CandidateId w);

// One between-set comparison pass: (x, y) is certified when the margin
// exceeds the multiset difference |E_yx \ E_xy|. Returns the closure.
SolvedRelation mot(const VoteProfile& v);

// Repeats between-set passes, discarding from each set the candidates whose
// certified relation proves they cannot lie between the endpoints; stops when
// a pass certifies nothing new.
SolvedRelation iterated_mot(const VoteProfile& v, MotTrace* trace = nullptr,
                            int* iterations = nullptr);

PenaltyFunction pairwise_penalty(CandidateId x, CandidateId y, const std::vector<CandidateId>& z,
                                 const MajorityGraph& g);

// Exact minimum of the penalty over alpha in [0, 1], found on the breakpoint
// set {0, 1} and the per-term sign-change points; ties break toward the
// smallest alpha.
PenaltyMin minimize_pairwise_penalty(CandidateId x, CandidateId y,
                                     const std::vector<CandidateId>& z, const MajorityGraph& g);

// Pair rule on the weighted graph alone: (x, y) is certified when D_xy
// strictly exceeds the minimized penalty over the candidates not yet placed
// left of y or right of x. Scans run against a frozen snapshot, additions
// merge at the pass barrier, and the relation closes between passes.
// max_passes = 0 means run to fixpoint; seed pairs are taken as certified.
SolvedRelation ab_mot(const MajorityGraph& g, const SolvedRelation* seed = nullptr,
                      int max_passes = 0, AbMotTrace* trace = nullptr, int* iterations = nullptr);

// Pins every certified pair's arc at the full vote count; the median set of
// the result equals that of the input graph.
MajorityGraph update_graph(const MajorityGraph& g, const SolvedRelation& solved);

// Alternates the pair rule, the recursive split, and (unless disabled) the
// positional rule until a full round certifies nothing new. All steps read
// the real margins; the accumulated relation feeds back as exclusions that
// loosen the support bounds and shrink the penalty sets.
ReductionReport combined_reduce(const VoteProfile& v, int threshold, bool positional = true);

// Uniform entry point for the command-line driver and the test batteries.
// rule is one of: betzler34, ab-majority, mot, iterated-mot, ab-mot, combined.
ReductionReport run_rule(const std::string& rule, const VoteProfile& v, int threshold);

const std::vector<std::string>& rule_names();

}  // namespace kemeny
