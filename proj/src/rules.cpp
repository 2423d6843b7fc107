#include "kemeny/rules.hpp"

#include <algorithm>
#include <chrono>
#include <functional>
#include <numeric>
#include <set>

namespace kemeny {

namespace {

std::vector<CandidateId> all_candidates(int n) {
  std::vector<CandidateId> a(static_cast<size_t>(n));
  std::iota(a.begin(), a.end(), 0);
  return a;
}

void require_votes(const MajorityGraph& g) {
  if (g.m <= 0) throw input_error("rule requires a profile with at least one vote");
}

// A certified split of a block: everything in `before` precedes x, which
// precedes everything in `after`, in every median.
struct Split {
  CandidateId x;
  std::vector<CandidateId> before;
  std::vector<CandidateId> after;
};

using CertFinder = std::function<std::vector<Split>(const std::vector<CandidateId>&)>;

// Fixes every certified candidate of the block at once. Each certificate pins
// a median-invariant position, so the before-sets of a block's certificates
// must form a strict chain; the output is therefore independent of scan order
// and of candidate labels, which a pick-one recursion is not.
void recurse_blocks(std::vector<CandidateId> a, int threshold, const CertFinder& find,
                    PartialResult& out) {
  if (static_cast<int>(a.size()) <= threshold) {
    out.blocks.push_back(std::move(a));
    return;
  }
  std::vector<Split> certs = find(a);
  if (certs.empty()) {
    out.blocks.push_back(std::move(a));
    return;
  }
  std::sort(certs.begin(), certs.end(),
            [](const Split& l, const Split& r) { return l.before.size() < r.before.size(); });
  std::set<CandidateId> prev;
  std::vector<std::vector<CandidateId>> gaps;
  for (const Split& s : certs) {
    std::set<CandidateId> cur(s.before.begin(), s.before.end());
    if (cur.size() != s.before.size() || prev.count(s.x) ||
        !std::includes(cur.begin(), cur.end(), prev.begin(), prev.end()))
      throw internal_inconsistency_error("conflicting position certificates in one block");
    std::vector<CandidateId> gap;
    for (CandidateId z : s.before)
      if (!prev.count(z)) gap.push_back(z);
    std::sort(gap.begin(), gap.end());
    gaps.push_back(std::move(gap));
    prev = std::move(cur);
    prev.insert(s.x);
  }
  std::vector<CandidateId> tail;
  for (CandidateId z : a)
    if (!prev.count(z)) tail.push_back(z);
  std::sort(tail.begin(), tail.end());
  gaps.push_back(std::move(tail));
  for (size_t i = 0; i < gaps.size(); ++i) {
    recurse_blocks(std::move(gaps[i]), threshold, find, out);
    if (i < certs.size()) out.fixed.push_back(certs[i].x);
  }
}

// All pairs crossing segment boundaries of the decomposition
// B0 f0 B1 f1 ... Bk. Transitively closed by construction, so every fixed
// candidate is related to every other candidate.
SolvedRelation decomposition_pairs(const PartialResult& p, int n) {
  SolvedRelation r(n);
  std::vector<CandidateId> earlier;
  auto emit = [&](const std::vector<CandidateId>& seg) {
    for (CandidateId u : earlier)
      for (CandidateId v : seg) r.add(u, v);
    earlier.insert(earlier.end(), seg.begin(), seg.end());
  };
  for (size_t i = 0; i < p.blocks.size(); ++i) {
    emit(p.blocks[i]);
    if (i < p.fixed.size()) emit({p.fixed[i]});
  }
  return r;
}

ReductionReport recursion_report(std::string rule, const MajorityGraph& g, int threshold,
                                 const CertFinder& find) {
  require_votes(g);
  if (threshold < 2) throw input_error("threshold must be at least 2");
  PartialResult partial;
  recurse_blocks(all_candidates(g.n), threshold, find, partial);
  ReductionReport r;
  r.rule = std::move(rule);
  r.n = g.n;
  r.m = g.m;
  r.threshold = threshold;
  r.solved_pairs = decomposition_pairs(partial, g.n);
  r.solved_positions = partial.fixed_positions();
  r.solved_count = static_cast<int>(partial.counted_candidates(threshold).size());
  r.partial = std::move(partial);
  return r;
}

// Exact test of alpha + (p+1)/p * beta > 3/2 + 1/(2p). Guarantees only that
// x's majority wins hold in every median; x's majority losses need the same
// test with alpha and beta swapped. The condition is asymmetric, so one
// direction can hold without the other.
bool certificate_condition(const Rational& alpha, const Rational& beta, long long p) {
  return alpha + Rational(p + 1, p) * beta > Rational(3, 2) + Rational(1, 2 * p);
}

// z -> multiplicity cube: cube[(u*n + z)*n + v] counts votes with u > z > v.
std::vector<long long> between_cube(const VoteProfile& v) {
  const size_t n = static_cast<size_t>(v.n);
  std::vector<long long> cube(n * n * n, 0);
  for (const auto& [vote, count] : v.votes) {
    const auto& o = vote.order;
    for (size_t i = 0; i < n; ++i)
      for (size_t j = i + 1; j < n; ++j)
        for (size_t k = j + 1; k < n; ++k)
          cube[(static_cast<size_t>(o[i]) * n + static_cast<size_t>(o[j])) * n +
               static_cast<size_t>(o[k])] += count;
  }
  return cube;
}

}  // namespace

long long InferenceSets::total() const {
  long long s = 0;
  for (const auto& [z, c] : mult) s += c;
  return s;
}

InferenceSets inference_sets(const VoteProfile& v, CandidateId u, CandidateId w) {
  if (u == w) throw input_error("between-set endpoints must differ");
  v.validate();
  InferenceSets out;
  out.u = u;
  out.v = w;
  for (const auto& [vote, count] : v.votes) {
    const std::vector<int> pos = vote.positions();
    int pu = pos[static_cast<size_t>(u)], pw = pos[static_cast<size_t>(w)];
    if (pu >= pw) continue;
    for (CandidateId z = 0; z < v.n; ++z) {
      if (z == u || z == w) continue;
      int pz = pos[static_cast<size_t>(z)];
      if (pu < pz && pz < pw) out.mult[z] += count;
    }
  }
  return out;
}

std::pair<Rational, Rational> support_bounds(CandidateId x, const std::vector<CandidateId>& a,
                                             const MajorityGraph& g) {
  require_votes(g);
  bool has_in = false, has_out = false;
  long long min_in = 0, min_out = 0;
  for (CandidateId z : a) {
    if (z == x) continue;
    long long dzx = g.at(z, x);
    if (dzx >= 0) {
      min_in = has_in ? std::min(min_in, dzx) : dzx;
      has_in = true;
    }
    long long dxz = g.at(x, z);
    if (dxz >= 0) {
      min_out = has_out ? std::min(min_out, dxz) : dxz;
      has_out = true;
    }
  }
  // Support of an arc with margin d is (m + d) / 2m; no constraining arc
  // means the strongest possible bound.
  Rational alpha = has_in ? Rational(g.m + min_in, 2 * g.m) : Rational(1);
  Rational beta = has_out ? Rational(g.m + min_out, 2 * g.m) : Rational(1);
  return {alpha, beta};
}

namespace {

// Support bounds for x split by the direction they protect. The win pair
// ranges over candidates not already solved after x (only those can precede
// x in a median violating one of x's majority wins); the loss pair ranges
// over candidates not already solved before x. Solved pairs therefore loosen
// the minima without touching any real margin.
struct DirectedSupport {
  Rational win_alpha, win_beta;
  Rational loss_alpha, loss_beta;
};

DirectedSupport directed_support(CandidateId x, const std::vector<CandidateId>& a,
                                 const MajorityGraph& g, const SolvedRelation* w) {
  long long mins[4] = {0, 0, 0, 0};
  bool has[4] = {false, false, false, false};
  auto feed = [&](int slot, long long d) {
    if (d < 0) return;
    if (!has[slot] || d < mins[slot]) mins[slot] = d;
    has[slot] = true;
  };
  for (CandidateId z : a) {
    if (z == x) continue;
    const long long dzx = g.at(z, x);
    const long long dxz = g.at(x, z);
    if (!w || !w->contains(x, z)) {
      feed(0, dzx);
      feed(1, dxz);
    }
    if (!w || !w->contains(z, x)) {
      feed(2, dzx);
      feed(3, dxz);
    }
  }
  auto bound = [&](int slot) {
    // Support of an arc with margin d is (m + d) / 2m; no constraining arc
    // means the strongest possible bound.
    return has[slot] ? Rational(g.m + mins[slot], 2 * g.m) : Rational(1);
  };
  return {bound(0), bound(1), bound(2), bound(3)};
}

// Certificate test with already-solved pairs taken into account; a null
// relation gives the plain rule. Fixing x's position needs both directions
// certified: the stated condition on the win-direction bounds and the
// swapped condition on the loss-direction bounds.
std::optional<NonDirtyCert> cert_with_seed(CandidateId x, const std::vector<CandidateId>& a,
                                           const MajorityGraph& g, const SolvedRelation* w) {
  if (a.size() < 3) throw input_error("certificate test needs at least 3 candidates");
  const long long p = static_cast<long long>(a.size()) - 2;
  const DirectedSupport s = directed_support(x, a, g, w);
  if (!certificate_condition(s.win_alpha, s.win_beta, p) ||
      !certificate_condition(s.loss_beta, s.loss_alpha, p))
    return std::nullopt;
  NonDirtyCert cert;
  cert.candidate = x;
  cert.alpha = s.win_alpha;
  cert.beta = s.win_beta;
  for (CandidateId z : a) {
    if (z == x) continue;
    bool left;
    if (w && w->contains(z, x))
      left = true;
    else if (w && w->contains(x, z))
      left = false;
    else
      left = g.at(z, x) > 0;
    (left ? cert.left : cert.right).push_back(z);
  }
  return cert;
}

ReductionReport ab_majority_seeded(const MajorityGraph& g, int threshold, ScanOrder order,
                                   const SolvedRelation* w) {
  CertFinder find = [&g, order, w](const std::vector<CandidateId>& a) {
    std::vector<CandidateId> scan = a;
    if (order == ScanOrder::descending) std::reverse(scan.begin(), scan.end());
    std::vector<Split> found;
    for (CandidateId x : scan)
      if (auto cert = cert_with_seed(x, a, g, w))
        found.push_back(Split{x, std::move(cert->left), std::move(cert->right)});
    return found;
  };
  return recursion_report("ab-majority", g, threshold, find);
}

}  // namespace

std::optional<NonDirtyCert> good_ab_candidate(CandidateId x, const std::vector<CandidateId>& a,
                                              const MajorityGraph& g) {
  return cert_with_seed(x, a, g, nullptr);
}

ReductionReport betzler34(const MajorityGraph& g, int threshold) {
  CertFinder find = [&g](const std::vector<CandidateId>& a) {
    std::vector<Split> found;
    for (CandidateId x : a) {
      Split s{x, {}, {}};
      bool ok = true;
      for (CandidateId z : a) {
        if (z == x) continue;
        if (2 * g.at(z, x) >= g.m)
          s.before.push_back(z);
        else if (2 * g.at(x, z) >= g.m)
          s.after.push_back(z);
        else {
          ok = false;
          break;
        }
      }
      if (ok) found.push_back(std::move(s));
    }
    return found;
  };
  return recursion_report("betzler34", g, threshold, find);
}

ReductionReport ab_majority(const MajorityGraph& g, int threshold, ScanOrder order) {
  return ab_majority_seeded(g, threshold, order, nullptr);
}

SolvedRelation positional_refine(const MajorityGraph& g, const SolvedRelation& solved) {
  require_votes(g);
  if (solved.n() != g.n) throw input_error("relation size differs from graph");
  const int n = g.n;
  SolvedRelation out = solved;
  const std::vector<CandidateId> all = all_candidates(n);
  for (CandidateId x = 0; x < n; ++x) {
    const DirectedSupport s = directed_support(x, all, g, &solved);
    // Known successors cap how many candidates can precede x in any median;
    // known predecessors cap the other side.
    long long p_first = n - 1 - solved.succ_count(x);
    long long p_last = n - 1 - solved.pred_count(x);
    if (p_first >= 1 && certificate_condition(s.win_alpha, s.win_beta, p_first)) {
      for (CandidateId y = 0; y < n; ++y)
        if (y != x && g.at(x, y) > 0) out.add(x, y);
    }
    if (p_last >= 1 && certificate_condition(s.loss_beta, s.loss_alpha, p_last)) {
      for (CandidateId y = 0; y < n; ++y)
        if (y != x && g.at(y, x) > 0) out.add(y, x);
    }
  }
  out.close();
  return out;
}

namespace {

// Shared driver for the between-set passes. With exclusions disabled it is a
// single plain pass; otherwise passes repeat until nothing new certifies.
SolvedRelation between_set_passes(const VoteProfile& v, bool exclude, int max_passes,
                                  MotTrace* trace, int* iterations) {
  v.validate();
  const int n = v.n;
  const size_t un = static_cast<size_t>(n);
  const PairTally t = tally(v);
  const std::vector<long long> cube = between_cube(v);
  auto base = [&](CandidateId u, CandidateId z, CandidateId w) {
    return cube[(static_cast<size_t>(u) * un + static_cast<size_t>(z)) * un +
                static_cast<size_t>(w)];
  };
  SolvedRelation w(n);
  if (trace) {
    trace->n = n;
    trace->passes.clear();
  }
  int productive = 0;
  for (int pass = 0; max_passes == 0 || pass < max_passes; ++pass) {
    const SolvedRelation snap = w;
    // z survives in the (u, v) set only if it could still sit between u and
    // v in some median: nothing certified places it before u or after v.
    auto survives = [&](CandidateId z, CandidateId u, CandidateId v) {
      return !exclude || (!snap.contains(z, u) && !snap.contains(v, z));
    };
    if (trace) {
      std::vector<std::map<CandidateId, long long>> sets(un * un);
      for (CandidateId u = 0; u < n; ++u)
        for (CandidateId vv = 0; vv < n; ++vv) {
          if (u == vv) continue;
          for (CandidateId z = 0; z < n; ++z) {
            if (z == u || z == vv) continue;
            long long c = base(u, z, vv);
            if (c > 0 && survives(z, u, vv))
              sets[static_cast<size_t>(u) * un + static_cast<size_t>(vv)][z] = c;
          }
        }
      trace->passes.push_back(std::move(sets));
    }
    std::vector<std::pair<CandidateId, CandidateId>> additions;
    for (CandidateId x = 0; x < n; ++x)
      for (CandidateId y = 0; y < n; ++y) {
        if (x == y || snap.contains(x, y)) continue;
        long long d = t.at(x, y) - t.at(y, x);
        if (d <= 0) continue;
        long long diff = 0;
        for (CandidateId z = 0; z < n; ++z) {
          if (z == x || z == y) continue;
          long long yx = survives(z, y, x) ? base(y, z, x) : 0;
          long long xy = survives(z, x, y) ? base(x, z, y) : 0;
          diff += std::max(0ll, yx - xy);
        }
        if (d > diff) additions.emplace_back(x, y);
      }
    if (additions.empty()) break;
    for (const auto& [x, y] : additions) w.add(x, y);
    w.close();
    ++productive;
  }
  if (iterations) *iterations = productive;
  return w;
}

}  // namespace

SolvedRelation mot(const VoteProfile& v) {
  return between_set_passes(v, false, 1, nullptr, nullptr);
}

SolvedRelation iterated_mot(const VoteProfile& v, MotTrace* trace, int* iterations) {
  return between_set_passes(v, true, 0, trace, iterations);
}

Rational PenaltyFunction::eval(const Rational& alpha) const {
  // F(p/q) = sum(max(0, p*d_yz + (q-p)*d_zx)) / q, all integer.
  int128 p = alpha.num, q = alpha.den;
  int128 sum = 0;
  for (const auto& [dyz, dzx] : terms) {
    int128 val = p * dyz + (q - p) * dzx;
    if (val > 0) sum += val;
  }
  return Rational(sum, q);
}

PenaltyFunction pairwise_penalty(CandidateId x, CandidateId y, const std::vector<CandidateId>& z,
                                 const MajorityGraph& g) {
  PenaltyFunction f;
  f.terms.reserve(z.size());
  for (CandidateId c : z) {
    if (c == x || c == y) throw input_error("penalty set must exclude the pair itself");
    f.terms.emplace_back(g.at(y, c), g.at(c, x));
  }
  return f;
}

PenaltyMin minimize_pairwise_penalty(CandidateId x, CandidateId y,
                                     const std::vector<CandidateId>& z, const MajorityGraph& g) {
  PenaltyFunction f = pairwise_penalty(x, y, z, g);
  PenaltyMin best{f.eval(Rational(0)), Rational(0)};
  auto consider = [&](const Rational& a) {
    Rational val = f.eval(a);
    if (val < best.value || (val == best.value && a < best.alpha)) best = {val, a};
  };
  consider(Rational(1));
  for (const auto& [dyz, dzx] : f.terms) {
    // A term changes sign inside (0, 1) only when its endpoints disagree.
    if ((dyz < 0) == (dzx < 0) || dyz == 0 || dzx == 0) continue;
    consider(Rational(dzx, static_cast<int128>(dzx) - dyz));
  }
  return best;
}

SolvedRelation ab_mot(const MajorityGraph& g, const SolvedRelation* seed, int max_passes,
                      AbMotTrace* trace, int* iterations) {
  const int n = g.n;
  SolvedRelation w = seed ? *seed : SolvedRelation(n);
  if (seed) {
    if (seed->n() != n) throw input_error("seed relation size differs from graph");
    w.close();
  }
  if (trace) trace->after_pass.clear();
  int productive = 0;
  for (int pass = 0; max_passes == 0 || pass < max_passes; ++pass) {
    const SolvedRelation snap = w;
    std::vector<std::pair<CandidateId, CandidateId>> additions;
    std::vector<CandidateId> zset;
    for (CandidateId x = 0; x < n; ++x)
      for (CandidateId y = 0; y < n; ++y) {
        if (x == y || g.at(x, y) <= 0 || snap.contains(x, y)) continue;
        zset.clear();
        for (CandidateId z = 0; z < n; ++z) {
          if (z == x || z == y) continue;
          // Candidates certified before y or after x cannot separate them.
          if (snap.contains(z, y) || snap.contains(x, z)) continue;
          zset.push_back(z);
        }
        if (Rational(g.at(x, y)) > minimize_pairwise_penalty(x, y, zset, g).value)
          additions.emplace_back(x, y);
      }
    if (additions.empty()) {
      if (trace) trace->after_pass.push_back(w);
      break;
    }
    for (const auto& [x, y] : additions) w.add(x, y);
    w.close();
    ++productive;
    if (trace) trace->after_pass.push_back(w);
  }
  if (iterations) *iterations = productive;
  return w;
}

MajorityGraph update_graph(const MajorityGraph& g, const SolvedRelation& solved) {
  if (solved.n() != g.n) throw input_error("relation size differs from graph");
  MajorityGraph out = g;
  for (const auto& [x, y] : solved.pairs()) {
    out.at(x, y) = g.m;
    out.at(y, x) = -g.m;
  }
  return out;
}

ReductionReport combined_reduce(const VoteProfile& v, int threshold, bool positional) {
  v.validate();
  if (threshold < 2) throw input_error("threshold must be at least 2");
  const MajorityGraph g0 = graph_from_tally(tally(v));
  require_votes(g0);
  const int n = g0.n;

  ReductionReport r;
  r.rule = "combined";
  r.n = n;
  r.m = g0.m;
  r.threshold = threshold;

  // Every step reads the real margins: the certificate bounds rely on vote
  // counts that pinned margins would fake. Solved pairs feed back in as
  // exclusions instead, which is what makes later rounds stronger.
  SolvedRelation w(n);
  const int max_rounds = n * (n - 1) / 2 + 1;
  for (int round = 1; round <= max_rounds; ++round) {
    const int before = w.size();
    w = ab_mot(g0, &w);

    ReductionReport split = ab_majority_seeded(g0, threshold, ScanOrder::ascending, &w);
    r.partial = split.partial;
    w.merge(split.solved_pairs);
    w.close();

    if (positional) w = positional_refine(g0, w);

    r.rounds = round;
    r.round_increments.push_back(w.size() - before);
    if (w.size() == before) break;
  }
  r.solved_pairs = w;
  r.solved_positions = positions_from_relation(w);
  r.solved_count = static_cast<int>(r.solved_positions.size());
  return r;
}

const std::vector<std::string>& rule_names() {
  static const std::vector<std::string> names = {"betzler34", "ab-majority", "mot",
                                                 "iterated-mot", "ab-mot", "combined"};
  return names;
}

ReductionReport run_rule(const std::string& rule, const VoteProfile& v, int threshold) {
  v.validate();
  const auto start = std::chrono::steady_clock::now();
  ReductionReport r;
  if (rule == "betzler34" || rule == "ab-majority" || rule == "combined") {
    if (rule == "combined")
      r = combined_reduce(v, threshold);
    else {
      const MajorityGraph g = graph_from_tally(tally(v));
      r = rule == "betzler34" ? betzler34(g, threshold) : ab_majority(g, threshold);
    }
  } else if (rule == "mot" || rule == "iterated-mot") {
    int iters = 0;
    r.solved_pairs = rule == "mot" ? mot(v) : iterated_mot(v, nullptr, &iters);
    r.iterations = rule == "mot" ? (r.solved_pairs.size() > 0 ? 1 : 0) : iters;
  } else if (rule == "ab-mot") {
    const MajorityGraph g = graph_from_tally(tally(v));
    int iters = 0;
    r.solved_pairs = ab_mot(g, nullptr, 0, nullptr, &iters);
    r.iterations = iters;
  } else {
    throw input_error("unknown rule: " + rule);
  }
  r.rule = rule;
  r.n = v.n;
  r.m = v.total_votes();
  if (r.solved_positions.empty()) r.solved_positions = positions_from_relation(r.solved_pairs);
  r.elapsed_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return r;
}

}  // namespace kemeny
