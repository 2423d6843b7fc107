#include "kemeny/core.hpp"

#include <algorithm>
#include <numeric>

namespace kemeny {

std::string to_string(int128 v) {
  if (v == 0) return "0";
  bool neg = v < 0;
  // Negate digit-wise to survive INT128_MIN.
  std::string s;
  while (v != 0) {
    int d = static_cast<int>(v % 10);
    if (d < 0) d = -d;
    s.push_back(static_cast<char>('0' + d));
    v /= 10;
  }
  if (neg) s.push_back('-');
  std::reverse(s.begin(), s.end());
  return s;
}

std::string Rational::str() const {
  if (den == 1) return to_string(num);
  return to_string(num) + "/" + to_string(den);
}

Ranking Ranking::of(std::vector<CandidateId> o) {
  const int n = static_cast<int>(o.size());
  std::vector<char> seen(static_cast<size_t>(n), 0);
  for (CandidateId c : o) {
    if (c < 0 || c >= n) throw input_error("ranking entry " + std::to_string(c) + " out of range");
    if (seen[static_cast<size_t>(c)]) throw input_error("ranking repeats candidate " + std::to_string(c));
    seen[static_cast<size_t>(c)] = 1;
  }
  return Ranking(std::move(o));
}

std::vector<int> Ranking::positions() const {
  std::vector<int> pos(order.size());
  for (int i = 0; i < size(); ++i) pos[static_cast<size_t>(order[static_cast<size_t>(i)])] = i;
  return pos;
}

long long VoteProfile::total_votes() const {
  long long m = 0;
  for (const auto& [r, c] : votes) m += c;
  return m;
}

void VoteProfile::validate() const {
  if (n < 0) throw input_error("negative candidate count");
  for (const auto& [r, c] : votes) {
    if (r.size() != n) throw input_error("vote length differs from candidate count");
    if (c <= 0) throw input_error("vote multiplicity must be positive");
    Ranking::of(r.order);
  }
  if (!labels.empty() && static_cast<int>(labels.size()) != n)
    throw input_error("label count differs from candidate count");
}

long long kendall_tau(const Ranking& a, const Ranking& b) {
  if (a.size() != b.size()) throw input_error("rankings of different sizes");
  const int n = a.size();
  const std::vector<int> pb = b.positions();
  long long disc = 0;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      // Pair ordered (a_i, a_j) in a; discordant when b reverses it.
      if (pb[static_cast<size_t>(a.order[static_cast<size_t>(i)])] >
          pb[static_cast<size_t>(a.order[static_cast<size_t>(j)])])
        ++disc;
    }
  return disc;
}

long long kendall_tau_profile(const Ranking& r, const VoteProfile& v) {
  if (r.size() != v.n) throw input_error("ranking size differs from profile");
  long long total = 0;
  for (const auto& [vote, count] : v.votes) total += kendall_tau(r, vote) * count;
  return total;
}

PairTally tally(const VoteProfile& v) {
  v.validate();
  PairTally t;
  t.n = v.n;
  t.m = v.total_votes();
  t.before.assign(static_cast<size_t>(v.n) * v.n, 0);
  for (const auto& [vote, count] : v.votes) {
    for (int i = 0; i < v.n; ++i)
      for (int j = i + 1; j < v.n; ++j)
        t.at(vote.order[static_cast<size_t>(i)], vote.order[static_cast<size_t>(j)]) += count;
  }
  return t;
}

MajorityGraph graph_from_tally(const PairTally& t) {
  MajorityGraph g;
  g.n = t.n;
  g.m = t.m;
  g.margin.assign(static_cast<size_t>(t.n) * t.n, 0);
  for (int x = 0; x < t.n; ++x)
    for (int y = 0; y < t.n; ++y)
      if (x != y) g.at(x, y) = t.at(x, y) - t.at(y, x);
  return g;
}

long long score_from_tally(const Ranking& r, const PairTally& t) {
  if (r.size() != t.n) throw input_error("ranking size differs from tally");
  long long s = 0;
  for (int i = 0; i < t.n; ++i)
    for (int j = i + 1; j < t.n; ++j)
      s += t.at(r.order[static_cast<size_t>(j)], r.order[static_cast<size_t>(i)]);
  return s;
}

Rational avg_distance(const VoteProfile& v) {
  PairTally t = tally(v);
  if (t.m < 2) return Rational(0);
  // Sum over unordered instance pairs of their distance equals
  // sum over candidate pairs of before(x,y) * before(y,x).
  int128 total = 0;
  for (int x = 0; x < t.n; ++x)
    for (int y = x + 1; y < t.n; ++y)
      total += static_cast<int128>(t.at(x, y)) * t.at(y, x);
  int128 pairs = static_cast<int128>(t.m) * (t.m - 1) / 2;
  return Rational(total, pairs);
}

SolvedRelation::SolvedRelation(int n) : n_(n) {
  if (n < 0) throw input_error("negative candidate count");
  size_t words_per_row = (static_cast<size_t>(n) + 63) / 64;
  bits_.assign(words_per_row * static_cast<size_t>(n), 0);
}

bool SolvedRelation::add(CandidateId x, CandidateId y) {
  if (x < 0 || x >= n_ || y < 0 || y >= n_) throw input_error("pair out of range");
  if (x == y) throw internal_inconsistency_error("self-pair certified");
  size_t bit = static_cast<size_t>(x) * n_ + y;
  uint64_t mask = uint64_t{1} << (bit & 63);
  if (bits_[bit >> 6] & mask) return false;
  bits_[bit >> 6] |= mask;
  ++count_;
  return true;
}

void SolvedRelation::close() {
  const size_t w = (static_cast<size_t>(n_) + 63) / 64;
  // Re-pack into per-row word blocks for word-parallel Warshall.
  std::vector<uint64_t> rows(w * static_cast<size_t>(n_), 0);
  for (int x = 0; x < n_; ++x)
    for (int y = 0; y < n_; ++y)
      if (contains(x, y)) rows[static_cast<size_t>(x) * w + (static_cast<size_t>(y) >> 6)] |= uint64_t{1} << (y & 63);
  for (int k = 0; k < n_; ++k) {
    const uint64_t* rk = &rows[static_cast<size_t>(k) * w];
    for (int x = 0; x < n_; ++x) {
      if (!(rows[static_cast<size_t>(x) * w + (static_cast<size_t>(k) >> 6)] >> (k & 63) & 1)) continue;
      uint64_t* rx = &rows[static_cast<size_t>(x) * w];
      for (size_t i = 0; i < w; ++i) rx[i] |= rk[i];
    }
  }
  count_ = 0;
  std::fill(bits_.begin(), bits_.end(), 0);
  for (int x = 0; x < n_; ++x) {
    if (rows[static_cast<size_t>(x) * w + (static_cast<size_t>(x) >> 6)] >> (x & 63) & 1)
      throw internal_inconsistency_error("certified relation contains a cycle through " + std::to_string(x));
    for (int y = 0; y < n_; ++y)
      if (rows[static_cast<size_t>(x) * w + (static_cast<size_t>(y) >> 6)] >> (y & 63) & 1) {
        size_t bit = static_cast<size_t>(x) * n_ + y;
        bits_[bit >> 6] |= uint64_t{1} << (bit & 63);
        ++count_;
      }
  }
}

std::vector<CandidateId> SolvedRelation::predecessors(CandidateId x) const {
  std::vector<CandidateId> out;
  for (int z = 0; z < n_; ++z)
    if (z != x && contains(z, x)) out.push_back(z);
  return out;
}

std::vector<CandidateId> SolvedRelation::successors(CandidateId x) const {
  std::vector<CandidateId> out;
  for (int z = 0; z < n_; ++z)
    if (z != x && contains(x, z)) out.push_back(z);
  return out;
}

int SolvedRelation::pred_count(CandidateId x) const {
  int c = 0;
  for (int z = 0; z < n_; ++z)
    if (z != x && contains(z, x)) ++c;
  return c;
}

int SolvedRelation::succ_count(CandidateId x) const {
  int c = 0;
  for (int z = 0; z < n_; ++z)
    if (z != x && contains(x, z)) ++c;
  return c;
}

std::vector<std::pair<CandidateId, CandidateId>> SolvedRelation::pairs() const {
  std::vector<std::pair<CandidateId, CandidateId>> out;
  out.reserve(static_cast<size_t>(count_));
  for (int x = 0; x < n_; ++x)
    for (int y = 0; y < n_; ++y)
      if (x != y && contains(x, y)) out.emplace_back(x, y);
  return out;
}

bool SolvedRelation::subset_of(const SolvedRelation& other) const {
  if (n_ != other.n_) return false;
  for (size_t i = 0; i < bits_.size(); ++i)
    if (bits_[i] & ~other.bits_[i]) return false;
  return true;
}

void SolvedRelation::merge(const SolvedRelation& other) {
  if (n_ != other.n_) throw input_error("merging relations of different sizes");
  count_ = 0;
  for (size_t i = 0; i < bits_.size(); ++i) {
    bits_[i] |= other.bits_[i];
    count_ += __builtin_popcountll(bits_[i]);
  }
}

SolvedRelation transitive_closure(const SolvedRelation& r) {
  SolvedRelation out = r;
  out.close();
  return out;
}

std::vector<CandidateId> predecessors(CandidateId x, const SolvedRelation& r) { return r.predecessors(x); }
std::vector<CandidateId> successors(CandidateId x, const SolvedRelation& r) { return r.successors(x); }

std::map<CandidateId, int> PartialResult::fixed_positions() const {
  std::map<CandidateId, int> out;
  int before = 0;
  for (size_t i = 0; i < fixed.size(); ++i) {
    before += static_cast<int>(blocks[i].size());
    out[fixed[i]] = before + static_cast<int>(i);
  }
  return out;
}

std::vector<CandidateId> PartialResult::counted_candidates(int threshold) const {
  std::vector<CandidateId> out(fixed);
  for (const auto& b : blocks)
    if (static_cast<int>(b.size()) <= threshold) out.insert(out.end(), b.begin(), b.end());
  std::sort(out.begin(), out.end());
  return out;
}

std::map<CandidateId, int> positions_from_relation(const SolvedRelation& r) {
  std::map<CandidateId, int> out;
  for (int x = 0; x < r.n(); ++x) {
    int p = r.pred_count(x);
    int s = r.succ_count(x);
    if (p + s == r.n() - 1) out[x] = p;
  }
  return out;
}

}  // namespace kemeny
