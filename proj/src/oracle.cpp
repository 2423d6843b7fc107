#include "kemeny/oracle.hpp"

#include <algorithm>
#include <numeric>

namespace kemeny {

MedianSet enumerate_medians(const VoteProfile& v) {
  v.validate();
  if (v.n > 10)
    throw oracle_guard_error("exact enumeration refused for " + std::to_string(v.n) +
                             " candidates (limit 10)");
  MedianSet out;
  if (v.n == 0) {
    out.medians.push_back(Ranking{});
    return out;
  }
  const PairTally t = tally(v);
  std::vector<CandidateId> perm(static_cast<size_t>(v.n));
  std::iota(perm.begin(), perm.end(), 0);
  long long best = -1;
  do {
    Ranking r{perm};
    long long s = score_from_tally(r, t);
    if (best < 0 || s < best) {
      best = s;
      out.medians.clear();
    }
    if (s == best) out.medians.push_back(r);
  } while (std::next_permutation(perm.begin(), perm.end()));
  out.score = best;
  return out;
}

std::string Violation::describe() const {
  if (kind == Kind::pair)
    return "pair (" + std::to_string(x) + ", " + std::to_string(y) + ") reversed in some median";
  return "candidate " + std::to_string(x) + " claimed at position " + std::to_string(claimed) +
         " but placed elsewhere in some median";
}

std::vector<Violation> certify(const VoteProfile& v,
                               const std::vector<std::pair<CandidateId, CandidateId>>& pairs,
                               const std::map<CandidateId, int>& positions) {
  const MedianSet ms = enumerate_medians(v);
  std::vector<Violation> out;
  for (const auto& [x, y] : pairs) {
    for (const Ranking& r : ms.medians) {
      const std::vector<int> pos = r.positions();
      if (pos[static_cast<size_t>(x)] > pos[static_cast<size_t>(y)]) {
        out.push_back({Violation::Kind::pair, x, y, 0});
        break;
      }
    }
  }
  for (const auto& [c, p] : positions) {
    for (const Ranking& r : ms.medians) {
      if (r.positions()[static_cast<size_t>(c)] != p) {
        out.push_back({Violation::Kind::position, c, 0, p});
        break;
      }
    }
  }
  return out;
}

}  // namespace kemeny
