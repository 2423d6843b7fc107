#pragma once

#include <string>
#include <vector>

#include "kemeny/core.hpp"

namespace kemeny {

// Every optimal aggregate ranking, plus the shared score.
struct MedianSet {
  long long score = 0;
  std::vector<Ranking> medians;
};

// Exhaustive search over all n! rankings. Refuses n > 10 with
// oracle_guard_error; 10! tallies stay comfortably under a second, 11! do not.
MedianSet enumerate_medians(const VoteProfile& v);

// One exact-consensus violation found while checking a reduction's claims.
struct Violation {
  enum class Kind { pair, position } kind;
  CandidateId x = 0;
  CandidateId y = 0;  // pair only
  int claimed = 0;    // position only
  std::string describe() const;
};

// Checks every claimed pair/position against every enumerated median.
// Empty result means the claims hold in all optima.
std::vector<Violation> certify(const VoteProfile& v,
                               const std::vector<std::pair<CandidateId, CandidateId>>& pairs,
                               const std::map<CandidateId, int>& positions);

}  // namespace kemeny
