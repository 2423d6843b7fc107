#pragma once

#include <numeric>
#include <vector>

#include "kemeny/core.hpp"
#include "kemeny/rng.hpp"

namespace kemeny::testing {

inline VoteProfile profile(int n, std::vector<std::pair<std::vector<CandidateId>, long long>> votes) {
  VoteProfile v;
  v.n = n;
  for (auto& [order, count] : votes) v.votes.emplace_back(Ranking::of(std::move(order)), count);
  return v;
}

// Three votes over {0, 1, 2}: 0>1>2 twice, 1>2>0 once. Small enough to trace
// every rule by hand; used as the shared regression instance.
inline VoteProfile e1() {
  return profile(3, {{{0, 1, 2}, 2}, {{1, 2, 0}, 1}});
}

inline Ranking random_ranking(int n, SplitMix64& rng) {
  std::vector<CandidateId> order(static_cast<size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  for (int i = n - 1; i > 0; --i) {
    int j = static_cast<int>(rng.below(static_cast<uint64_t>(i) + 1));
    std::swap(order[static_cast<size_t>(i)], order[static_cast<size_t>(j)]);
  }
  return Ranking{std::move(order)};
}

// Uniformly random profile, independent of the library's instance generator
// so sampler bugs cannot mask rule bugs.
inline VoteProfile random_profile(int n, int m, SplitMix64& rng) {
  VoteProfile v;
  v.n = n;
  for (int i = 0; i < m; ++i) v.votes.emplace_back(random_ranking(n, rng), 1);
  return v;
}

}  // namespace kemeny::testing
