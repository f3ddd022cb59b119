#pragma once

#include <cstdint>

#include "amw/model.hpp"

namespace amw {

struct MatchResult {
  Schedule schedule;       ///< always a full permutation
  std::int64_t weight = 0; ///< <q, schedule>
};

/// Exact maximum-weight perfect matching (Hungarian method, integer arithmetic).
/// Among all maximizers returns the lexicographically smallest assignment
/// (column of row 0 first, then row 1, ...).
MatchResult max_weight_matching(const QueueMatrix& q);

/// Exhaustive search over all n! permutations in lexicographic order. n <= 8.
MatchResult brute_force_matching(const QueueMatrix& q);

inline constexpr int kBruteForceMaxN = 8;

std::int64_t schedule_weight(const QueueMatrix& q, const Schedule& s);

}  // namespace amw
