#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "amw/matrix.hpp"

namespace amw::oracles {

/// Projection onto the row/column indicator cone by enumerating every linearly
/// independent generator subset. Exponential in 2n; intended for n <= 5.
struct ExactProjection {
  RealMatrix q_par;
  double distance = 0.0;
  int faces_tried = 0;
};

inline constexpr int kExactProjectionMaxN = 5;

ExactProjection exact_cone_projection(const RealMatrix& q);

struct SelfTestLine {
  std::string name;
  bool pass = false;
  std::string detail;
};

/// Randomized agreement checks: Hungarian vs exhaustive matching, and the
/// iterative cone projection vs exact_cone_projection.
std::vector<SelfTestLine> self_test(std::uint64_t seed, int trials);

}  // namespace amw::oracles
