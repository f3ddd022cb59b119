#pragma once

#include <vector>

#include "amw/model.hpp"

namespace amw {

// The cone K is generated by the row indicators e(i) (row i all ones) and the
// column indicators e~(j) (column j all ones) with nonnegative weights.

struct ConeDecomposition {
  RealMatrix q_par;   ///< projection onto K
  RealMatrix q_perp;  ///< q - q_par, lies in the polar cone
  double norm_par = 0.0;
  double norm_perp = 0.0;
  std::vector<double> row_weights;  ///< w_i >= 0
  std::vector<double> col_weights;  ///< w~_j >= 0
  int sweeps = 0;
  bool polished = false;
};

struct ConeProjectionOptions {
  int max_sweeps = 10000;
  /// Stop when a full sweep moves the iterate less than tol * max(1, |q|).
  double tol = 1e-10;
  /// Re-solve the identified active face exactly by least squares.
  bool polish = true;
};

/// Orthogonal projection onto span{e(i), e~(j)}:
/// p_ij = r_i / n + c_j / n - S / n^2.
RealMatrix project_subspace(const RealMatrix& q);

/// Euclidean projection onto K via Dykstra's method on the polar cone
/// {y : <y, e(i)> <= 0, <y, e~(j)> <= 0}; the cone part is the complement.
/// Throws NoConvergence when the sweep cap is hit.
ConeDecomposition project_cone(const RealMatrix& q, const ConeProjectionOptions& opts = {});

struct LyapunovValues {
  double v1 = 0.0;  ///< sum of squared row sums
  double v2 = 0.0;  ///< sum of squared column sums
  double v3 = 0.0;  ///< squared total
  double v4 = 0.0;  ///< v1 + v2 - v3 / n
};

LyapunovValues lyapunov_values(const QueueMatrix& q);

RealMatrix row_indicator(int n, int i);
RealMatrix col_indicator(int n, int j);

}  // namespace amw
