#pragma once

// Independent reference implementations used as test oracles. They favour the
// most literal formulation over speed.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <vector>

#include <Eigen/Dense>

#include "amw/matrix.hpp"
#include "amw/model.hpp"

namespace amw::ref {

using Grid = std::vector<std::vector<std::int64_t>>;

inline Grid to_grid(const IntMatrix& m) {
  Grid g(static_cast<std::size_t>(m.n()), std::vector<std::int64_t>(static_cast<std::size_t>(m.n())));
  for (int i = 0; i < m.n(); ++i)
    for (int j = 0; j < m.n(); ++j) g[i][j] = m(i, j);
  return g;
}

struct StepResult {
  Grid q_next;
  Grid unused;
};

/// q' = max(q + a - s 1{r=0}, 0), u = 1 where a scheduled service found nothing.
inline StepResult step(const Grid& q, const std::vector<int>& col_of_row, int r, const Grid& a) {
  const std::size_t n = q.size();
  StepResult out{q, Grid(n, std::vector<std::int64_t>(n, 0))};
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const std::int64_t s = (col_of_row[i] == static_cast<int>(j) && r == 0) ? 1 : 0;
      const std::int64_t raw = q[i][j] + a[i][j] - s;
      out.q_next[i][j] = std::max<std::int64_t>(raw, 0);
      out.unused[i][j] = raw < 0 ? 1 : 0;
    }
  }
  return out;
}

/// Maximum of <q, p> over all permutations, enumerated with std::next_permutation.
inline std::int64_t max_permutation_weight(const Grid& q) {
  std::vector<int> p(q.size());
  std::iota(p.begin(), p.end(), 0);
  std::int64_t best = -1;
  do {
    std::int64_t w = 0;
    for (std::size_t i = 0; i < p.size(); ++i) w += q[i][static_cast<std::size_t>(p[i])];
    best = std::max(best, w);
  } while (std::next_permutation(p.begin(), p.end()));
  return best;
}

/// Least-squares projection onto span of the row and column indicators, solved
/// numerically with a complete orthogonal decomposition (rank 2n - 1).
inline RealMatrix lsq_subspace(const RealMatrix& q) {
  const int n = q.n();
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n * n, 2 * n);
  Eigen::VectorXd y(n * n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      a(i * n + j, i) = 1.0;
      a(i * n + j, n + j) = 1.0;
      y(i * n + j) = q(i, j);
    }
  }
  const Eigen::VectorXd p = a * a.completeOrthogonalDecomposition().solve(y);
  RealMatrix out(n, 0.0);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) out(i, j) = p(i * n + j);
  return out;
}

inline double hysteresis(double gamma, double delta, double x) { return (1.0 - gamma) * std::pow(x, 1.0 - delta); }
inline double hysteresis_inverse(double gamma, double delta, double y) {
  return std::pow(y / (1.0 - gamma), 1.0 / (1.0 - delta));
}

}  // namespace amw::ref

namespace amw::ref {

/// Cone projection certified by the KKT conditions: for every subset of
/// generators, solve least squares on the subset and accept the first point whose
/// coefficients are nonnegative and whose residual has nonpositive inner product
/// with every generator. Such a point is the unique projection.
inline RealMatrix kkt_cone_projection(const RealMatrix& q, double tol = 1e-9) {
  const int n = q.n();
  const int m = 2 * n;
  Eigen::MatrixXd gen = Eigen::MatrixXd::Zero(n * n, m);
  Eigen::VectorXd y(n * n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      gen(i * n + j, i) = 1.0;
      gen(i * n + j, n + j) = 1.0;
      y(i * n + j) = q(i, j);
    }
  }
  const double scale = std::max(1.0, y.norm());
  for (std::uint32_t mask = 0; mask < (1u << m); ++mask) {
    Eigen::VectorXd p = Eigen::VectorXd::Zero(n * n);
    if (mask != 0) {
      std::vector<int> cols;
      for (int k = 0; k < m; ++k)
        if (mask & (1u << k)) cols.push_back(k);
      Eigen::MatrixXd a(n * n, static_cast<Eigen::Index>(cols.size()));
      for (std::size_t c = 0; c < cols.size(); ++c) a.col(static_cast<Eigen::Index>(c)) = gen.col(cols[c]);
      const auto cod = a.completeOrthogonalDecomposition();
      if (cod.rank() < a.cols()) continue;
      const Eigen::VectorXd w = cod.solve(y);
      if (w.minCoeff() < -tol * scale) continue;
      p = a * w;
    }
    const Eigen::VectorXd resid = y - p;
    if ((gen.transpose() * resid).maxCoeff() > tol * scale) continue;
    RealMatrix out(n, 0.0);
    for (int k = 0; k < n * n; ++k) out.flat()[static_cast<std::size_t>(k)] = p(k);
    return out;
  }
  return RealMatrix(n, std::nan(""));
}

}  // namespace amw::ref
