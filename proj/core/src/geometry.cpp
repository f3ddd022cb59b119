#include "amw/geometry.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <string>

namespace amw {

RealMatrix project_subspace(const RealMatrix& q) {
  const int n = q.n();
  std::vector<double> r(static_cast<std::size_t>(n)), c(static_cast<std::size_t>(n));
  double total = 0.0;
  for (int i = 0; i < n; ++i) {
    r[static_cast<std::size_t>(i)] = q.row_sum(i);
    c[static_cast<std::size_t>(i)] = q.col_sum(i);
    total += r[static_cast<std::size_t>(i)];
  }
  const double inv_n = 1.0 / n;
  RealMatrix p(n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      p(i, j) = r[static_cast<std::size_t>(i)] * inv_n + c[static_cast<std::size_t>(j)] * inv_n - total * inv_n * inv_n;
    }
  }
  return p;
}

RealMatrix row_indicator(int n, int i) {
  RealMatrix m(n);
  for (int j = 0; j < n; ++j) m(i, j) = 1.0;
  return m;
}

RealMatrix col_indicator(int n, int j) {
  RealMatrix m(n);
  for (int i = 0; i < n; ++i) m(i, j) = 1.0;
  return m;
}

namespace {

// Least-squares projection onto the span of the active generators; returns false
// if the result disagrees with the Dykstra iterate or leaves the polar cone.
bool polish_active_face(const RealMatrix& q, ConeDecomposition& d, double scale) {
  const int n = q.n();
  std::vector<int> active;
  for (int k = 0; k < 2 * n; ++k) {
    const double w = k < n ? d.row_weights[static_cast<std::size_t>(k)] : d.col_weights[static_cast<std::size_t>(k - n)];
    if (w > 0.0) active.push_back(k);
  }
  if (active.empty()) return false;
  const int m = n * n;
  Eigen::MatrixXd g(m, static_cast<Eigen::Index>(active.size()));
  g.setZero();
  for (std::size_t a = 0; a < active.size(); ++a) {
    const int k = active[a];
    for (int t = 0; t < n; ++t) {
      const int idx = k < n ? k * n + t : t * n + (k - n);
      g(idx, static_cast<Eigen::Index>(a)) = 1.0;
    }
  }
  Eigen::VectorXd x(m);
  for (int idx = 0; idx < m; ++idx) x(idx) = q.flat()[static_cast<std::size_t>(idx)];
  const Eigen::VectorXd coef = g.completeOrthogonalDecomposition().solve(x);
  const Eigen::VectorXd par = g * coef;

  RealMatrix q_par(n), q_perp(n);
  double drift = 0.0;
  for (int idx = 0; idx < m; ++idx) {
    q_par.flat()[static_cast<std::size_t>(idx)] = par(idx);
    q_perp.flat()[static_cast<std::size_t>(idx)] = x(idx) - par(idx);
    const double diff = par(idx) - d.q_par.flat()[static_cast<std::size_t>(idx)];
    drift += diff * diff;
  }
  if (std::sqrt(drift) > 1e-6 * scale) return false;
  const double feas_tol = 1e-12 * scale;
  for (int k = 0; k < n; ++k) {
    if (q_perp.row_sum(k) > feas_tol || q_perp.col_sum(k) > feas_tol) return false;
  }
  d.q_par = std::move(q_par);
  d.q_perp = std::move(q_perp);
  d.polished = true;
  return true;
}

}  // namespace

ConeDecomposition project_cone(const RealMatrix& q, const ConeProjectionOptions& opts) {
  const int n = q.n();
  const double inv_n = 1.0 / n;
  const double scale = std::max(1.0, frobenius_norm(q));
  const double stop = opts.tol * scale;

  ConeDecomposition d;
  d.row_weights.assign(static_cast<std::size_t>(n), 0.0);
  d.col_weights.assign(static_cast<std::size_t>(n), 0.0);
  RealMatrix y = q;  // polar-cone iterate

  bool converged = false;
  int sweep = 0;
  while (sweep < opts.max_sweeps) {
    ++sweep;
    double moved_sq = 0.0;
    // Each half-space projection keeps its Dykstra increment as mu * generator.
    for (int i = 0; i < n; ++i) {
      auto& mu = d.row_weights[static_cast<std::size_t>(i)];
      const double next = std::max(0.0, mu + y.row_sum(i) * inv_n);
      const double step = next - mu;
      if (step != 0.0) {
        for (auto& v : y.row(i)) v -= step;
        moved_sq += step * step * n;
        mu = next;
      }
    }
    for (int j = 0; j < n; ++j) {
      auto& mu = d.col_weights[static_cast<std::size_t>(j)];
      const double next = std::max(0.0, mu + y.col_sum(j) * inv_n);
      const double step = next - mu;
      if (step != 0.0) {
        for (int i = 0; i < n; ++i) y(i, j) -= step;
        moved_sq += step * step * n;
        mu = next;
      }
    }
    if (std::sqrt(moved_sq) < stop) {
      converged = true;
      break;
    }
  }
  if (!converged) {
    throw Error(ErrorCode::NoConvergence,
                "cone projection did not settle within " + std::to_string(opts.max_sweeps) + " sweeps");
  }
  d.sweeps = sweep;
  d.q_perp = y;
  d.q_par = RealMatrix(n);
  for (std::size_t k = 0; k < d.q_par.size(); ++k) d.q_par.flat()[k] = q.flat()[k] - y.flat()[k];
  if (opts.polish) polish_active_face(q, d, scale);
  d.norm_par = frobenius_norm(d.q_par);
  d.norm_perp = frobenius_norm(d.q_perp);
  return d;
}

LyapunovValues lyapunov_values(const QueueMatrix& q) {
  const int n = q.n();
  std::int64_t v1 = 0, v2 = 0, total = 0;
  for (int k = 0; k < n; ++k) {
    const auto r = q.row_sum(k);
    const auto c = q.col_sum(k);
    v1 += r * r;
    v2 += c * c;
    total += r;
  }
  LyapunovValues v;
  v.v1 = static_cast<double>(v1);
  v.v2 = static_cast<double>(v2);
  v.v3 = static_cast<double>(total) * static_cast<double>(total);
  v.v4 = v.v1 + v.v2 - v.v3 / n;
  return v;
}

}  // namespace amw
