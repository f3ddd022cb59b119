#include "amw/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Dense>
#include <fmt/format.h>

#include "amw/error.hpp"
#include "amw/geometry.hpp"
#include "amw/matching.hpp"
#include "amw/rng.hpp"

namespace amw::oracles {

ExactProjection exact_cone_projection(const RealMatrix& q) {
  const int n = q.n();
  if (n > kExactProjectionMaxN) throw Error(ErrorCode::TooLarge, "exact projection oracle supports n <= 5");
  const int m = 2 * n;
  const int nn = n * n;

  Eigen::MatrixXd gen(nn, m);
  gen.setZero();
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      gen(i * n + j, i) = 1.0;
      gen(i * n + j, n + j) = 1.0;
    }
  }
  Eigen::VectorXd y(nn);
  for (int k = 0; k < nn; ++k) y(k) = q.flat()[static_cast<std::size_t>(k)];

  ExactProjection best;
  best.q_par = RealMatrix(n, 0.0);
  best.distance = y.norm();  // empty face: projection is 0

  for (std::uint32_t mask = 1; mask < (1u << m); ++mask) {
    std::vector<int> cols;
    for (int k = 0; k < m; ++k)
      if (mask & (1u << k)) cols.push_back(k);
    Eigen::MatrixXd a(nn, static_cast<Eigen::Index>(cols.size()));
    for (std::size_t c = 0; c < cols.size(); ++c) a.col(static_cast<Eigen::Index>(c)) = gen.col(cols[c]);
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(a);
    if (qr.rank() < a.cols()) continue;
    ++best.faces_tried;
    const Eigen::VectorXd w = qr.solve(y);
    if (w.minCoeff() < -1e-12 * std::max(1.0, y.norm())) continue;
    const Eigen::VectorXd p = a * w;
    const double d = (y - p).norm();
    if (d < best.distance) {
      best.distance = d;
      for (int k = 0; k < nn; ++k) best.q_par.flat()[static_cast<std::size_t>(k)] = p(k);
    }
  }
  return best;
}

std::vector<SelfTestLine> self_test(std::uint64_t seed, int trials) {
  rng::Xoshiro256StarStar gen(seed);
  std::vector<SelfTestLine> out;

  int mismatches = 0;
  for (int t = 0; t < trials; ++t) {
    const int n = 1 + static_cast<int>(gen() % 6);
    const std::int64_t range = (t % 2 == 0) ? 4 : 1000;
    IntMatrix q(n, 0);
    for (auto& v : q.flat()) v = static_cast<std::int64_t>(gen() % static_cast<std::uint64_t>(range));
    const auto fast = max_weight_matching(q);
    const auto slow = brute_force_matching(q);
    if (fast.weight != slow.weight || !(fast.schedule == slow.schedule)) ++mismatches;
  }
  out.push_back({"matching", mismatches == 0, fmt::format("{} of {} instances disagree", mismatches, trials)});

  double worst = 0.0;
  for (int t = 0; t < trials; ++t) {
    const int n = 1 + static_cast<int>(gen() % 4);
    RealMatrix q(n, 0.0);
    const bool skewed = t % 3 == 0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        q(i, j) = skewed && i == 0 ? 0.0 : static_cast<double>(gen() % 50);
    const auto fast = project_cone(q);
    const auto exact = exact_cone_projection(q);
    RealMatrix diff = fast.q_par;
    for (std::size_t k = 0; k < diff.flat().size(); ++k) diff.flat()[k] -= exact.q_par.flat()[k];
    worst = std::max(worst, frobenius_norm(diff) / std::max(1.0, frobenius_norm(q)));
  }
  out.push_back({"cone_projection", worst <= 1e-8, fmt::format("max relative deviation {:.3g}", worst)});
  return out;
}

}  // namespace amw::oracles
