#include "amw/matching.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <vector>

namespace amw {

namespace {

// Min-cost assignment on cost = -q with row/column potentials. After solve(),
// u[i] + v[j] <= cost(i,j) everywhere, with equality on every edge of every
// optimal assignment.
class Hungarian {
 public:
  explicit Hungarian(const QueueMatrix& q) : q_(q), n_(q.n()) {}

  void solve() {
    constexpr std::int64_t kInf = std::numeric_limits<std::int64_t>::max() / 4;
    const int n = n_;
    // 1-based e-maxx formulation; p[j] is the row matched to column j.
    u_.assign(static_cast<std::size_t>(n + 1), 0);
    v_.assign(static_cast<std::size_t>(n + 1), 0);
    std::vector<int> p(static_cast<std::size_t>(n + 1), 0);
    std::vector<int> way(static_cast<std::size_t>(n + 1), 0);
    std::vector<std::int64_t> minv(static_cast<std::size_t>(n + 1));
    std::vector<char> used(static_cast<std::size_t>(n + 1));
    for (int i = 1; i <= n; ++i) {
      p[0] = i;
      int j0 = 0;
      std::fill(minv.begin(), minv.end(), kInf);
      std::fill(used.begin(), used.end(), 0);
      do {
        used[static_cast<std::size_t>(j0)] = 1;
        const int i0 = p[static_cast<std::size_t>(j0)];
        std::int64_t delta = kInf;
        int j1 = 0;
        for (int j = 1; j <= n; ++j) {
          if (used[static_cast<std::size_t>(j)]) continue;
          const std::int64_t cur = cost(i0 - 1, j - 1) - u_[static_cast<std::size_t>(i0)] -
                                   v_[static_cast<std::size_t>(j)];
          if (cur < minv[static_cast<std::size_t>(j)]) {
            minv[static_cast<std::size_t>(j)] = cur;
            way[static_cast<std::size_t>(j)] = j0;
          }
          if (minv[static_cast<std::size_t>(j)] < delta) {
            delta = minv[static_cast<std::size_t>(j)];
            j1 = j;
          }
        }
        for (int j = 0; j <= n; ++j) {
          if (used[static_cast<std::size_t>(j)]) {
            u_[static_cast<std::size_t>(p[static_cast<std::size_t>(j)])] += delta;
            v_[static_cast<std::size_t>(j)] -= delta;
          } else {
            minv[static_cast<std::size_t>(j)] -= delta;
          }
        }
        j0 = j1;
      } while (p[static_cast<std::size_t>(j0)] != 0);
      do {
        const int j1 = way[static_cast<std::size_t>(j0)];
        p[static_cast<std::size_t>(j0)] = p[static_cast<std::size_t>(j1)];
        j0 = j1;
      } while (j0 != 0);
    }
    col_of_row_.assign(static_cast<std::size_t>(n), -1);
    for (int j = 1; j <= n; ++j) {
      col_of_row_[static_cast<std::size_t>(p[static_cast<std::size_t>(j)] - 1)] = j - 1;
    }
  }

  bool tight(int i, int j) const {
    return cost(i, j) == u_[static_cast<std::size_t>(i + 1)] + v_[static_cast<std::size_t>(j + 1)];
  }

  std::vector<int>& assignment() { return col_of_row_; }

 private:
  std::int64_t cost(int i, int j) const { return -q_(i, j); }

  const QueueMatrix& q_;
  int n_;
  std::vector<std::int64_t> u_, v_;
  std::vector<int> col_of_row_;
};

// Walks the equality subgraph to the lexicographically smallest optimal assignment.
class LexRefiner {
 public:
  LexRefiner(const Hungarian& h, std::vector<int>& col_of_row, int n)
      : h_(h), col_(col_of_row), n_(n), row_of_col_(static_cast<std::size_t>(n)),
        seen_(static_cast<std::size_t>(n)) {
    for (int i = 0; i < n; ++i) row_of_col_[static_cast<std::size_t>(col_[static_cast<std::size_t>(i)])] = i;
  }

  void run() {
    for (int i = 0; i < n_; ++i) {
      const int current = col_[static_cast<std::size_t>(i)];
      for (int j = 0; j < current; ++j) {
        if (row_of_col_[static_cast<std::size_t>(j)] < i || !h_.tight(i, j)) continue;
        if (try_move(i, j)) break;
      }
    }
  }

 private:
  // Reassigns row i to column j if the row holding j can be re-matched among
  // rows > i through tight edges, using the column row i releases.
  bool try_move(int i, int j) {
    const int freed = col_[static_cast<std::size_t>(i)];
    const int holder = row_of_col_[static_cast<std::size_t>(j)];
    std::fill(seen_.begin(), seen_.end(), 0);
    seen_[static_cast<std::size_t>(j)] = 1;
    // Temporarily mark column `freed` as unowned for the search.
    row_of_col_[static_cast<std::size_t>(freed)] = -1;
    if (augment(holder, i)) {
      col_[static_cast<std::size_t>(i)] = j;
      row_of_col_[static_cast<std::size_t>(j)] = i;
      return true;
    }
    row_of_col_[static_cast<std::size_t>(freed)] = i;
    return false;
  }

  bool augment(int row, int fixed_upto) {
    for (int c = 0; c < n_; ++c) {
      if (seen_[static_cast<std::size_t>(c)] || !h_.tight(row, c)) continue;
      const int owner = row_of_col_[static_cast<std::size_t>(c)];
      if (owner >= 0 && owner <= fixed_upto) continue;
      seen_[static_cast<std::size_t>(c)] = 1;
      if (owner < 0 || augment(owner, fixed_upto)) {
        col_[static_cast<std::size_t>(row)] = c;
        row_of_col_[static_cast<std::size_t>(c)] = row;
        return true;
      }
    }
    return false;
  }

  const Hungarian& h_;
  std::vector<int>& col_;
  int n_;
  std::vector<int> row_of_col_;
  std::vector<char> seen_;
};

}  // namespace

MatchResult max_weight_matching(const QueueMatrix& q) {
  const int n = q.n();
  if (n == 0) return {Schedule(std::vector<int>{}), 0};
  Hungarian h(q);
  h.solve();
  auto& cols = h.assignment();
  LexRefiner(h, cols, n).run();
  Schedule s(cols);
  return {s, schedule_weight(q, s)};
}

MatchResult brute_force_matching(const QueueMatrix& q) {
  const int n = q.n();
  if (n > kBruteForceMaxN) {
    throw Error(ErrorCode::TooLarge, "brute force matching limited to n <= 8, got " + std::to_string(n));
  }
  std::vector<int> perm(static_cast<std::size_t>(n));
  std::iota(perm.begin(), perm.end(), 0);
  std::vector<int> best = perm;
  std::int64_t best_w = std::numeric_limits<std::int64_t>::min();
  do {
    std::int64_t w = 0;
    for (int i = 0; i < n; ++i) w += q(i, perm[static_cast<std::size_t>(i)]);
    if (w > best_w) {
      best_w = w;
      best = perm;
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  return {Schedule(best), n == 0 ? 0 : best_w};
}

std::int64_t schedule_weight(const QueueMatrix& q, const Schedule& s) {
  if (q.n() != s.n()) throw Error(ErrorCode::DimensionMismatch, "schedule and queue sizes differ");
  std::int64_t w = 0;
  for (int i = 0; i < s.n(); ++i) {
    if (s[i] >= 0) w += q(i, s[i]);
  }
  return w;
}

}  // namespace amw
