#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "amw/matrix.hpp"

namespace amw {

/// Packet counts q(t). Entries are nonnegative.
using QueueMatrix = IntMatrix;

void check_queue(const QueueMatrix& q, int n);

/// A matching between inputs and outputs, stored as the output served by each input
/// (or -1 when the input is idle). Each output appears at most once.
class Schedule {
 public:
  Schedule() = default;
  explicit Schedule(std::vector<int> col_of_row);

  static Schedule identity(int n);
  static Schedule empty(int n);
  /// Input i is connected to output (i + shift) mod n.
  static Schedule cyclic(int n, int shift);
  static Schedule from_matrix(const IntMatrix& m);

  int n() const noexcept { return static_cast<int>(col_.size()); }
  int operator[](int row) const noexcept { return col_[static_cast<std::size_t>(row)]; }
  bool connects(int i, int j) const noexcept { return col_[static_cast<std::size_t>(i)] == j; }
  bool is_permutation() const noexcept;
  const std::vector<int>& columns() const noexcept { return col_; }
  IntMatrix to_matrix() const;

  friend bool operator==(const Schedule&, const Schedule&) = default;
  friend auto operator<=>(const Schedule&, const Schedule&) = default;

 private:
  std::vector<int> col_;
};

/// The Markov state X(t) = (q, s, r) plus slot bookkeeping.
struct SwitchState {
  QueueMatrix q;
  Schedule s;
  int r = 0;                         ///< remaining reconfiguration slots; 0 means serving
  std::int64_t t = 0;                ///< slot index
  std::int64_t t_last_reconfig = -1; ///< most recent reconfiguration instant, -1 if none

  static SwitchState initial(int n);
  int n() const noexcept { return q.n(); }
};

enum class ArrivalFamily { Poisson, Bernoulli, TruncatedPoisson };

std::string_view to_string(ArrivalFamily f) noexcept;
ArrivalFamily parse_arrival_family(std::string_view s);

struct TrafficSpec {
  RealMatrix nu;  ///< doubly stochastic direction on the capacity boundary
  double epsilon = 0.0;
  ArrivalFamily family = ArrivalFamily::Poisson;
  std::optional<int> a_max;

  int n() const noexcept { return nu.n(); }
  double lambda(int i, int j) const noexcept { return (1.0 - epsilon) * nu(i, j); }
  double rho() const noexcept { return 1.0 - epsilon; }

  static TrafficSpec uniform(int n, double epsilon);
};

inline constexpr double kDoublyStochasticTol = 1e-12;

/// Throws NonDoublyStochastic, BadEpsilon or BadTraffic.
void validate_traffic(const TrafficSpec& spec);

struct SlotOutcome {
  IntMatrix arrivals;
  IntMatrix served;
  IntMatrix unused;
  bool reconfigured = false;
  std::int64_t arrivals_total = 0;
  std::int64_t served_total = 0;
  std::int64_t unused_total = 0;
};

/// Applies one slot of q(t+1) = [q + a - s 1{r=0}]^+ in place, then counts r down.
/// The schedule is left untouched.
void step_dynamics_inplace(SwitchState& state, const IntMatrix& arrivals, SlotOutcome& out);

std::pair<SwitchState, SlotOutcome> step_dynamics(const SwitchState& state, const IntMatrix& arrivals);

/// Installs new_s at the current slot. The following delta_r slots (this one included)
/// serve nothing. delta_r = 0 switches instantly.
SwitchState begin_reconfiguration(const SwitchState& state, const Schedule& new_s, int delta_r);
void begin_reconfiguration_inplace(SwitchState& state, const Schedule& new_s, int delta_r);

}  // namespace amw
