#pragma once

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "amw/matching.hpp"
#include "amw/model.hpp"

namespace amw {

/// Hysteresis threshold g(x) = (1 - gamma) x^(1 - delta).
class HysteresisFn {
 public:
  HysteresisFn(double gamma, double delta);

  /// g == 0; turns Adaptive MaxWeight into plain MaxWeight. Not invertible.
  static HysteresisFn zero();

  double gamma() const noexcept { return gamma_; }
  double delta() const noexcept { return delta_; }
  bool is_zero() const noexcept { return coef_ == 0.0; }

  double operator()(double x) const noexcept;
  /// (y / (1 - gamma))^(1 / (1 - delta)), y >= 0.
  double inverse(double y) const;

 private:
  HysteresisFn() = default;
  double gamma_ = 1.0;
  double delta_ = 0.0;
  double coef_ = 0.0;
  double exponent_ = 1.0;
};

struct PolicyDecision {
  bool reconfigure = false;
  Schedule new_schedule;   ///< meaningful only when reconfigure is set
  std::int64_t weight = 0;      ///< W = <q, s>
  std::int64_t max_weight = 0;  ///< W*
  std::int64_t weight_gap = 0;  ///< W* - W
  double threshold = 0.0;       ///< g(W*)
};

/// Reconfigure to the max-weight schedule iff W* - W > g(W*).
PolicyDecision adaptive_maxweight_decide(const QueueMatrix& q, const Schedule& s, const HysteresisFn& g);

/// Reconfigure whenever the current schedule is strictly worse than the max-weight one.
PolicyDecision maxweight_decide(const QueueMatrix& q, const Schedule& s);

/// Rotates through `rotation` every frame_len slots. Throws BadFrame when frame_len <= delta_r.
PolicyDecision fixed_frame_decide(std::int64_t t, int frame_len, std::span<const Schedule> rotation,
                                  int delta_r);

/// The n cyclic shifts, which together cover every queue once.
std::vector<Schedule> cyclic_rotation(int n);

enum class PolicyKind { Adaptive, MaxWeight, FixedFrame };

std::string_view to_string(PolicyKind k) noexcept;
PolicyKind parse_policy_kind(std::string_view s);

struct PolicyConfig {
  PolicyKind kind = PolicyKind::Adaptive;
  double gamma = 0.1;
  double delta = 0.1;
  int frame_len = 0;
};

}  // namespace amw
