#include "amw/policies.hpp"

#include <cmath>
#include <string>

namespace amw {

HysteresisFn::HysteresisFn(double gamma, double delta)
    : gamma_(gamma), delta_(delta), coef_(1.0 - gamma), exponent_(1.0 - delta) {
  if (!(gamma > 0.0 && gamma < 1.0)) throw Error(ErrorCode::ConfigInvalid, "gamma must lie in (0,1)");
  if (!(delta > 0.0 && delta < 1.0)) throw Error(ErrorCode::ConfigInvalid, "delta must lie in (0,1)");
}

HysteresisFn HysteresisFn::zero() { return HysteresisFn(); }

double HysteresisFn::operator()(double x) const noexcept {
  if (coef_ == 0.0 || x <= 0.0) return 0.0;
  return coef_ * std::pow(x, exponent_);
}

double HysteresisFn::inverse(double y) const {
  if (coef_ == 0.0) throw Error(ErrorCode::InvalidState, "zero hysteresis has no inverse");
  if (y < 0.0) throw Error(ErrorCode::NegativeArgument, "g^-1 of a negative value");
  return std::pow(y / coef_, 1.0 / exponent_);
}

PolicyDecision adaptive_maxweight_decide(const QueueMatrix& q, const Schedule& s, const HysteresisFn& g) {
  auto best = max_weight_matching(q);
  PolicyDecision d;
  d.max_weight = best.weight;
  d.weight = schedule_weight(q, s);
  d.weight_gap = d.max_weight - d.weight;
  d.threshold = g(static_cast<double>(d.max_weight));
  // Strict comparison; an exact integer gap against a real threshold.
  d.reconfigure = static_cast<double>(d.weight_gap) > d.threshold;
  if (d.reconfigure) d.new_schedule = std::move(best.schedule);
  return d;
}

PolicyDecision maxweight_decide(const QueueMatrix& q, const Schedule& s) {
  return adaptive_maxweight_decide(q, s, HysteresisFn::zero());
}

std::vector<Schedule> cyclic_rotation(int n) {
  std::vector<Schedule> r;
  r.reserve(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) r.push_back(Schedule::cyclic(n, k));
  return r;
}

PolicyDecision fixed_frame_decide(std::int64_t t, int frame_len, std::span<const Schedule> rotation,
                                  int delta_r) {
  if (frame_len <= delta_r) {
    throw Error(ErrorCode::BadFrame, "frame length " + std::to_string(frame_len) +
                                         " must exceed the reconfiguration delay " + std::to_string(delta_r));
  }
  if (rotation.empty()) throw Error(ErrorCode::BadFrame, "empty schedule rotation");
  PolicyDecision d;
  if (t % frame_len == 0) {
    const auto idx = static_cast<std::size_t>((t / frame_len) % static_cast<std::int64_t>(rotation.size()));
    d.reconfigure = true;
    d.new_schedule = rotation[idx];
  }
  return d;
}

std::string_view to_string(PolicyKind k) noexcept {
  switch (k) {
    case PolicyKind::Adaptive: return "adaptive";
    case PolicyKind::MaxWeight: return "maxweight";
    case PolicyKind::FixedFrame: return "fixed_frame";
  }
  return "adaptive";
}

PolicyKind parse_policy_kind(std::string_view s) {
  if (s == "adaptive") return PolicyKind::Adaptive;
  if (s == "maxweight") return PolicyKind::MaxWeight;
  if (s == "fixed_frame" || s == "fixed-frame") return PolicyKind::FixedFrame;
  throw Error(ErrorCode::ConfigInvalid, "unknown policy '" + std::string(s) + "'");
}

}  // namespace amw
