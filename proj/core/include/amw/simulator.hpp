#pragma once

#include <cstdint>
#include <fstream>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "amw/arrivals.hpp"
#include "amw/policies.hpp"
#include "amw/stats.hpp"

namespace amw {

struct SimConfig {
  int n = 4;
  TrafficSpec traffic = TrafficSpec::uniform(4, 0.04);
  int delta_r = 20;
  PolicyConfig policy;
  std::vector<Schedule> rotation;  ///< fixed_frame only; empty means the n cyclic shifts
  std::int64_t horizon = 0;        ///< total slots; 0 selects default_horizon()
  std::int64_t warmup = -1;        ///< discarded slots; -1 selects default_warmup()
  std::uint64_t seed = 1;
  bool preempt_during_reconfig = false;
  int sample_ssc_every = 100;
  int batches = 30;
  int windows = 10;
  std::string trajectory_path;  ///< optional per-slot CSV dump
};

/// Default measurement length: max(2e7, 200 g^-1(1/eps) delta_r) for Adaptive MaxWeight, 2e7 otherwise.
std::int64_t default_horizon(const SimConfig& c);
/// Default warmup: max(1e6, 50 delta_r g^-1(1/eps)) for Adaptive MaxWeight, 1e6 otherwise.
std::int64_t default_warmup(const SimConfig& c);

/// Fills in defaults and checks every field. Throws ConfigInvalid.
SimConfig resolve_config(SimConfig c);

/// Post-decision view of a slot, handed to observers.
struct SlotRecord {
  const SwitchState& before;  ///< q(t), s(t), r(t) after the policy acted
  const IntMatrix& arrivals;
  const SlotOutcome& outcome;
  const PolicyDecision* decision;  ///< null when the policy was not evaluated
};

class Simulator {
 public:
  using Observer = std::function<void(const SlotRecord&)>;

  explicit Simulator(SimConfig config);

  /// Runs the policy, then one slot of dynamics with the given arrivals.
  const SlotOutcome& step(const IntMatrix& arrivals);
  /// Same, drawing arrivals from the seeded sampler.
  const SlotOutcome& step();

  /// Simulates up to the horizon and returns the finalized statistics.
  RunStats run();

  const SwitchState& state() const noexcept { return state_; }
  void set_state(SwitchState s);
  const SimConfig& config() const noexcept { return cfg_; }
  void set_observer(Observer obs) { observer_ = std::move(obs); }
  RunStats stats() const;

 private:
  bool policy_active() const noexcept;
  std::optional<PolicyDecision> decide();
  void on_reconfiguration(const PolicyDecision& d);
  void measure_before_dynamics();
  void write_trajectory(const PolicyDecision* d);

  SimConfig cfg_;
  std::optional<HysteresisFn> g_;
  ArrivalSampler sampler_;
  SwitchState state_;
  SlotOutcome outcome_;
  IntMatrix arrivals_;
  std::int64_t total_q_ = 0;
  std::int64_t last_reconfig_ = -1;

  std::int64_t batch_len_ = 1;
  std::int64_t window_len_ = 1;
  std::vector<BatchAccum> batches_;
  std::vector<double> window_sum_;
  std::vector<std::int64_t> window_slots_;
  std::int64_t reconfigurations_total_ = 0;
  std::int64_t min_duration_ = 0;
  double min_overshoot_ = 0.0;
  double max_overshoot_ = 0.0;
  bool have_overshoot_ = false;

  Observer observer_;
  std::unique_ptr<std::ofstream> trajectory_;
};

RunStats run(const SimConfig& config);

}  // namespace amw
