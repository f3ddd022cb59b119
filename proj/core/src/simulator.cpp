#include "amw/simulator.hpp"

#include <algorithm>
#include <cmath>

namespace amw {

namespace {

constexpr std::int64_t kMinHorizon = 20'000'000;
constexpr std::int64_t kMinWarmup = 1'000'000;

double heavy_traffic_scale(const SimConfig& c) {
  if (c.policy.kind != PolicyKind::Adaptive) return 0.0;
  const HysteresisFn g(c.policy.gamma, c.policy.delta);
  return g.inverse(1.0 / c.traffic.epsilon);
}

}  // namespace

std::int64_t default_horizon(const SimConfig& c) {
  const double scale = heavy_traffic_scale(c);
  return std::max<std::int64_t>(kMinHorizon, static_cast<std::int64_t>(std::ceil(200.0 * scale * c.delta_r)));
}

std::int64_t default_warmup(const SimConfig& c) {
  const double scale = heavy_traffic_scale(c);
  return std::max<std::int64_t>(kMinWarmup, static_cast<std::int64_t>(std::ceil(50.0 * c.delta_r * scale)));
}

SimConfig resolve_config(SimConfig c) {
  auto bad = [](const std::string& m) { return Error(ErrorCode::ConfigInvalid, m); };
  if (c.n < 2) throw bad("n must be at least 2");
  if (c.traffic.n() != c.n) throw bad("traffic matrix size does not match n");
  try {
    validate_traffic(c.traffic);
  } catch (const Error& e) {
    throw bad(e.what());
  }
  if (c.delta_r < 0) throw bad("delta_r must be nonnegative");
  if (c.sample_ssc_every < 1) throw bad("sample_ssc_every must be at least 1");
  if (c.batches < 1) throw bad("batches must be at least 1");
  if (c.windows < 1) throw bad("windows must be at least 1");
  switch (c.policy.kind) {
    case PolicyKind::Adaptive:
      try {
        HysteresisFn(c.policy.gamma, c.policy.delta);
      } catch (const Error& e) {
        throw bad(e.what());
      }
      break;
    case PolicyKind::MaxWeight:
      break;
    case PolicyKind::FixedFrame:
      if (c.policy.frame_len <= c.delta_r) {
        throw bad("frame_len must exceed delta_r");
      }
      if (c.rotation.empty()) c.rotation = cyclic_rotation(c.n);
      for (const auto& s : c.rotation) {
        if (s.n() != c.n || !s.is_permutation()) throw bad("rotation entries must be full permutations");
      }
      break;
  }
  if (c.horizon == 0) c.horizon = default_horizon(c);
  if (c.warmup < 0) c.warmup = default_warmup(c);
  if (c.horizon < 0) throw bad("horizon must be positive");
  if (c.warmup >= c.horizon) throw bad("warmup must be shorter than the horizon");
  return c;
}

Simulator::Simulator(SimConfig config)
    : cfg_(resolve_config(std::move(config))),
      sampler_(cfg_.traffic, cfg_.seed),
      state_(SwitchState::initial(cfg_.n)),
      arrivals_(cfg_.n) {
  if (cfg_.policy.kind == PolicyKind::Adaptive) g_.emplace(cfg_.policy.gamma, cfg_.policy.delta);
  const std::int64_t measured = cfg_.horizon - cfg_.warmup;
  const auto nb = std::min<std::int64_t>(cfg_.batches, measured);
  batch_len_ = (measured + nb - 1) / nb;
  batches_.assign(static_cast<std::size_t>((measured + batch_len_ - 1) / batch_len_), {});
  const auto nw = std::min<std::int64_t>(cfg_.windows, measured);
  window_len_ = (measured + nw - 1) / nw;
  const auto windows = static_cast<std::size_t>((measured + window_len_ - 1) / window_len_);
  window_sum_.assign(windows, 0.0);
  window_slots_.assign(windows, 0);
  if (!cfg_.trajectory_path.empty()) {
    trajectory_ = std::make_unique<std::ofstream>(cfg_.trajectory_path);
    if (!*trajectory_) throw Error(ErrorCode::Io, "cannot open trajectory file " + cfg_.trajectory_path);
    *trajectory_ << "slot,total_q,W,W_star,reconfiguring,reconfig_instant\n";
  }
}

void Simulator::set_state(SwitchState s) {
  check_queue(s.q, cfg_.n);
  if (s.s.n() != cfg_.n) throw Error(ErrorCode::DimensionMismatch, "schedule has wrong size");
  state_ = std::move(s);
  total_q_ = state_.q.total();
  last_reconfig_ = state_.t_last_reconfig;
}

bool Simulator::policy_active() const noexcept {
  if (cfg_.preempt_during_reconfig) return true;
  if (state_.r != 0) return false;
  // The installed schedule serves at least one slot before it can be replaced.
  return state_.t_last_reconfig < 0 || state_.t - state_.t_last_reconfig >= cfg_.delta_r + 1;
}

std::optional<PolicyDecision> Simulator::decide() {
  switch (cfg_.policy.kind) {
    case PolicyKind::Adaptive:
      if (!policy_active()) return std::nullopt;
      return adaptive_maxweight_decide(state_.q, state_.s, *g_);
    case PolicyKind::MaxWeight:
      if (!policy_active()) return std::nullopt;
      return maxweight_decide(state_.q, state_.s);
    case PolicyKind::FixedFrame:
      return fixed_frame_decide(state_.t, cfg_.policy.frame_len, cfg_.rotation, cfg_.delta_r);
  }
  return std::nullopt;
}

void Simulator::on_reconfiguration(const PolicyDecision& d) {
  const std::int64_t t = state_.t;
  ++reconfigurations_total_;
  if (t >= cfg_.warmup && t < cfg_.horizon) {
    auto& b = batches_[static_cast<std::size_t>((t - cfg_.warmup) / batch_len_)];
    const double overshoot = static_cast<double>(d.weight_gap) - d.threshold;
    ++b.instants;
    b.sum_q_at_instant += static_cast<double>(total_q_);
    b.sum_max_weight += static_cast<double>(d.max_weight);
    b.sum_g += d.threshold;
    b.sum_overshoot += overshoot;
    double alpha = 0.0;
    for (int i = 0; i < cfg_.n; ++i) alpha += cfg_.traffic.nu(i, d.new_schedule[i]);
    b.sum_alpha += alpha;
    if (!have_overshoot_) {
      min_overshoot_ = max_overshoot_ = overshoot;
      have_overshoot_ = true;
    } else {
      min_overshoot_ = std::min(min_overshoot_, overshoot);
      max_overshoot_ = std::max(max_overshoot_, overshoot);
    }
    if (last_reconfig_ >= cfg_.warmup) {
      const std::int64_t dur = t - last_reconfig_;
      ++b.cycles;
      b.sum_duration += static_cast<double>(dur);
      b.sum_cycle_gap += static_cast<double>(d.weight_gap);
      min_duration_ = min_duration_ == 0 ? dur : std::min(min_duration_, dur);
    }
  }
  last_reconfig_ = t;
}

void Simulator::measure_before_dynamics() {
  const std::int64_t t = state_.t;
  if (t < cfg_.warmup || t >= cfg_.horizon) return;
  const std::int64_t k = t - cfg_.warmup;
  auto& b = batches_[static_cast<std::size_t>(k / batch_len_)];
  const auto q_total = static_cast<double>(total_q_);
  ++b.slots;
  b.sum_total_q += q_total;
  if (state_.r > 0) ++b.reconfiguring_slots;
  const auto w = static_cast<std::size_t>(k / window_len_);
  window_sum_[w] += q_total;
  ++window_slots_[w];

  const auto v = lyapunov_values(state_.q);
  b.sum_v1 += v.v1;
  b.sum_v2 += v.v2;
  b.sum_v3 += v.v3;
  b.sum_v4 += v.v4;

  if (k % cfg_.sample_ssc_every == 0) {
    const auto d = project_cone(state_.q.cast<double>());
    ++b.ssc_samples;
    b.sum_q_perp += d.norm_perp;
    b.sum_q_par += d.norm_par;
    b.sum_q_norm += frobenius_norm(state_.q);
  }
}

void Simulator::write_trajectory(const PolicyDecision* d) {
  const std::int64_t w = schedule_weight(state_.q, state_.s);
  const std::int64_t w_star = d != nullptr && d->max_weight > 0 ? d->max_weight : max_weight_matching(state_.q).weight;
  *trajectory_ << state_.t << ',' << total_q_ << ',' << w << ',' << w_star << ',' << (state_.r > 0 ? 1 : 0) << ','
               << (state_.t_last_reconfig == state_.t ? 1 : 0) << '\n';
}

const SlotOutcome& Simulator::step(const IntMatrix& arrivals) {
  auto decision = decide();
  if (decision && decision->reconfigure) {
    if (cfg_.preempt_during_reconfig) state_.r = 0;
    begin_reconfiguration_inplace(state_, decision->new_schedule, cfg_.delta_r);
    on_reconfiguration(*decision);
  }
  measure_before_dynamics();
  if (trajectory_) write_trajectory(decision ? &*decision : nullptr);

  if (observer_) {
    const SwitchState before = state_;
    step_dynamics_inplace(state_, arrivals, outcome_);
    observer_(SlotRecord{before, arrivals, outcome_, decision ? &*decision : nullptr});
  } else {
    step_dynamics_inplace(state_, arrivals, outcome_);
  }
  total_q_ += outcome_.arrivals_total - outcome_.served_total;
  if (state_.t > cfg_.warmup && state_.t <= cfg_.horizon) {
    auto& b = batches_[static_cast<std::size_t>((state_.t - 1 - cfg_.warmup) / batch_len_)];
    b.sum_unused += outcome_.unused_total;
    b.sum_served += outcome_.served_total;
    b.sum_arrivals += outcome_.arrivals_total;
  }
  return outcome_;
}

const SlotOutcome& Simulator::step() {
  sampler_.sample(arrivals_);
  return step(arrivals_);
}

RunStats Simulator::stats() const {
  RunStats s;
  s.n = cfg_.n;
  s.epsilon = cfg_.traffic.epsilon;
  s.delta_r = cfg_.delta_r;
  s.policy = cfg_.policy.kind;
  s.gamma = cfg_.policy.gamma;
  s.delta = cfg_.policy.delta;
  s.warmup = cfg_.warmup;
  s.horizon = cfg_.horizon;
  s.sample_ssc_every = cfg_.sample_ssc_every;
  s.seed = cfg_.seed;
  s.nu = cfg_.traffic.nu;
  s.batches = batches_;
  s.window_mean_total_q.reserve(window_sum_.size());
  for (std::size_t w = 0; w < window_sum_.size(); ++w) {
    s.window_mean_total_q.push_back(window_slots_[w] > 0 ? window_sum_[w] / static_cast<double>(window_slots_[w]) : 0.0);
  }
  s.reconfigurations_total = reconfigurations_total_;
  s.min_duration = min_duration_;
  s.min_overshoot = min_overshoot_;
  s.max_overshoot = max_overshoot_;
  s.finalize();
  return s;
}

RunStats Simulator::run() {
  while (state_.t < cfg_.horizon) step();
  if (trajectory_) trajectory_->flush();
  return stats();
}

RunStats run(const SimConfig& config) { return Simulator(config).run(); }

}  // namespace amw
