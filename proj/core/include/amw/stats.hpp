#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "amw/geometry.hpp"
#include "amw/policies.hpp"

namespace amw {

/// Raw sums collected over one non-overlapping batch of measured slots.
struct BatchAccum {
  std::int64_t slots = 0;
  double sum_total_q = 0.0;
  std::int64_t sum_unused = 0;
  std::int64_t sum_served = 0;
  std::int64_t sum_arrivals = 0;
  std::int64_t reconfiguring_slots = 0;  ///< slots with r > 0

  // Reconfiguration instants t_k that fall inside the batch.
  std::int64_t instants = 0;
  double sum_q_at_instant = 0.0;
  double sum_max_weight = 0.0;
  double sum_g = 0.0;        ///< g(W*) at the instant
  double sum_overshoot = 0.0;  ///< delta_W = W* - W - g(W*)
  double sum_alpha = 0.0;    ///< <nu, s(t_k)>

  // Completed schedule intervals [t_k, t_{k+1}) with t_k measured, credited at t_{k+1}.
  std::int64_t cycles = 0;
  double sum_duration = 0.0;
  double sum_cycle_gap = 0.0;  ///< g(W*) + delta_W at the closing instant

  // Strided cone projections.
  std::int64_t ssc_samples = 0;
  double sum_q_perp = 0.0;
  double sum_q_par = 0.0;
  double sum_q_norm = 0.0;

  double sum_v1 = 0.0, sum_v2 = 0.0, sum_v3 = 0.0, sum_v4 = 0.0;
};

struct Estimate {
  double mean = 0.0;
  double se = 0.0;
  double ci_lo = 0.0;
  double ci_hi = 0.0;
};

/// Two-sided 95% Student-t half-width multiplier for `batches` batch means.
double t_multiplier(int batches);

/// Batch-means estimate of sum(y) / sum(x), with the delta-method standard error
/// sqrt(sum_b (y_b - R x_b)^2 / (B (B - 1))) / mean(x). Batches with x_b = 0 still count.
Estimate ratio_estimate(std::span<const double> y, std::span<const double> x);

inline constexpr int kMinBatches = 20;
inline constexpr std::int64_t kMinIntervals = 100;

struct RunStats {
  // Setup echoed from the run.
  int n = 0;
  double epsilon = 0.0;
  int delta_r = 0;
  PolicyKind policy = PolicyKind::Adaptive;
  double gamma = 0.0;
  double delta = 0.0;
  std::int64_t warmup = 0;
  std::int64_t horizon = 0;
  int sample_ssc_every = 1;
  std::uint64_t seed = 0;
  RealMatrix nu;

  std::vector<BatchAccum> batches;
  std::vector<double> window_mean_total_q;  ///< equal windows over the measured slots
  std::int64_t reconfigurations_total = 0;  ///< over the whole run, warmup included
  std::int64_t min_duration = 0;            ///< over measured intervals, 0 if none
  double min_overshoot = 0.0;
  double max_overshoot = 0.0;

  // Derived by finalize().
  std::int64_t measured_slots = 0;
  std::int64_t reconfigurations = 0;
  std::int64_t cycles = 0;
  std::int64_t reconfiguring_slots = 0;
  Estimate mean_total_q;
  Estimate mean_q_perp;
  Estimate mean_q_par;
  Estimate mean_q_norm;
  Estimate mean_unused;
  Estimate p_reconfig;
  Estimate mean_duration;
  Estimate mean_g;                ///< E[g(W*)] at reconfiguration instants
  Estimate mean_overshoot;        ///< E[delta_W]
  Estimate mean_gap_at_instant;   ///< E[g(W*) + delta_W]
  Estimate mean_q_at_instant;     ///< E[sum q] at reconfiguration instants
  Estimate alpha_hat;
  Estimate throughput_per_port;   ///< served packets per slot per port
  LyapunovValues mean_v;

  void finalize();
};

void to_json(nlohmann::json& j, const Estimate& e);
void from_json(const nlohmann::json& j, Estimate& e);
void to_json(nlohmann::json& j, const BatchAccum& b);
void from_json(const nlohmann::json& j, BatchAccum& b);
void to_json(nlohmann::json& j, const RunStats& s);
void from_json(const nlohmann::json& j, RunStats& s);

enum class CheckStatus { Pass, Fail, NotApplicable };

struct IdentityReport {
  std::string identity;
  double lhs = 0.0;
  double rhs = 0.0;
  double se = 0.0;
  bool pass = false;
  CheckStatus status = CheckStatus::Fail;
  std::string detail;
};

void to_json(nlohmann::json& j, const IdentityReport& r);

/// E[sum u] = n (eps - Pr{r > 0}); pass at |lhs - rhs| <= 3 SE, with SE from the per-batch
/// residual sum u - n (eps - 1{r > 0}).
IdentityReport check_unused_drift(const RunStats& stats, double eps, int n);

/// Pr{r > 0} = delta_r / E[duration]; pass at relative error <= 2% or within 3 SE.
IdentityReport check_renewal_probability(const RunStats& stats, int delta_r);

/// E[duration] = E[g(W*) + delta_W] / ((n - alpha)(1 - eps)); pass within 3 SE.
IdentityReport check_duration_weight_relation(const RunStats& stats, double eps, int n, double alpha_hat);

/// g^-1((n - alpha)(1 - eps) delta_r / eps - E[delta_W]). Throws NegativeArgument
/// when the argument is not positive.
double weight_lower_bound(double eps, int n, double alpha, int delta_r, const HysteresisFn& g,
                          double mean_overshoot);

struct LogLogFit {
  double slope = 0.0;
  double intercept = 0.0;
  double stderr_slope = 0.0;
};

/// Ordinary least squares of log y on log x. Needs >= 3 points, all positive.
LogLogFit fit_loglog_exponent(std::span<const std::pair<double, double>> points);

}  // namespace amw
