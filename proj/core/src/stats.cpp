#include "amw/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <boost/math/distributions/students_t.hpp>

namespace amw {

double t_multiplier(int batches) {
  if (batches < 2) return std::numeric_limits<double>::infinity();
  boost::math::students_t dist(static_cast<double>(batches - 1));
  return boost::math::quantile(dist, 0.975);
}

Estimate ratio_estimate(std::span<const double> y, std::span<const double> x) {
  Estimate e;
  const auto b = static_cast<int>(y.size());
  double sy = 0.0, sx = 0.0;
  for (int k = 0; k < b; ++k) {
    sy += y[static_cast<std::size_t>(k)];
    sx += x[static_cast<std::size_t>(k)];
  }
  if (sx <= 0.0) {
    e.mean = e.se = e.ci_lo = e.ci_hi = std::numeric_limits<double>::quiet_NaN();
    return e;
  }
  e.mean = sy / sx;
  if (b >= 2) {
    const double xbar = sx / b;
    double ss = 0.0;
    for (int k = 0; k < b; ++k) {
      const double r = y[static_cast<std::size_t>(k)] - e.mean * x[static_cast<std::size_t>(k)];
      ss += r * r;
    }
    e.se = std::sqrt(ss / (static_cast<double>(b) * (b - 1))) / xbar;
  } else {
    e.se = std::numeric_limits<double>::infinity();
  }
  const double h = t_multiplier(b) * e.se;
  e.ci_lo = e.mean - h;
  e.ci_hi = e.mean + h;
  return e;
}

namespace {

template <typename F>
std::vector<double> column(const std::vector<BatchAccum>& bs, F f) {
  std::vector<double> out;
  out.reserve(bs.size());
  for (const auto& b : bs) out.push_back(static_cast<double>(f(b)));
  return out;
}

}  // namespace

void RunStats::finalize() {
  measured_slots = reconfigurations = cycles = reconfiguring_slots = 0;
  for (const auto& b : batches) {
    measured_slots += b.slots;
    reconfigurations += b.instants;
    cycles += b.cycles;
    reconfiguring_slots += b.reconfiguring_slots;
  }
  const auto slots = column(batches, [](const BatchAccum& b) { return b.slots; });
  const auto inst = column(batches, [](const BatchAccum& b) { return b.instants; });
  const auto cyc = column(batches, [](const BatchAccum& b) { return b.cycles; });
  const auto ssc = column(batches, [](const BatchAccum& b) { return b.ssc_samples; });

  mean_total_q = ratio_estimate(column(batches, [](const BatchAccum& b) { return b.sum_total_q; }), slots);
  mean_unused = ratio_estimate(column(batches, [](const BatchAccum& b) { return b.sum_unused; }), slots);
  p_reconfig = ratio_estimate(column(batches, [](const BatchAccum& b) { return b.reconfiguring_slots; }), slots);
  {
    auto e = ratio_estimate(column(batches, [](const BatchAccum& b) { return b.sum_served; }), slots);
    const double inv = n > 0 ? 1.0 / n : 0.0;
    throughput_per_port = {e.mean * inv, e.se * inv, e.ci_lo * inv, e.ci_hi * inv};
  }
  mean_q_perp = ratio_estimate(column(batches, [](const BatchAccum& b) { return b.sum_q_perp; }), ssc);
  mean_q_par = ratio_estimate(column(batches, [](const BatchAccum& b) { return b.sum_q_par; }), ssc);
  mean_q_norm = ratio_estimate(column(batches, [](const BatchAccum& b) { return b.sum_q_norm; }), ssc);
  mean_g = ratio_estimate(column(batches, [](const BatchAccum& b) { return b.sum_g; }), inst);
  mean_overshoot = ratio_estimate(column(batches, [](const BatchAccum& b) { return b.sum_overshoot; }), inst);
  mean_gap_at_instant =
      ratio_estimate(column(batches, [](const BatchAccum& b) { return b.sum_g + b.sum_overshoot; }), inst);
  mean_q_at_instant = ratio_estimate(column(batches, [](const BatchAccum& b) { return b.sum_q_at_instant; }), inst);
  alpha_hat = ratio_estimate(column(batches, [](const BatchAccum& b) { return b.sum_alpha; }), inst);
  mean_duration = ratio_estimate(column(batches, [](const BatchAccum& b) { return b.sum_duration; }), cyc);

  mean_v = {};
  if (measured_slots > 0) {
    for (const auto& b : batches) {
      mean_v.v1 += b.sum_v1;
      mean_v.v2 += b.sum_v2;
      mean_v.v3 += b.sum_v3;
      mean_v.v4 += b.sum_v4;
    }
    const double inv = 1.0 / static_cast<double>(measured_slots);
    mean_v.v1 *= inv;
    mean_v.v2 *= inv;
    mean_v.v3 *= inv;
    mean_v.v4 *= inv;
  }
}

// JSON ----------------------------------------------------------------------

namespace {

// NaN does not survive JSON; encode it as null.
nlohmann::json num(double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr); }
double num_from(const nlohmann::json& j) {
  return j.is_null() ? std::numeric_limits<double>::quiet_NaN() : j.get<double>();
}

}  // namespace

void to_json(nlohmann::json& j, const Estimate& e) {
  j = {{"mean", num(e.mean)}, {"se", num(e.se)}, {"ci_lo", num(e.ci_lo)}, {"ci_hi", num(e.ci_hi)}};
}

void from_json(const nlohmann::json& j, Estimate& e) {
  e.mean = num_from(j.at("mean"));
  e.se = num_from(j.at("se"));
  e.ci_lo = num_from(j.at("ci_lo"));
  e.ci_hi = num_from(j.at("ci_hi"));
}

#define AMW_BATCH_FIELDS(X)                                                                        \
  X(slots) X(sum_total_q) X(sum_unused) X(sum_served) X(sum_arrivals) X(reconfiguring_slots)       \
  X(instants) X(sum_q_at_instant) X(sum_max_weight) X(sum_g) X(sum_overshoot) X(sum_alpha)         \
  X(cycles) X(sum_duration) X(sum_cycle_gap) X(ssc_samples) X(sum_q_perp) X(sum_q_par)             \
  X(sum_q_norm) X(sum_v1) X(sum_v2) X(sum_v3) X(sum_v4)

void to_json(nlohmann::json& j, const BatchAccum& b) {
  j = nlohmann::json::object();
#define AMW_PUT(f) j[#f] = b.f;
  AMW_BATCH_FIELDS(AMW_PUT)
#undef AMW_PUT
}

void from_json(const nlohmann::json& j, BatchAccum& b) {
#define AMW_GET(f) j.at(#f).get_to(b.f);
  AMW_BATCH_FIELDS(AMW_GET)
#undef AMW_GET
}

#undef AMW_BATCH_FIELDS

void to_json(nlohmann::json& j, const RunStats& s) {
  std::vector<std::vector<double>> nu;
  for (int i = 0; i < s.nu.n(); ++i) nu.emplace_back(s.nu.row(i).begin(), s.nu.row(i).end());
  j = {
      {"setup",
       {{"n", s.n},
        {"epsilon", s.epsilon},
        {"delta_r", s.delta_r},
        {"policy", std::string(to_string(s.policy))},
        {"gamma", s.gamma},
        {"delta", s.delta},
        {"warmup", s.warmup},
        {"horizon", s.horizon},
        {"sample_ssc_every", s.sample_ssc_every},
        {"seed", s.seed},
        {"nu", nu}}},
      {"estimates",
       {{"measured_slots", s.measured_slots},
        {"reconfigurations", s.reconfigurations},
        {"cycles", s.cycles},
        {"reconfiguring_slots", s.reconfiguring_slots},
        {"mean_total_q", s.mean_total_q},
        {"mean_q_perp", s.mean_q_perp},
        {"mean_q_par", s.mean_q_par},
        {"mean_q_norm", s.mean_q_norm},
        {"mean_unused", s.mean_unused},
        {"p_reconfig", s.p_reconfig},
        {"mean_duration", s.mean_duration},
        {"mean_gW", s.mean_g},
        {"mean_deltaW_overshoot", s.mean_overshoot},
        {"mean_gap_at_instant", s.mean_gap_at_instant},
        {"mean_q_at_instant", s.mean_q_at_instant},
        {"alpha_hat", s.alpha_hat},
        {"throughput_per_port", s.throughput_per_port},
        {"mean_V", {{"v1", s.mean_v.v1}, {"v2", s.mean_v.v2}, {"v3", s.mean_v.v3}, {"v4", s.mean_v.v4}}}}},
      {"reconfigurations_total", s.reconfigurations_total},
      {"min_duration", s.min_duration},
      {"min_overshoot", s.min_overshoot},
      {"max_overshoot", s.max_overshoot},
      {"window_mean_total_q", s.window_mean_total_q},
      {"batches", s.batches},
  };
}

void from_json(const nlohmann::json& j, RunStats& s) {
  const auto& su = j.at("setup");
  su.at("n").get_to(s.n);
  su.at("epsilon").get_to(s.epsilon);
  su.at("delta_r").get_to(s.delta_r);
  s.policy = parse_policy_kind(su.at("policy").get<std::string>());
  su.at("gamma").get_to(s.gamma);
  su.at("delta").get_to(s.delta);
  su.at("warmup").get_to(s.warmup);
  su.at("horizon").get_to(s.horizon);
  su.at("sample_ssc_every").get_to(s.sample_ssc_every);
  su.at("seed").get_to(s.seed);
  const auto nu = su.at("nu").get<std::vector<std::vector<double>>>();
  s.nu = RealMatrix(static_cast<int>(nu.size()));
  for (std::size_t i = 0; i < nu.size(); ++i) {
    if (nu[i].size() != nu.size()) throw Error(ErrorCode::DimensionMismatch, "nu is not square");
    for (std::size_t k = 0; k < nu.size(); ++k) s.nu(static_cast<int>(i), static_cast<int>(k)) = nu[i][k];
  }
  j.at("reconfigurations_total").get_to(s.reconfigurations_total);
  j.at("min_duration").get_to(s.min_duration);
  j.at("min_overshoot").get_to(s.min_overshoot);
  j.at("max_overshoot").get_to(s.max_overshoot);
  j.at("window_mean_total_q").get_to(s.window_mean_total_q);
  j.at("batches").get_to(s.batches);
  s.finalize();
}

void to_json(nlohmann::json& j, const IdentityReport& r) {
  const char* status = r.status == CheckStatus::Pass ? "pass" : r.status == CheckStatus::Fail ? "fail" : "not_applicable";
  j = {{"identity", r.identity}, {"lhs", num(r.lhs)}, {"rhs", num(r.rhs)}, {"se", num(r.se)},
       {"pass", r.pass},         {"status", status},    {"detail", r.detail}};
}

// Identity checks -----------------------------------------------------------

namespace {

void require_batches(const RunStats& s) {
  if (static_cast<int>(s.batches.size()) < kMinBatches) {
    throw Error(ErrorCode::InsufficientBatches,
                "need at least " + std::to_string(kMinBatches) + " batches, have " + std::to_string(s.batches.size()));
  }
}

void settle(IdentityReport& r, bool ok) {
  r.pass = ok;
  r.status = ok ? CheckStatus::Pass : CheckStatus::Fail;
}

}  // namespace

IdentityReport check_unused_drift(const RunStats& stats, double eps, int n) {
  require_batches(stats);
  IdentityReport r;
  r.identity = "unused_service_drift";
  r.lhs = stats.mean_unused.mean;
  r.rhs = n * (eps - stats.p_reconfig.mean);
  // SE of the paired per-batch residual: both sides are estimated from the run.
  std::vector<double> resid, slots;
  for (const auto& b : stats.batches) {
    resid.push_back(static_cast<double>(b.sum_unused) -
                    n * (eps * static_cast<double>(b.slots) - static_cast<double>(b.reconfiguring_slots)));
    slots.push_back(static_cast<double>(b.slots));
  }
  r.se = ratio_estimate(resid, slots).se;
  const double diff = std::abs(r.lhs - r.rhs);
  r.detail = "E[sum u] vs n(eps - Pr{r>0}); |diff| = " + std::to_string(diff);
  settle(r, diff <= 3.0 * r.se + 1e-12);
  return r;
}

IdentityReport check_renewal_probability(const RunStats& stats, int delta_r) {
  require_batches(stats);
  if (stats.cycles < kMinIntervals) {
    throw Error(ErrorCode::TooFewIntervals,
                "need at least " + std::to_string(kMinIntervals) + " schedule intervals, have " +
                    std::to_string(stats.cycles));
  }
  IdentityReport r;
  r.identity = "renewal_probability";
  r.lhs = stats.p_reconfig.mean;
  const double dur = stats.mean_duration.mean;
  r.rhs = delta_r / dur;

  // Delta-method SE of p - delta_r / duration from the batch structure.
  const auto b = static_cast<double>(stats.batches.size());
  double mean_slots = 0.0, mean_cycles = 0.0;
  for (const auto& x : stats.batches) {
    mean_slots += static_cast<double>(x.slots) / b;
    mean_cycles += static_cast<double>(x.cycles) / b;
  }
  double ss = 0.0;
  for (const auto& x : stats.batches) {
    const double ip = (static_cast<double>(x.reconfiguring_slots) - r.lhs * static_cast<double>(x.slots)) / mean_slots;
    const double id = (x.sum_duration - dur * static_cast<double>(x.cycles)) / mean_cycles;
    const double infl = ip + delta_r / (dur * dur) * id;
    ss += infl * infl;
  }
  r.se = std::sqrt(ss / (b * (b - 1.0)));
  const double diff = std::abs(r.lhs - r.rhs);
  const double rel = r.rhs != 0.0 ? diff / std::abs(r.rhs) : diff;
  r.detail = "Pr{r>0} vs delta_r/E[duration]; relative error = " + std::to_string(rel);
  settle(r, rel <= 0.02 || diff <= 3.0 * r.se);
  return r;
}

IdentityReport check_duration_weight_relation(const RunStats& stats, double eps, int n, double alpha_hat) {
  require_batches(stats);
  IdentityReport r;
  r.identity = "duration_weight_relation";
  if (stats.cycles < kMinIntervals) {
    r.status = CheckStatus::NotApplicable;
    r.pass = false;
    r.detail = "only " + std::to_string(stats.cycles) + " completed schedule intervals";
    return r;
  }
  const double c = (n - alpha_hat) * (1.0 - eps);
  std::vector<double> resid, cyc;
  double sum_d = 0.0, sum_g = 0.0, sum_c = 0.0;
  for (const auto& x : stats.batches) {
    resid.push_back(x.sum_duration - x.sum_cycle_gap / c);
    cyc.push_back(static_cast<double>(x.cycles));
    sum_d += x.sum_duration;
    sum_g += x.sum_cycle_gap;
    sum_c += static_cast<double>(x.cycles);
  }
  const auto e = ratio_estimate(resid, cyc);
  r.lhs = sum_d / sum_c;
  r.rhs = sum_g / sum_c / c;
  r.se = e.se;
  r.detail = "E[duration] vs E[g(W*) + delta_W] / ((n - alpha)(1 - eps))";
  settle(r, std::abs(r.lhs - r.rhs) <= 3.0 * r.se);
  return r;
}

double weight_lower_bound(double eps, int n, double alpha, int delta_r, const HysteresisFn& g,
                          double mean_overshoot) {
  const double arg = (n - alpha) * (1.0 - eps) * delta_r / eps - mean_overshoot;
  if (!(arg > 0.0)) {
    throw Error(ErrorCode::NegativeArgument, "bound is vacuous: g^-1 argument " + std::to_string(arg));
  }
  return g.inverse(arg);
}

LogLogFit fit_loglog_exponent(std::span<const std::pair<double, double>> points) {
  if (points.size() < 3) throw Error(ErrorCode::NonPositiveData, "need at least 3 points");
  std::vector<double> lx, ly;
  for (const auto& [x, y] : points) {
    if (!(x > 0.0) || !(y > 0.0)) throw Error(ErrorCode::NonPositiveData, "log-log fit needs positive data");
    lx.push_back(std::log(x));
    ly.push_back(std::log(y));
  }
  const double m = static_cast<double>(lx.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t k = 0; k < lx.size(); ++k) {
    mx += lx[k] / m;
    my += ly[k] / m;
  }
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t k = 0; k < lx.size(); ++k) {
    sxx += (lx[k] - mx) * (lx[k] - mx);
    sxy += (lx[k] - mx) * (ly[k] - my);
  }
  if (sxx <= 0.0) throw Error(ErrorCode::NonPositiveData, "all x values coincide");
  LogLogFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  double ssr = 0.0;
  for (std::size_t k = 0; k < lx.size(); ++k) {
    const double e = ly[k] - (f.intercept + f.slope * lx[k]);
    ssr += e * e;
  }
  f.stderr_slope = std::sqrt(ssr / (m - 2.0) / sxx);
  return f;
}

}  // namespace amw
