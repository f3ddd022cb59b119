#include "amw/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <fstream>
#include <mutex>
#include <thread>

#include <fmt/format.h>

#include "amw/rng.hpp"

#ifndef AMW_VERSION
#define AMW_VERSION "unknown"
#endif

namespace amw {

std::string code_version() { return AMW_VERSION; }

std::string_view to_string(SweepAxis a) noexcept {
  switch (a) {
    case SweepAxis::Epsilon: return "epsilon";
    case SweepAxis::DeltaR: return "delta_r";
    case SweepAxis::N: return "n";
    case SweepAxis::Rho: return "rho";
    case SweepAxis::Delta: return "delta";
  }
  return "epsilon";
}

SweepAxis parse_sweep_axis(std::string_view s) {
  if (s == "epsilon") return SweepAxis::Epsilon;
  if (s == "delta_r") return SweepAxis::DeltaR;
  if (s == "n") return SweepAxis::N;
  if (s == "rho") return SweepAxis::Rho;
  if (s == "delta") return SweepAxis::Delta;
  throw Error(ErrorCode::ConfigInvalid, "unknown sweep axis '" + std::string(s) + "'");
}

std::uint64_t point_seed(std::uint64_t base, std::size_t point, int rep) {
  return rng::substream_seed(base, 0x5EEDull + point, static_cast<std::uint64_t>(rep));
}

namespace {

bool is_uniform(const RealMatrix& nu) {
  const double u = 1.0 / nu.n();
  return std::all_of(nu.flat().begin(), nu.flat().end(), [u](double v) { return std::abs(v - u) < 1e-15; });
}

bool fit_enabled(const SweepSpec& spec) {
  if (spec.fit) return *spec.fit;
  return spec.axis == SweepAxis::Epsilon || spec.axis == SweepAxis::DeltaR || spec.axis == SweepAxis::N;
}

}  // namespace

SimConfig config_for_point(const SweepSpec& spec, double value) {
  SimConfig c = spec.base;
  switch (spec.axis) {
    case SweepAxis::Epsilon:
      c.traffic.epsilon = value;
      break;
    case SweepAxis::Rho:
      c.traffic.epsilon = 1.0 - value;
      break;
    case SweepAxis::DeltaR:
      c.delta_r = static_cast<int>(std::lround(value));
      break;
    case SweepAxis::Delta:
      c.policy.delta = value;
      break;
    case SweepAxis::N: {
      const int n = static_cast<int>(std::lround(value));
      if (!is_uniform(c.traffic.nu)) {
        throw Error(ErrorCode::ConfigInvalid, "the n axis needs uniform traffic");
      }
      c.n = n;
      c.traffic.nu = RealMatrix(n, 1.0 / n);
      c.rotation.clear();
      break;
    }
  }
  return c;
}

void validate_sweep(const SweepSpec& spec) {
  if (spec.values.empty()) throw Error(ErrorCode::ConfigInvalid, "sweep has no values");
  if (spec.replications < 1) throw Error(ErrorCode::ConfigInvalid, "replications must be at least 1");
  if (spec.threads < 1) throw Error(ErrorCode::ConfigInvalid, "threads must be at least 1");
  if (spec.values.size() > 1) {
    const bool up = spec.values[1] > spec.values[0];
    for (std::size_t k = 1; k < spec.values.size(); ++k) {
      if ((spec.values[k] > spec.values[k - 1]) != up || spec.values[k] == spec.values[k - 1]) {
        throw Error(ErrorCode::ConfigInvalid, "sweep values must be strictly monotone");
      }
    }
  }
  for (double v : spec.values) resolve_config(config_for_point(spec, v));
}

Estimate pool_replications(const std::vector<Estimate>& reps) {
  Estimate e;
  if (reps.empty()) return e;
  double se2 = 0.0;
  for (const auto& r : reps) {
    e.mean += r.mean;
    se2 += r.se * r.se;
  }
  const auto k = static_cast<double>(reps.size());
  e.mean /= k;
  e.se = std::sqrt(se2) / k;
  // Half-width scale taken from the first replication's batch count.
  const double hw = reps.size() == 1 ? (reps[0].ci_hi - reps[0].mean) : 1.959963984540054 * e.se;
  const double scale = reps.size() == 1 && reps[0].se > 0 ? hw / reps[0].se : 1.959963984540054;
  e.ci_lo = e.mean - scale * e.se;
  e.ci_hi = e.mean + scale * e.se;
  return e;
}

SweepResult run_sweep(const SweepSpec& spec, std::uint64_t config_hash,
                      const std::function<void(const std::string&)>& progress) {
  validate_sweep(spec);
  const std::size_t points = spec.values.size();
  const auto reps = static_cast<std::size_t>(spec.replications);
  const std::size_t tasks = points * reps;

  std::vector<std::optional<RunStats>> results(tasks);
  std::vector<std::exception_ptr> errors(tasks);
  std::atomic<std::size_t> next{0};
  std::mutex progress_mutex;

  auto worker = [&] {
    for (std::size_t k = next.fetch_add(1); k < tasks; k = next.fetch_add(1)) {
      const std::size_t p = k / reps;
      const int r = static_cast<int>(k % reps);
      try {
        SimConfig c = config_for_point(spec, spec.values[p]);
        c.seed = point_seed(spec.base.seed, p, r);
        c.trajectory_path.clear();
        results[k] = run(c);
        if (progress) {
          std::lock_guard lock(progress_mutex);
          progress(fmt::format("{} = {} rep {}: mean total queue {:.6g}", to_string(spec.axis), spec.values[p], r,
                               results[k]->mean_total_q.mean));
        }
      } catch (...) {
        errors[k] = std::current_exception();
      }
    }
  };

  const auto nthreads = std::min<std::size_t>(static_cast<std::size_t>(spec.threads), tasks);
  if (nthreads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < nthreads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  for (std::size_t k = 0; k < tasks; ++k) {
    if (!errors[k]) continue;
    const std::string where = fmt::format("sweep point {} = {} (replication {})", to_string(spec.axis),
                                          spec.values[k / reps], k % reps);
    try {
      std::rethrow_exception(errors[k]);
    } catch (const Error& e) {
      throw Error(e.code(), where + ": " + e.what());
    } catch (const std::exception& e) {
      throw Error(ErrorCode::InvalidState, where + ": " + e.what());
    }
  }

  SweepResult out;
  out.axis = spec.axis;
  out.provenance = {config_hash, spec.base.seed, code_version()};
  for (std::size_t p = 0; p < points; ++p) {
    PointSummary ps;
    ps.value = spec.values[p];
    std::vector<Estimate> q, perp, norm, gap, prc;
    for (std::size_t r = 0; r < reps; ++r) {
      ps.seeds.push_back(point_seed(spec.base.seed, p, static_cast<int>(r)));
      auto& run_stats = *results[p * reps + r];
      q.push_back(run_stats.mean_total_q);
      perp.push_back(run_stats.mean_q_perp);
      norm.push_back(run_stats.mean_q_norm);
      gap.push_back(run_stats.mean_gap_at_instant);
      prc.push_back(run_stats.p_reconfig);
      ps.runs.push_back(std::move(run_stats));
    }
    ps.mean_total_q = pool_replications(q);
    ps.mean_q_perp = pool_replications(perp);
    ps.mean_q_norm = pool_replications(norm);
    ps.mean_gap_at_instant = pool_replications(gap);
    ps.p_reconfig = pool_replications(prc);
    out.points.push_back(std::move(ps));
  }
  if (fit_enabled(spec) && points >= 3) {
    std::vector<std::pair<double, double>> xy;
    for (const auto& p : out.points) xy.emplace_back(p.value, p.mean_total_q.mean);
    out.fit = fit_loglog_exponent(xy);
  }
  return out;
}

// Config ---------------------------------------------------------------------

std::vector<std::string> known_config_keys() {
  return {"n",        "epsilon",   "rho",        "delta_r", "policy",       "gamma",
          "delta",    "frame_len", "horizon",    "warmup",  "seed",         "traffic",
          "nu",       "family",    "a_max",      "preempt_during_reconfig", "sample_ssc_every",
          "batches",  "windows",   "trajectory", "axis",    "values",       "replications",
          "threads",  "fit"};
}

SimConfig sim_config_from(const KeyValueConfig& cfg) {
  SimConfig c;
  c.n = cfg.get_or<int>("n", 4);
  double eps = cfg.get_or<double>("epsilon", 0.04);
  if (cfg.has("rho")) {
    if (cfg.has("epsilon")) throw Error(ErrorCode::ConfigInvalid, "give either epsilon or rho, not both");
    eps = 1.0 - *cfg.get<double>("rho");
  }
  const auto traffic = cfg.get_or<std::string>("traffic", cfg.has("nu") ? "custom" : "uniform");
  if (traffic == "uniform") {
    c.traffic = TrafficSpec::uniform(c.n, eps);
  } else if (traffic == "identity") {
    c.traffic.nu = RealMatrix::identity(c.n);
    c.traffic.epsilon = eps;
  } else if (traffic == "custom") {
    const auto rows = cfg.get<std::vector<std::vector<double>>>("nu");
    if (!rows) throw Error(ErrorCode::ConfigInvalid, "traffic = custom needs a nu matrix");
    RealMatrix nu(static_cast<int>(rows->size()));
    for (std::size_t i = 0; i < rows->size(); ++i) {
      if ((*rows)[i].size() != rows->size()) throw Error(ErrorCode::ConfigInvalid, "nu must be square");
      for (std::size_t j = 0; j < rows->size(); ++j) nu(static_cast<int>(i), static_cast<int>(j)) = (*rows)[i][j];
    }
    if (nu.n() != c.n) {
      if (cfg.has("n")) throw Error(ErrorCode::ConfigInvalid, "nu size does not match n");
      c.n = nu.n();
    }
    c.traffic.nu = std::move(nu);
    c.traffic.epsilon = eps;
  } else {
    throw Error(ErrorCode::ConfigInvalid, "unknown traffic '" + traffic + "'");
  }
  c.traffic.family = parse_arrival_family(cfg.get_or<std::string>("family", "poisson"));
  if (cfg.has("a_max")) c.traffic.a_max = *cfg.get<int>("a_max");

  c.delta_r = cfg.get_or<int>("delta_r", 20);
  c.policy.kind = parse_policy_kind(cfg.get_or<std::string>("policy", "adaptive"));
  c.policy.gamma = cfg.get_or<double>("gamma", 0.1);
  c.policy.delta = cfg.get_or<double>("delta", 0.1);
  c.policy.frame_len = cfg.get_or<int>("frame_len", 0);
  c.horizon = cfg.get_or<std::int64_t>("horizon", 0);
  c.warmup = cfg.get_or<std::int64_t>("warmup", -1);
  c.seed = cfg.get_or<std::uint64_t>("seed", 1);
  c.preempt_during_reconfig = cfg.get_or<bool>("preempt_during_reconfig", false);
  c.sample_ssc_every = cfg.get_or<int>("sample_ssc_every", 100);
  c.batches = cfg.get_or<int>("batches", 30);
  c.windows = cfg.get_or<int>("windows", 10);
  c.trajectory_path = cfg.get_or<std::string>("trajectory", "");
  return c;
}

SweepSpec sweep_spec_from(const KeyValueConfig& cfg) {
  SweepSpec s;
  s.base = sim_config_from(cfg);
  const auto axis = cfg.get<std::string>("axis");
  if (!axis) throw Error(ErrorCode::ConfigInvalid, "sweep config needs an axis");
  s.axis = parse_sweep_axis(*axis);
  const auto values = cfg.get<std::vector<double>>("values");
  if (!values) throw Error(ErrorCode::ConfigInvalid, "sweep config needs values");
  s.values = *values;
  s.replications = cfg.get_or<int>("replications", 1);
  s.threads = cfg.get_or<int>("threads", 1);
  if (cfg.has("fit")) s.fit = *cfg.get<bool>("fit");
  return s;
}

std::uint64_t fnv1a64(std::string_view text) noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

// Identity suite --------------------------------------------------------------

std::vector<IdentityReport> identity_suite(const RunStats& s) {
  std::vector<IdentityReport> out;
  out.push_back(check_unused_drift(s, s.epsilon, s.n));

  if (s.delta_r > 0) {
    try {
      out.push_back(check_renewal_probability(s, s.delta_r));
    } catch (const Error& e) {
      if (e.code() != ErrorCode::TooFewIntervals) throw;
      IdentityReport r;
      r.identity = "renewal_probability";
      r.status = CheckStatus::NotApplicable;
      r.detail = e.what();
      out.push_back(r);
    }
  }

  if (s.policy == PolicyKind::Adaptive) {
    const double alpha = s.cycles > 0 ? s.alpha_hat.mean : 1.0;
    out.push_back(check_duration_weight_relation(s, s.epsilon, s.n, alpha));

    IdentityReport lb;
    lb.identity = "weight_lower_bound";
    lb.lhs = s.mean_q_at_instant.mean;
    lb.se = s.mean_q_at_instant.se;
    try {
      if (s.reconfigurations == 0) throw Error(ErrorCode::NotApplicable, "no reconfiguration instants");
      const HysteresisFn g(s.gamma, s.delta);
      lb.rhs = weight_lower_bound(s.epsilon, s.n, alpha, s.delta_r, g, s.mean_overshoot.mean);
      const double slack = s.mean_q_at_instant.ci_hi - s.mean_q_at_instant.mean;
      lb.pass = lb.lhs >= lb.rhs - slack;
      lb.status = lb.pass ? CheckStatus::Pass : CheckStatus::Fail;
      lb.detail = "E[sum q] at reconfiguration instants vs g^-1((n-alpha)(1-eps)dr/eps - E[delta_W])";
    } catch (const Error& e) {
      if (e.code() != ErrorCode::NegativeArgument && e.code() != ErrorCode::NotApplicable) throw;
      lb.status = CheckStatus::NotApplicable;
      lb.detail = e.what();
    }
    out.push_back(lb);
  }
  return out;
}

// Output ---------------------------------------------------------------------

namespace {

std::ofstream open_out(const std::filesystem::path& p) {
  std::ofstream f(p);
  if (!f) throw Error(ErrorCode::Io, "cannot write " + p.string());
  return f;
}

}  // namespace

nlohmann::json sweep_to_json(const SweepResult& r) {
  nlohmann::json pts = nlohmann::json::array();
  for (const auto& p : r.points) {
    nlohmann::json runs = nlohmann::json::array();
    for (const auto& s : p.runs) {
      nlohmann::json j = s;
      runs.push_back({{"seed", s.seed}, {"estimates", j.at("estimates")}});
    }
    pts.push_back({{"value", p.value},
                   {"seeds", p.seeds},
                   {"mean_total_q", p.mean_total_q},
                   {"mean_q_perp", p.mean_q_perp},
                   {"mean_q_norm", p.mean_q_norm},
                   {"mean_gap_at_instant", p.mean_gap_at_instant},
                   {"p_reconfig", p.p_reconfig},
                   {"runs", runs}});
  }
  nlohmann::json j = {{"axis", std::string(to_string(r.axis))},
                      {"points", pts},
                      {"provenance",
                       {{"config_hash", fmt::format("{:016x}", r.provenance.config_hash)},
                        {"base_seed", r.provenance.base_seed},
                        {"code_version", r.provenance.code_version}}}};
  if (r.fit) {
    j["slope"] = r.fit->slope;
    j["slope_stderr"] = r.fit->stderr_slope;
    j["intercept"] = r.fit->intercept;
  } else {
    j["slope"] = nullptr;
  }
  return j;
}

void write_run_outputs(const RunStats& stats, const std::filesystem::path& dir, const Provenance& provenance) {
  std::filesystem::create_directories(dir);
  {
    auto j = nlohmann::json(stats);
    j["provenance"] = {{"config_hash", fmt::format("{:016x}", provenance.config_hash)},
                       {"base_seed", stats.seed},
                       {"code_version", provenance.code_version.empty() ? code_version() : provenance.code_version}};
    auto f = open_out(dir / "run.json");
    f << j.dump(2) << '\n';
  }
  {
    auto f = open_out(dir / "run_summary.csv");
    f << "metric,mean,se,ci_lo,ci_hi\n";
    auto row = [&f](const char* name, const Estimate& e) {
      f << fmt::format("{},{:.10g},{:.10g},{:.10g},{:.10g}\n", name, e.mean, e.se, e.ci_lo, e.ci_hi);
    };
    row("mean_total_q", stats.mean_total_q);
    row("mean_q_perp", stats.mean_q_perp);
    row("mean_q_par", stats.mean_q_par);
    row("mean_q_norm", stats.mean_q_norm);
    row("mean_unused", stats.mean_unused);
    row("p_reconfig", stats.p_reconfig);
    row("mean_duration", stats.mean_duration);
    row("mean_gW", stats.mean_g);
    row("mean_deltaW_overshoot", stats.mean_overshoot);
    row("mean_q_at_reconfig", stats.mean_q_at_instant);
    row("alpha_hat", stats.alpha_hat);
    row("throughput_per_port", stats.throughput_per_port);
  }
  {
    auto f = open_out(dir / "identities.json");
    f << nlohmann::json(identity_suite(stats)).dump(2) << '\n';
  }
}

void write_sweep_outputs(const SweepResult& result, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  const std::string axis(to_string(result.axis));
  {
    auto f = open_out(dir / (axis + ".csv"));
    f << axis << ",mean_total_q,ci_lo,ci_hi\n";
    for (const auto& p : result.points) {
      f << fmt::format("{:.10g},{:.10g},{:.10g},{:.10g}\n", p.value, p.mean_total_q.mean, p.mean_total_q.ci_lo,
                       p.mean_total_q.ci_hi);
    }
  }
  {
    auto f = open_out(dir / (axis + "_vs_mean_total_q.dat"));
    f << "# " << axis << " mean_total_q\n";
    for (const auto& p : result.points) f << fmt::format("{:.10g} {:.10g}\n", p.value, p.mean_total_q.mean);
  }
  {
    auto f = open_out(dir / "points.csv");
    f << axis
      << ",replication,seed,mean_total_q,se_total_q,mean_q_perp,mean_q_norm,p_reconfig,mean_duration,mean_gW,"
         "mean_deltaW_overshoot,alpha_hat,mean_unused,reconfigurations\n";
    for (const auto& p : result.points) {
      for (std::size_t r = 0; r < p.runs.size(); ++r) {
        const auto& s = p.runs[r];
        f << fmt::format("{:.10g},{},{},{:.10g},{:.10g},{:.10g},{:.10g},{:.10g},{:.10g},{:.10g},{:.10g},{:.10g},{:.10g},{}\n",
                         p.value, r, s.seed, s.mean_total_q.mean, s.mean_total_q.se, s.mean_q_perp.mean,
                         s.mean_q_norm.mean, s.p_reconfig.mean, s.mean_duration.mean, s.mean_g.mean,
                         s.mean_overshoot.mean, s.alpha_hat.mean, s.mean_unused.mean, s.reconfigurations);
      }
    }
  }
  {
    auto f = open_out(dir / "sweep.json");
    f << sweep_to_json(result).dump(2) << '\n';
  }
}

}  // namespace amw
