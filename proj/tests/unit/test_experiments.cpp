#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "amw/experiments.hpp"
#include "expect_error.hpp"

namespace amw {
namespace {

namespace fs = std::filesystem;

std::string slurp(const fs::path& p) {
  std::ifstream f(p);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

fs::path scratch(const std::string& name) {
  const auto p = fs::temp_directory_path() / ("amw_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

SweepSpec tiny_sweep() {
  SweepSpec s;
  s.base.n = 3;
  s.base.traffic = TrafficSpec::uniform(3, 0.2);
  s.base.delta_r = 3;
  s.base.horizon = 60000;
  s.base.warmup = 5000;
  s.base.seed = 77;
  s.axis = SweepAxis::Epsilon;
  s.values = {0.3, 0.2, 0.15};
  s.replications = 2;
  return s;
}

TEST(KeyValue, ParsesLiteralsCommentsAndBareWords) {
  const auto cfg = KeyValueConfig::parse(
      "# header\n"
      "n = 4   # ports\n"
      "epsilon = 0.02\n"
      "policy = adaptive\n"
      "trajectory = \"a#b.csv\"\n"
      "values = [0.06, 0.04]\n"
      "preempt_during_reconfig = true\n");
  EXPECT_EQ(cfg.get<int>("n"), 4);
  EXPECT_DOUBLE_EQ(*cfg.get<double>("epsilon"), 0.02);
  EXPECT_EQ(cfg.get<std::string>("policy"), "adaptive");
  EXPECT_EQ(cfg.get<std::string>("trajectory"), "a#b.csv");
  EXPECT_EQ(cfg.get<std::vector<double>>("values")->size(), 2u);
  EXPECT_EQ(cfg.get<bool>("preempt_during_reconfig"), true);
  EXPECT_FALSE(cfg.has("seed"));
  EXPECT_EQ(cfg.get_or<int>("seed", 9), 9);
}

TEST(KeyValue, Rejections) {
  EXPECT_AMW_ERROR(KeyValueConfig::parse("n = 4\nn = 5\n"), ErrorCode::ConfigInvalid);
  EXPECT_AMW_ERROR(KeyValueConfig::parse("just words\n"), ErrorCode::ConfigInvalid);
  EXPECT_AMW_ERROR(KeyValueConfig::parse("n = four\n").get<int>("n"), ErrorCode::ConfigInvalid);
  EXPECT_AMW_ERROR(KeyValueConfig::load("/nonexistent/x.cfg"), ErrorCode::ConfigInvalid);
}

TEST(KeyValue, EnvironmentOverrides) {
  auto cfg = KeyValueConfig::parse("seed = 1\n");
  ::setenv("AMWTEST_SEED", "42", 1);
  cfg.apply_env_overrides("AMWTEST_", {"seed", "n"});
  ::unsetenv("AMWTEST_SEED");
  EXPECT_EQ(cfg.get<int>("seed"), 42);
  EXPECT_FALSE(cfg.has("n"));
}

TEST(KeyValue, CanonicalTextIsOrderIndependent) {
  const auto a = KeyValueConfig::parse("n = 4\nseed = 3\n");
  const auto b = KeyValueConfig::parse("seed = 3\n\nn = 4 # c\n");
  EXPECT_EQ(a.canonical(), b.canonical());
  EXPECT_EQ(fnv1a64(a.canonical()), fnv1a64(b.canonical()));
}

TEST(Fnv, KnownVectors) {
  EXPECT_EQ(fnv1a64(""), 0xcbf29ce484222325ULL);
  EXPECT_EQ(fnv1a64("a"), 0xaf63dc4c8601ec8cULL);
}

TEST(SimConfigFrom, Fields) {
  const auto c = sim_config_from(KeyValueConfig::parse(
      "n = 3\nrho = 0.9\ndelta_r = 7\npolicy = maxweight\nhorizon = 1000\nwarmup = 10\nseed = 5\n"));
  EXPECT_EQ(c.n, 3);
  EXPECT_NEAR(c.traffic.epsilon, 0.1, 1e-15);
  EXPECT_EQ(c.delta_r, 7);
  EXPECT_EQ(c.policy.kind, PolicyKind::MaxWeight);
  EXPECT_EQ(c.seed, 5u);
  EXPECT_NEAR(c.traffic.nu(1, 2), 1.0 / 3.0, 1e-15);
}

TEST(SimConfigFrom, TrafficShapes) {
  const auto id = sim_config_from(KeyValueConfig::parse("n = 3\ntraffic = identity\nepsilon = 0.3\n"));
  EXPECT_EQ(id.traffic.nu(0, 0), 1.0);
  EXPECT_EQ(id.traffic.nu(0, 1), 0.0);
  const auto custom = sim_config_from(KeyValueConfig::parse("nu = [[0.5, 0.5], [0.5, 0.5]]\nfamily = bernoulli\n"));
  EXPECT_EQ(custom.n, 2);
  EXPECT_EQ(custom.traffic.family, ArrivalFamily::Bernoulli);
  EXPECT_AMW_ERROR(sim_config_from(KeyValueConfig::parse("epsilon = 0.1\nrho = 0.9\n")), ErrorCode::ConfigInvalid);
  EXPECT_AMW_ERROR(sim_config_from(KeyValueConfig::parse("traffic = skewed\n")), ErrorCode::ConfigInvalid);
}

TEST(Sweep, ValidationRejectsBadSpecs) {
  auto s = tiny_sweep();
  s.values = {0.3, 0.1, 0.2};
  EXPECT_AMW_ERROR(validate_sweep(s), ErrorCode::ConfigInvalid);
  s = tiny_sweep();
  s.values = {0.3, 0.3, 0.1};
  EXPECT_AMW_ERROR(validate_sweep(s), ErrorCode::ConfigInvalid);
  s = tiny_sweep();
  s.replications = 0;
  EXPECT_AMW_ERROR(validate_sweep(s), ErrorCode::ConfigInvalid);
  s = tiny_sweep();
  s.values = {0.3, 1.5};
  EXPECT_AMW_ERROR(validate_sweep(s), ErrorCode::ConfigInvalid);
}

TEST(Sweep, AxisMapping) {
  auto s = tiny_sweep();
  s.axis = SweepAxis::Rho;
  EXPECT_NEAR(config_for_point(s, 0.96).traffic.epsilon, 0.04, 1e-15);
  s.axis = SweepAxis::N;
  const auto c = config_for_point(s, 5);
  EXPECT_EQ(c.n, 5);
  EXPECT_EQ(c.traffic.n(), 5);
  s.axis = SweepAxis::DeltaR;
  EXPECT_EQ(config_for_point(s, 40).delta_r, 40);
  s.axis = SweepAxis::Delta;
  EXPECT_EQ(config_for_point(s, 0.05).policy.delta, 0.05);
}

TEST(Sweep, ResultIndependentOfThreadCount) {
  auto s = tiny_sweep();
  s.threads = 1;
  const auto a = sweep_to_json(run_sweep(s));
  s.threads = 3;
  const auto b = sweep_to_json(run_sweep(s));
  EXPECT_EQ(a.dump(), b.dump());
  ASSERT_EQ(a["points"].size(), 3u);
  EXPECT_EQ(a["points"][0]["seeds"].size(), 2u);
  EXPECT_NE(a["points"][0]["seeds"][0], a["points"][0]["seeds"][1]);
  EXPECT_FALSE(a["slope"].is_null());
}

TEST(Sweep, OutputsAreReproducible) {
  const auto s = tiny_sweep();
  const auto d1 = scratch("sweep1");
  const auto d2 = scratch("sweep2");
  write_sweep_outputs(run_sweep(s, 1), d1);
  write_sweep_outputs(run_sweep(s, 1), d2);
  for (const char* f : {"epsilon.csv", "points.csv", "sweep.json", "epsilon_vs_mean_total_q.dat"}) {
    ASSERT_TRUE(fs::exists(d1 / f)) << f;
    EXPECT_EQ(slurp(d1 / f), slurp(d2 / f)) << f;
  }
  EXPECT_EQ(slurp(d1 / "epsilon.csv").substr(0, 33), "epsilon,mean_total_q,ci_lo,ci_hi\n");
}

TEST(Sweep, MeanQueueGrowsWithLoad) {
  auto s = tiny_sweep();
  s.axis = SweepAxis::Rho;
  s.values = {0.6, 0.7, 0.8};
  s.replications = 1;
  const auto r = run_sweep(s);
  for (std::size_t k = 1; k < r.points.size(); ++k)
    EXPECT_GE(r.points[k].mean_total_q.ci_hi, r.points[k - 1].mean_total_q.ci_lo);
  EXPECT_FALSE(r.fit.has_value());
}

TEST(Pooling, MeanOfMeans) {
  const auto e = pool_replications({{1.0, 0.3, 0.0, 0.0}, {3.0, 0.4, 0.0, 0.0}});
  EXPECT_DOUBLE_EQ(e.mean, 2.0);
  EXPECT_DOUBLE_EQ(e.se, 0.25);
}

TEST(IdentitySuite, AdaptiveRunReportsAllChecks) {
  SimConfig c;
  c.n = 3;
  c.traffic = TrafficSpec::uniform(3, 0.1);
  c.delta_r = 5;
  c.horizon = 400000;
  c.warmup = 40000;
  const auto reports = identity_suite(run(c));
  ASSERT_EQ(reports.size(), 4u);
  EXPECT_EQ(reports[0].identity, "unused_service_drift");
  EXPECT_EQ(reports[3].identity, "weight_lower_bound");
}

class Cli : public ::testing::Test {
 protected:
  static int call(const std::string& args) {
    const int rc = std::system((std::string(AMW_CLI_PATH) + " " + args + " >/dev/null 2>&1").c_str());
    return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
  }
};

TEST_F(Cli, RunThenCheck) {
  const auto dir = scratch("cli_run");
  std::ofstream(dir / "run.cfg") << "n = 3\nepsilon = 0.1\ndelta_r = 5\nhorizon = 300000\nwarmup = 30000\n";
  ASSERT_EQ(call("run --config " + (dir / "run.cfg").string() + " --out " + (dir / "out").string()), 0);
  for (const char* f : {"run.json", "run_summary.csv", "identities.json"}) EXPECT_TRUE(fs::exists(dir / "out" / f)) << f;
  EXPECT_EQ(call("check --run " + (dir / "out" / "run.json").string()), 0);
}

TEST_F(Cli, SweepWritesTable) {
  const auto dir = scratch("cli_sweep");
  std::ofstream(dir / "s.cfg") << "n = 3\ndelta_r = 3\nhorizon = 40000\nwarmup = 4000\naxis = epsilon\n"
                                  "values = [0.3, 0.2, 0.1]\n";
  ASSERT_EQ(call("sweep --threads 2 --config " + (dir / "s.cfg").string() + " --out " + (dir / "o").string()), 0);
  EXPECT_TRUE(fs::exists(dir / "o" / "epsilon.csv"));
  const auto j = nlohmann::json::parse(slurp(dir / "o" / "sweep.json"));
  EXPECT_TRUE(j["slope"].is_number());
}

TEST_F(Cli, ConfigErrors) {
  const auto dir = scratch("cli_bad");
  EXPECT_EQ(call("run --config " + (dir / "missing.cfg").string()), 1);
  std::ofstream(dir / "typo.cfg") << "epsilonn = 0.1\n";
  EXPECT_EQ(call("run --config " + (dir / "typo.cfg").string()), 1);
  std::ofstream(dir / "bad.cfg") << "epsilon = 2\n";
  EXPECT_EQ(call("run --config " + (dir / "bad.cfg").string()), 1);
  EXPECT_EQ(call("frobnicate"), 1);
}

TEST_F(Cli, OracleSelfTest) { EXPECT_EQ(call("oracle --trials 100"), 0); }

}  // namespace
}  // namespace amw
