// amw: run, sweep and check switch simulations from a key = value config file.
//
// Exit status: 0 success, 1 configuration error, 2 failed check (run/sweep only
// with --strict; check and oracle always).

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "amw/error.hpp"
#include "amw/experiments.hpp"
#include "amw/oracles.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitCheck = 2;

struct Options {
  std::string config;
  std::string out = "results";
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;
  bool strict = false;
  std::string run_json;
  int trials = 200;
};

amw::KeyValueConfig load_config(const Options& o) {
  auto cfg = amw::KeyValueConfig::load(o.config);
  cfg.apply_env_overrides(amw::kEnvPrefix, amw::known_config_keys());
  if (o.seed) cfg.set("seed", *o.seed);
  if (o.threads) cfg.set("threads", *o.threads);
  const auto unknown = cfg.unknown_keys(amw::known_config_keys());
  if (!unknown.empty()) {
    std::string list;
    for (const auto& k : unknown) list += (list.empty() ? "" : ", ") + k;
    throw amw::Error(amw::ErrorCode::ConfigInvalid, o.config + ": unknown keys: " + list);
  }
  return cfg;
}

bool all_pass(const std::vector<amw::IdentityReport>& reports) {
  for (const auto& r : reports)
    if (r.status == amw::CheckStatus::Fail) return false;
  return true;
}

void print_reports(const std::vector<amw::IdentityReport>& reports) {
  for (const auto& r : reports) {
    const char* tag = r.status == amw::CheckStatus::Pass   ? "PASS"
                      : r.status == amw::CheckStatus::Fail ? "FAIL"
                                                           : "N/A ";
    std::cerr << tag << "  " << r.identity << "  lhs=" << r.lhs << " rhs=" << r.rhs << " se=" << r.se << '\n';
  }
}

int cmd_run(const Options& o) {
  amw::SimConfig c;
  std::uint64_t hash = 0;
  try {
    const auto cfg = load_config(o);
    c = amw::resolve_config(amw::sim_config_from(cfg));
    hash = amw::fnv1a64(cfg.canonical());
  } catch (const amw::Error& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  }
  const auto stats = amw::run(c);
  amw::write_run_outputs(stats, o.out, {hash, c.seed, amw::code_version()});
  const auto reports = amw::identity_suite(stats);
  print_reports(reports);
  std::cout << "mean_total_q " << stats.mean_total_q.mean << " [" << stats.mean_total_q.ci_lo << ", "
            << stats.mean_total_q.ci_hi << "]\n";
  return (o.strict && !all_pass(reports)) ? kExitCheck : kExitOk;
}

int cmd_sweep(const Options& o) {
  amw::SweepSpec spec;
  std::uint64_t hash = 0;
  try {
    const auto cfg = load_config(o);
    spec = amw::sweep_spec_from(cfg);
    amw::validate_sweep(spec);
    hash = amw::fnv1a64(cfg.canonical());
  } catch (const amw::Error& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  }
  const auto result = amw::run_sweep(spec, hash, [](const std::string& line) { std::cerr << line << '\n'; });
  amw::write_sweep_outputs(result, o.out);
  if (result.fit) std::cout << "slope " << result.fit->slope << " +- " << result.fit->stderr_slope << '\n';
  bool ok = true;
  for (const auto& p : result.points)
    for (const auto& r : p.runs) ok = ok && all_pass(amw::identity_suite(r));
  return (o.strict && !ok) ? kExitCheck : kExitOk;
}

int cmd_check(const Options& o) {
  amw::RunStats stats;
  try {
    std::ifstream f(o.run_json);
    if (!f) throw amw::Error(amw::ErrorCode::ConfigInvalid, "cannot read run file " + o.run_json);
    stats = nlohmann::json::parse(f).get<amw::RunStats>();
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "config error: " << o.run_json << ": " << e.what() << '\n';
    return kExitConfig;
  } catch (const amw::Error& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  }
  const auto reports = amw::identity_suite(stats);
  std::cout << nlohmann::json(reports).dump(2) << '\n';
  print_reports(reports);
  return all_pass(reports) ? kExitOk : kExitCheck;
}

int cmd_oracle(const Options& o) {
  const auto lines = amw::oracles::self_test(o.seed.value_or(1), o.trials);
  bool ok = true;
  for (const auto& l : lines) {
    std::cout << (l.pass ? "PASS " : "FAIL ") << l.name << ": " << l.detail << '\n';
    ok = ok && l.pass;
  }
  return ok ? kExitOk : kExitCheck;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Input-queued switch simulator with reconfiguration delay"};
  app.require_subcommand(1);
  Options o;

  auto add_common = [&o](CLI::App* sub) {
    sub->add_option("--config", o.config, "key = value config file")->required();
    sub->add_option("--out", o.out, "output directory");
    sub->add_option("--seed", o.seed, "override the base seed");
    sub->add_flag("--strict", o.strict, "exit 2 if an identity check fails");
  };

  auto* run = app.add_subcommand("run", "simulate one configuration");
  add_common(run);
  auto* sweep = app.add_subcommand("sweep", "simulate a parameter sweep");
  add_common(sweep);
  sweep->add_option("--threads", o.threads, "worker threads");
  auto* check = app.add_subcommand("check", "identity checks on a saved run.json");
  check->add_option("--run", o.run_json, "run.json written by `amw run`")->required();
  auto* oracle = app.add_subcommand("oracle", "matching and projection oracle self-tests");
  oracle->add_option("--seed", o.seed, "seed for the random instances");
  oracle->add_option("--trials", o.trials, "instances per check");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (*run) return cmd_run(o);
    if (*sweep) return cmd_sweep(o);
    if (*check) return cmd_check(o);
    if (*oracle) return cmd_oracle(o);
  } catch (const amw::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return e.code() == amw::ErrorCode::ConfigInvalid ? kExitConfig : kExitCheck;
  }
  return kExitOk;
}
