#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "amw/config.hpp"
#include "amw/simulator.hpp"
#include "amw/stats.hpp"

namespace amw {

enum class SweepAxis { Epsilon, DeltaR, N, Rho, Delta };

std::string_view to_string(SweepAxis a) noexcept;
SweepAxis parse_sweep_axis(std::string_view s);

struct SweepSpec {
  SimConfig base;
  SweepAxis axis = SweepAxis::Epsilon;
  std::vector<double> values;
  int replications = 1;
  /// Fit log(mean total queue) against log(axis value). Defaults on for the
  /// epsilon, delta_r and n axes.
  std::optional<bool> fit;
  int threads = 1;
};

struct PointSummary {
  double value = 0.0;
  std::vector<std::uint64_t> seeds;
  std::vector<RunStats> runs;
  Estimate mean_total_q;  ///< pooled over replications
  Estimate mean_q_perp;
  Estimate mean_q_norm;
  Estimate mean_gap_at_instant;
  Estimate p_reconfig;
};

struct Provenance {
  std::uint64_t config_hash = 0;
  std::uint64_t base_seed = 0;
  std::string code_version;
};

struct SweepResult {
  SweepAxis axis = SweepAxis::Epsilon;
  std::vector<PointSummary> points;
  std::optional<LogLogFit> fit;
  Provenance provenance;
};

/// Seed of replication `rep` at sweep point `point`.
std::uint64_t point_seed(std::uint64_t base, std::size_t point, int rep);

/// The base configuration with the swept parameter set to `value`.
SimConfig config_for_point(const SweepSpec& spec, double value);

void validate_sweep(const SweepSpec& spec);

/// Runs every (point, replication) pair on a pool of spec.threads workers.
/// Results do not depend on the thread count. A failing run is rethrown with its
/// point and replication named.
SweepResult run_sweep(const SweepSpec& spec, std::uint64_t config_hash = 0,
                      const std::function<void(const std::string&)>& progress = {});

/// Pools independent replications: mean of means, SE = sqrt(sum se^2) / R.
Estimate pool_replications(const std::vector<Estimate>& reps);

// Config-file plumbing ------------------------------------------------------

inline constexpr const char* kEnvPrefix = "AMW_";

std::vector<std::string> known_config_keys();
SimConfig sim_config_from(const KeyValueConfig& cfg);
SweepSpec sweep_spec_from(const KeyValueConfig& cfg);
std::uint64_t fnv1a64(std::string_view text) noexcept;

/// Identity checks that apply to the run's policy.
std::vector<IdentityReport> identity_suite(const RunStats& stats);

nlohmann::json sweep_to_json(const SweepResult& r);

/// run.json (full statistics), run_summary.csv and identities.json.
void write_run_outputs(const RunStats& stats, const std::filesystem::path& dir, const Provenance& provenance = {});
/// <axis>.csv, <axis>_vs_mean_total_q.dat, points.csv and sweep.json.
void write_sweep_outputs(const SweepResult& result, const std::filesystem::path& dir);

std::string code_version();

}  // namespace amw
