// Copyright 2026 The odaframe Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "odaframe/ops/job.hpp"
#include "odaframe/plugins/deciles.hpp"
#include "odaframe/plugins/querytest.hpp"
#include "odaframe/sensor/topic.hpp"

namespace oda {

// Case studies on a synthetic cluster. Except for the overhead case they run
// on a simulated clock, so the same seed gives identical results. Times in
// results are nanoseconds; CSV time columns are seconds since kScenarioEpoch.

inline constexpr Timestamp kScenarioEpoch = 1'700'000'000ULL * kNsPerSec;

enum class CaseStudy { kPower, kJobs, kClustering, kOverhead };

std::string_view to_string(CaseStudy c);
std::optional<CaseStudy> parse_case_study(std::string_view text);

// --- power prediction ------------------------------------------------------

/// Each node has power (W), ips (million instructions/s), idle (0.1 %) and
/// temp (0.1 degC) sensors; a regressor predicts every node's next power
/// sample.
struct PowerScenario {
  std::uint64_t seed = 1;
  Duration duration = 600 * kNsPerSec;
  Duration interval = 250 * kNsPerMs;
  std::size_t nodes = 4;
  std::size_t training_set_size = 2000;
  std::size_t trees = 32;
};

struct PowerPrediction {
  /// Tick that produced the prediction; it targets the next sample.
  Timestamp time = 0;
  std::string node;
  double predicted_w = 0.0;
  double actual_w = 0.0;
};

struct ErrorBand {
  double low_w = 0.0;
  double high_w = 0.0;
  std::size_t samples = 0;
  double mean_relative_error = 0.0;
};

struct PowerResult {
  std::vector<PowerPrediction> predictions;
  std::vector<ErrorBand> bands;
  double mean_relative_error = 0.0;
  /// Range of the responses the model was trained on.
  double response_min_w = 0.0;
  double response_max_w = 0.0;
  std::optional<Timestamp> trained_at;
};

PowerResult run_power_scenario(const PowerScenario& scenario);

// --- per-job CPI deciles ---------------------------------------------------

/// Jobs of `nodes_per_job` nodes each run on a cluster of jobs *
/// nodes_per_job nodes with `cpus` cores. A pusher computes per-core CPI from
/// cpu-cycles and instructions counters; a collector reduces it to deciles
/// per job.
struct JobsScenario {
  std::uint64_t seed = 1;
  Duration duration = 300 * kNsPerSec;
  Duration sample_interval = kNsPerSec;
  Duration perf_interval = kNsPerSec;
  Duration persyst_interval = 5 * kNsPerSec;
  std::size_t jobs = 4;
  std::size_t nodes_per_job = 4;
  std::size_t cpus = 4;
};

struct CounterTrace {
  /// "/r01/c01/s01/cpu0/"
  std::string cpu_path;
  Topic cycles;
  Topic instructions;
  Topic cpi;
  std::vector<SensorReading> cycle_readings;
  std::vector<SensorReading> instruction_readings;
};

struct DecileRow {
  Timestamp time = 0;
  std::string job_id;
  /// Fixed-point CPI deciles d0..d10.
  std::array<std::int64_t, kDecileCount> deciles{};
};

struct JobsResult {
  std::vector<JobInfo> jobs;
  std::vector<CounterTrace> counters;
  /// Sorted by (time, job id).
  std::vector<DecileRow> deciles;
  Duration perf_window = 0;
  Duration persyst_window = 0;
  /// Every collector tick of the persyst operator.
  std::vector<Timestamp> persyst_ticks;
};

JobsResult run_jobs_scenario(const JobsScenario& scenario);

// --- node clustering -------------------------------------------------------

/// `groups` node populations with distinct power, temperature and idle
/// levels plus `outliers` nodes displaced 10 sigma from a group centre.
struct ClusteringScenario {
  std::uint64_t seed = 1;
  std::size_t nodes_per_group = 100;
  std::size_t outliers = 2;
  Duration duration = 600 * kNsPerSec;
  Duration interval = kNsPerSec;
};

struct NodeCluster {
  std::string node;
  double power_w = 0.0;
  double temperature_c = 0.0;
  double idle_pct = 0.0;
  int label = 0;
  /// Generating group, -1 for injected outliers.
  int truth = 0;
};

struct ClusteringResult {
  std::vector<NodeCluster> nodes;
  std::size_t components = 0;
};

ClusteringResult run_clustering_scenario(const ClusteringScenario& scenario);

// --- overhead --------------------------------------------------------------

/// Real-time pusher with a tester source and a querytest operator,
/// measured per (query count, range, mode) cell.
struct OverheadScenario {
  std::size_t sensors = 1000;
  Duration interval = kNsPerSec;
  Duration cache = 180 * kNsPerSec;
  std::vector<std::size_t> queries{1, 10, 100};
  std::vector<Duration> ranges{0, 30 * kNsPerSec, 90 * kNsPerSec, 180 * kNsPerSec};
  std::vector<QueryMode> modes{QueryMode::kRelative, QueryMode::kAbsolute};
  Duration cell = 8 * kNsPerSec;
  Duration warmup = 2 * kNsPerSec;
};

struct OverheadCell {
  std::size_t queries = 0;
  Duration range = 0;
  QueryMode mode = QueryMode::kRelative;
  std::size_t samples = 0;
  double median_latency_us = 0.0;
  double p99_latency_us = 0.0;
  double cpu_percent = 0.0;
  double rss_mb = 0.0;
};

struct OverheadResult {
  /// Sampling and publishing only, no queries.
  double baseline_cpu_percent = 0.0;
  double baseline_rss_mb = 0.0;
  std::vector<OverheadCell> cells;
};

OverheadResult run_overhead_scenario(const OverheadScenario& scenario);

// --- CSV output ------------------------------------------------------------

/// Writes predictions.csv and error_by_band.csv.
void write_power_csv(const PowerResult& result, const std::filesystem::path& dir);
/// Writes job_deciles.csv.
void write_jobs_csv(const JobsResult& result, const std::filesystem::path& dir);
/// Writes node_clusters.csv.
void write_clustering_csv(const ClusteringResult& result, const std::filesystem::path& dir);
/// Writes overhead_grid.csv.
void write_overhead_csv(const OverheadResult& result, const std::filesystem::path& dir);

/// Runs a case study with default parameters, writes its CSVs and a
/// manifest.json into `out_dir`, and returns headline metrics.
std::map<std::string, double> run_scenario(CaseStudy c, std::uint64_t seed,
                                           const std::filesystem::path& out_dir);

}  // namespace oda
