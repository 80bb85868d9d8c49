// Copyright 2026 The odaframe Authors
// SPDX-License-Identifier: Apache-2.0

#include "odaframe/daemon/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <mutex>
#include <numbers>
#include <thread>

#include <json.hpp>
#include <spdlog/fmt/fmt.h>
#include <spdlog/spdlog.h>

#include "odaframe/common/clock.hpp"
#include "odaframe/common/error.hpp"
#include "odaframe/daemon/agent.hpp"
#include "odaframe/daemon/daemons.hpp"
#include "odaframe/daemon/proc_stats.hpp"
#include "odaframe/daemon/signals.hpp"
#include "odaframe/plugins/clustering.hpp"
#include "odaframe/plugins/gaussian_mixture.hpp"
#include "odaframe/plugins/persyst.hpp"
#include "odaframe/plugins/regressor.hpp"
#include "odaframe/plugins/tester.hpp"
#include "odaframe/transport/pubsub.hpp"

namespace oda {

namespace {

double seconds_since_epoch(Timestamp t) {
  return static_cast<double>(t - kScenarioEpoch) / static_cast<double>(kNsPerSec);
}

std::string node_path(std::size_t chassis, std::size_t slot) {
  return fmt::format("/r01/c{:02}/s{:02}/", chassis, slot);
}

// Independent streams per (purpose, entity), derived from the scenario seed.
std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t purpose, std::uint64_t entity = 0) {
  std::uint64_t z = seed * 0x9E3779B97F4A7C15ULL + (purpose << 32) + entity + 1;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

template <typename T>
std::shared_ptr<T> find_operator(Agent& agent, const std::string& plugin, const std::string& name) {
  auto op = std::dynamic_pointer_cast<T>(agent.operators().find(plugin, name));
  if (!op) throw Error(ErrorCode::kUnknownOperator, plugin + "/" + name + " is not loaded");
  return op;
}

std::ofstream open_output(const std::filesystem::path& dir, const std::string& name) {
  std::filesystem::create_directories(dir);
  std::ofstream out(dir / name);
  if (!out) throw Error(ErrorCode::kIoError, "cannot write " + (dir / name).string());
  return out;
}

}  // namespace

std::string_view to_string(CaseStudy c) {
  switch (c) {
    case CaseStudy::kPower: return "power";
    case CaseStudy::kJobs: return "jobs";
    case CaseStudy::kClustering: return "clustering";
    case CaseStudy::kOverhead: return "overhead";
  }
  return "unknown";
}

std::optional<CaseStudy> parse_case_study(std::string_view text) {
  for (auto c : {CaseStudy::kPower, CaseStudy::kJobs, CaseStudy::kClustering, CaseStudy::kOverhead})
    if (to_string(c) == text) return c;
  return std::nullopt;
}

// --- power -----------------------------------------------------------------

PowerResult run_power_scenario(const PowerScenario& sc) {
  if (sc.interval == 0 || sc.duration < sc.interval || sc.nodes == 0)
    throw Error(ErrorCode::kInvalidArgument, "power scenario needs nodes and a positive interval");

  AgentOptions opts;
  opts.default_interval = sc.interval;
  opts.workers = 1;
  Agent agent(opts);

  struct NodeSim {
    std::string path;
    LoadProfile load;
    PowerSignal power;
    Noise noise;
    double temp_c = 35.0;
    Topic power_t, ips_t, idle_t, temp_t;
  };
  std::vector<NodeSim> nodes;
  std::vector<Topic> topics;
  for (std::size_t i = 0; i < sc.nodes; ++i) {
    const std::string path = node_path(1, i + 1);
    Noise phase(stream_seed(sc.seed, 1, i));
    nodes.push_back({path, LoadProfile(stream_seed(sc.seed, 2, i), 5.0, 30.0, 2.0),
                     PowerSignal(PowerModel{}, stream_seed(sc.seed, 3, i), phase.uniform(0.0, 6.28)),
                     Noise(stream_seed(sc.seed, 4, i)), 35.0, Topic(path + "power"),
                     Topic(path + "ips"), Topic(path + "idle"), Topic(path + "temp")});
    for (const auto& t : {nodes.back().power_t, nodes.back().ips_t, nodes.back().idle_t, nodes.back().temp_t})
      topics.push_back(t);
  }
  agent.ensure_sensors(topics, sc.interval);
  agent.refresh_tree();

  const std::string config = fmt::format(R"(operator power-pred {{
    interval_ms {}
    target power
    training_set_size {}
    trees {}
    seed {}
    template {{
        input:
            <bottomup>power
            <bottomup>ips
            <bottomup>idle
            <bottomup>temp
        output:
            <bottomup>power-pred
    }}
}}
)",
                                         sc.interval / kNsPerMs, sc.training_set_size, sc.trees, sc.seed);
  agent.operators().set_epoch(kScenarioEpoch);
  agent.operators().load_plugin("regressor", config);
  agent.operators().start_all();
  auto op = find_operator<RegressorOperator>(agent, "regressor", "power-pred");

  std::mutex mutex;
  PowerResult result;
  agent.set_output_sink([&](const Topic& t, std::span<const SensorReading> rs) {
    std::lock_guard lock(mutex);
    for (const auto& r : rs)
      result.predictions.push_back({r.timestamp, std::string(t.parent_path()), from_fixed_point(r.value), 0.0});
  });

  std::map<std::pair<std::string, Timestamp>, double> actual;
  const double dt = static_cast<double>(sc.interval) / static_cast<double>(kNsPerSec);
  const std::size_t steps = sc.duration / sc.interval;
  for (std::size_t k = 0; k <= steps; ++k) {
    const Timestamp t = kScenarioEpoch + k * sc.interval;
    const double ts = static_cast<double>(k) * dt;
    for (auto& n : nodes) {
      const double load = n.load.at(ts);
      const double power = n.power.next(load, ts);
      const double ips = std::max(0.0, 8000.0 * load + n.noise(40.0));
      const double idle = std::clamp(1000.0 * (1.0 - load) + n.noise(15.0), 0.0, 1000.0);
      // First-order thermal lag towards a power-dependent equilibrium.
      n.temp_c += (30.0 + 0.12 * (power - 150.0) - n.temp_c) * dt / 20.0;
      const auto p = static_cast<std::int64_t>(std::llround(power));
      const SensorReading rp{p, t};
      const SensorReading ri{std::llround(ips), t};
      const SensorReading rd{std::llround(idle), t};
      const SensorReading rt{std::llround(n.temp_c * 10.0 + n.noise(1.0)), t};
      agent.ingest(n.power_t, std::span(&rp, 1));
      agent.ingest(n.ips_t, std::span(&ri, 1));
      agent.ingest(n.idle_t, std::span(&rd, 1));
      agent.ingest(n.temp_t, std::span(&rt, 1));
      actual[{n.path, t}] = static_cast<double>(p);
    }
    agent.tick(t);
    if (!result.trained_at && op->model_ready()) result.trained_at = t;
  }
  agent.operators().stop_all();

  std::vector<PowerPrediction> matched;
  matched.reserve(result.predictions.size());
  for (auto& p : result.predictions) {
    auto it = actual.find({p.node, p.time + sc.interval});
    if (it == actual.end()) continue;
    p.actual_w = it->second;
    matched.push_back(p);
  }
  std::sort(matched.begin(), matched.end(), [](const auto& a, const auto& b) {
    return std::tie(a.time, a.node) < std::tie(b.time, b.node);
  });
  result.predictions = std::move(matched);
  std::tie(result.response_min_w, result.response_max_w) = op->response_range();

  constexpr double kBandWidth = 50.0;
  std::map<long, std::pair<std::size_t, double>> bands;
  double total = 0.0;
  for (const auto& p : result.predictions) {
    const double rel = std::abs(p.predicted_w - p.actual_w) / std::abs(p.actual_w);
    total += rel;
    auto& b = bands[static_cast<long>(std::floor(p.actual_w / kBandWidth))];
    ++b.first;
    b.second += rel;
  }
  if (!result.predictions.empty()) total /= static_cast<double>(result.predictions.size());
  result.mean_relative_error = total;
  for (const auto& [band, acc] : bands) {
    result.bands.push_back({static_cast<double>(band) * kBandWidth, static_cast<double>(band + 1) * kBandWidth,
                            acc.first, acc.second / static_cast<double>(acc.first)});
  }
  return result;
}

// --- jobs ------------------------------------------------------------------

JobsResult run_jobs_scenario(const JobsScenario& sc) {
  if (sc.jobs == 0 || sc.nodes_per_job == 0 || sc.cpus == 0 || sc.sample_interval == 0)
    throw Error(ErrorCode::kInvalidArgument, "jobs scenario needs jobs, nodes and cpus");
  const std::uint64_t duration_s = sc.duration / kNsPerSec;

  JobsResult result;
  result.perf_window = sc.perf_interval;
  result.persyst_window = sc.persyst_interval;

  // Job k runs on chassis k+1; later jobs start later and end earlier, and
  // the last one is still running when the scenario ends.
  std::vector<double> job_cpi;
  for (std::size_t k = 0; k < sc.jobs; ++k) {
    JobInfo job;
    job.job_id = fmt::format("job{}", k + 1);
    job.user_id = fmt::format("user{}", k % 2 + 1);
    for (std::size_t n = 0; n < sc.nodes_per_job; ++n) job.node_list.push_back(node_path(k + 1, n + 1));
    const std::uint64_t start_s = 10 + 25 * k;
    job.start = kScenarioEpoch + start_s * kNsPerSec;
    if (k + 1 < sc.jobs && duration_s > 15 + 20 * k + start_s + 10)
      job.end = kScenarioEpoch + (duration_s - 15 - 20 * k) * kNsPerSec;
    result.jobs.push_back(job);
    job_cpi.push_back(0.7 + 0.5 * static_cast<double>(k));
  }

  struct CpuSim {
    std::size_t trace;
    std::size_t chassis;
    CounterSignal cycles;
    CounterSignal instructions;
    Noise noise;
    double phase;
  };
  std::vector<CpuSim> cpus;
  std::vector<Topic> counter_topics;
  for (std::size_t c = 0; c < sc.jobs; ++c) {
    for (std::size_t n = 0; n < sc.nodes_per_job; ++n) {
      for (std::size_t u = 0; u < sc.cpus; ++u) {
        const std::string path = node_path(c + 1, n + 1) + fmt::format("cpu{}/", u);
        const std::uint64_t id = result.counters.size();
        Noise init(stream_seed(sc.seed, 1, id));
        CounterTrace trace{path, Topic(path + "cpu-cycles"), Topic(path + "instructions"), Topic(path + "cpi"), {}, {}};
        counter_topics.push_back(trace.cycles);
        counter_topics.push_back(trace.instructions);
        result.counters.push_back(std::move(trace));
        const auto start = static_cast<std::int64_t>(init.uniform(1e9, 5e10));
        cpus.push_back({id, c, CounterSignal(stream_seed(sc.seed, 2, id), start),
                        CounterSignal(stream_seed(sc.seed, 3, id), start / 2),
                        Noise(stream_seed(sc.seed, 4, id)), init.uniform(0.0, 6.28)});
      }
    }
  }

  AgentOptions popts;
  popts.default_interval = sc.sample_interval;
  popts.workers = 1;
  Agent pusher(popts);
  pusher.ensure_sensors(counter_topics, sc.sample_interval);
  pusher.refresh_tree();
  pusher.operators().set_epoch(kScenarioEpoch);
  pusher.operators().load_plugin("perfmetrics", fmt::format(R"(operator cpi {{
    interval_ms {}
    kind ratio
    numerator cpu-cycles
    denominator instructions
    template {{
        input:
            <bottomup>cpu-cycles
            <bottomup>instructions
        output:
            <bottomup>cpi
    }}
}}
)",
                                                            sc.perf_interval / kNsPerMs));
  pusher.operators().start_all();

  AgentOptions copts;
  copts.default_interval = sc.perf_interval;
  copts.workers = 1;
  Agent collector(copts);
  for (const auto& j : result.jobs) collector.jobs().upsert(j);
  collector.operators().set_epoch(kScenarioEpoch);
  collector.operators().load_plugin("persyst", fmt::format(R"(operator cpi-deciles {{
    interval_ms {}
    template {{
        input:
            <bottomup>cpi
        output:
            <bottomup-1>cpi
    }}
}}
)",
                                                           sc.persyst_interval / kNsPerMs));
  collector.operators().start_all();

  // Direct link: streaming pusher outputs land in the collector's caches.
  pusher.set_output_sink([&collector](const Topic& t, std::span<const SensorReading> rs) {
    collector.ingest(t, rs);
  });
  std::mutex mutex;
  std::map<std::pair<Timestamp, std::string>, std::map<std::size_t, std::int64_t>> collected;
  collector.set_output_sink([&](const Topic& t, std::span<const SensorReading> rs) {
    const std::string_view name = t.name();
    const auto dpos = name.rfind("-d");
    if (dpos == std::string_view::npos) return;
    const std::size_t k = std::stoul(std::string(name.substr(dpos + 2)));
    std::string parent(t.parent_path());
    parent.pop_back();
    const std::string job = parent.substr(parent.rfind('/') + 1);
    std::lock_guard lock(mutex);
    for (const auto& r : rs) collected[{r.timestamp, job}][k] = r.value;
  });

  const double dt = static_cast<double>(sc.sample_interval) / static_cast<double>(kNsPerSec);
  const std::size_t steps = sc.duration / sc.sample_interval;
  for (std::size_t step = 0; step <= steps; ++step) {
    const Timestamp t = kScenarioEpoch + step * sc.sample_interval;
    const double ts = static_cast<double>(step) * dt;
    for (auto& cpu : cpus) {
      const JobInfo& job = result.jobs[cpu.chassis];
      double util = 0.02 + std::abs(cpu.noise(0.005));
      double cpi = 3.0 * (1.0 + cpu.noise(0.02));
      if (job.active_at(t)) {
        util = std::clamp(0.9 + 0.05 * std::sin(2.0 * std::numbers::pi * ts / 40.0 + cpu.phase) + cpu.noise(0.01),
                          0.05, 1.0);
        cpi = job_cpi[cpu.chassis] * (1.0 + 0.2 * std::sin(2.0 * std::numbers::pi * ts / 60.0 + cpu.phase)) *
              (1.0 + cpu.noise(0.02));
      }
      cpi = std::max(cpi, 0.2);
      const double cycle_rate = 2.4e9 * util;
      if (step > 0) {
        cpu.cycles.advance(cycle_rate, dt);
        cpu.instructions.advance(cycle_rate / cpi, dt);
      }
      auto& trace = result.counters[cpu.trace];
      const SensorReading rc{cpu.cycles.value(), t};
      const SensorReading ri{cpu.instructions.value(), t};
      trace.cycle_readings.push_back(rc);
      trace.instruction_readings.push_back(ri);
      pusher.ingest(trace.cycles, std::span(&rc, 1));
      pusher.ingest(trace.instructions, std::span(&ri, 1));
    }
    pusher.tick(t);
    collector.tick(t);
    if ((t - kScenarioEpoch) % sc.persyst_interval == 0) result.persyst_ticks.push_back(t);
  }
  pusher.operators().stop_all();
  collector.operators().stop_all();

  for (const auto& [key, values] : collected) {
    if (values.size() != kDecileCount) {
      spdlog::warn("jobs scenario: incomplete deciles for {} at {}", key.second, key.first);
      continue;
    }
    DecileRow row{key.first, key.second, {}};
    for (const auto& [k, v] : values) row.deciles[k] = v;
    result.deciles.push_back(row);
  }
  return result;
}

// --- clustering ------------------------------------------------------------

namespace {

struct Behaviour {
  double power_w, temperature_c, idle_pct;
};

constexpr std::array<Behaviour, 3> kCentres{{{110.0, 38.0, 85.0}, {230.0, 52.0, 40.0}, {350.0, 68.0, 8.0}}};
// Spread of node averages around their group centre.
constexpr Behaviour kNodeSpread{0.5, 0.2, 0.05};
// Per-sample noise around a node's average.
constexpr Behaviour kSampleNoise{2.0, 0.8, 0.3};

}  // namespace

ClusteringResult run_clustering_scenario(const ClusteringScenario& sc) {
  if (sc.nodes_per_group == 0 || sc.interval == 0 || sc.duration < sc.interval)
    throw Error(ErrorCode::kInvalidArgument, "clustering scenario needs nodes and a positive interval");
  const std::size_t total = kCentres.size() * sc.nodes_per_group + sc.outliers;

  std::vector<int> truth;
  for (std::size_t g = 0; g < kCentres.size(); ++g) truth.insert(truth.end(), sc.nodes_per_group, static_cast<int>(g));
  truth.insert(truth.end(), sc.outliers, -1);
  std::mt19937_64 shuffle_rng(stream_seed(sc.seed, 9));
  std::shuffle(truth.begin(), truth.end(), shuffle_rng);

  struct NodeSim {
    std::string path;
    Behaviour mean;
    Noise noise;
    Topic power, temperature, idle;
  };
  std::vector<NodeSim> nodes;
  std::vector<Topic> topics;
  std::size_t outlier_index = 0;
  for (std::size_t i = 0; i < total; ++i) {
    const std::string path = node_path(i / 16 + 1, i % 16 + 1);
    Noise placement(stream_seed(sc.seed, 1, i));
    Behaviour mean{};
    if (truth[i] >= 0) {
      const auto& c = kCentres[static_cast<std::size_t>(truth[i])];
      mean = {c.power_w + placement(kNodeSpread.power_w), c.temperature_c + placement(kNodeSpread.temperature_c),
              c.idle_pct + placement(kNodeSpread.idle_pct)};
    } else {
      // 10 sigma from a group centre in every dimension.
      const auto& c = kCentres[outlier_index % kCentres.size()];
      const double s = outlier_index % 2 == 0 ? 1.0 : -1.0;
      mean = {c.power_w + s * 10.0 * kNodeSpread.power_w, c.temperature_c + 10.0 * kNodeSpread.temperature_c,
              c.idle_pct - s * 10.0 * kNodeSpread.idle_pct};
      ++outlier_index;
    }
    nodes.push_back({path, mean, Noise(stream_seed(sc.seed, 2, i)), Topic(path + "power"),
                     Topic(path + "temperature"), Topic(path + "idle")});
    topics.insert(topics.end(), {nodes.back().power, nodes.back().temperature, nodes.back().idle});
  }

  AgentOptions opts;
  opts.default_interval = sc.interval;
  opts.cache_capacity = sc.duration + sc.interval;
  opts.workers = 1;
  Agent agent(opts);
  agent.ensure_sensors(topics, sc.interval);
  agent.refresh_tree();
  agent.operators().set_epoch(kScenarioEpoch);
  // One fit over the whole run, at its end.
  agent.operators().load_plugin("clustering", fmt::format(R"(operator behaviour {{
    interval_ms {0}
    window_ms {0}
    max_components 8
    threshold 0.001
    covariance_prior_scale 0.001
    mean_precision_prior 0.001
    seed {1}
    template {{
        input:
            <bottomup>power
            <bottomup>temperature
            <bottomup>idle
        output:
            <bottomup>cluster
    }}
}}
)",
                                                          sc.duration / kNsPerMs, sc.seed));
  agent.operators().start_all();

  const std::size_t steps = sc.duration / sc.interval;
  for (std::size_t k = 1; k <= steps; ++k) {
    const Timestamp t = kScenarioEpoch + k * sc.interval;
    for (auto& n : nodes) {
      const SensorReading p{std::llround(n.mean.power_w + n.noise(kSampleNoise.power_w)), t};
      const SensorReading c{std::llround(n.mean.temperature_c + n.noise(kSampleNoise.temperature_c)), t};
      const SensorReading d{std::llround(n.mean.idle_pct + n.noise(kSampleNoise.idle_pct)), t};
      agent.ingest(n.power, std::span(&p, 1));
      agent.ingest(n.temperature, std::span(&c, 1));
      agent.ingest(n.idle, std::span(&d, 1));
    }
    agent.tick(t);
  }
  agent.operators().stop_all();

  auto op = find_operator<ClusteringOperator>(agent, "clustering", "behaviour");
  ClusteringResult result;
  const auto model = op->model();
  result.components = model ? model->size() : 0;
  const auto points = op->points();
  const auto labels = op->labels();
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    NodeCluster row;
    row.node = nodes[i].path;
    row.truth = truth[i];
    if (auto it = points.find(row.node); it != points.end()) {
      row.power_w = it->second(0);
      row.temperature_c = it->second(1);
      row.idle_pct = it->second(2);
    }
    auto it = labels.find(row.node);
    row.label = it == labels.end() ? kOutlierLabel : it->second;
    result.nodes.push_back(row);
  }
  return result;
}

// --- overhead --------------------------------------------------------------

namespace {

double percentile_us(std::vector<std::uint64_t>& ns, double q) {
  if (ns.empty()) return 0.0;
  std::sort(ns.begin(), ns.end());
  const auto idx = static_cast<std::size_t>(std::ceil(q * static_cast<double>(ns.size()))) ;
  return static_cast<double>(ns[std::min(ns.size() - 1, idx == 0 ? 0 : idx - 1)]) / 1000.0;
}

void sleep_for(Duration d) { std::this_thread::sleep_for(std::chrono::nanoseconds(d)); }

}  // namespace

OverheadResult run_overhead_scenario(const OverheadScenario& sc) {
  // The receiving end lives in this process too, so the CPU figure covers
  // both sides of the link.
  std::atomic<std::uint64_t> received{0};
  CollectorServer sink("127.0.0.1", 0, [&received](const Frame& f) { received.fetch_add(f.readings.size()); });
  sink.start();

  DaemonConfig cfg;
  cfg.role = DaemonRole::kPusher;
  cfg.connect_host = "127.0.0.1";
  cfg.connect_port = sink.port();
  cfg.cache_capacity = sc.cache;
  cfg.sampling_interval = sc.interval;
  cfg.workers = 2;
  PusherDaemon pusher(cfg);

  const std::string prefix = "/r01/c01/s01";
  auto tester = std::make_unique<TesterSource>(prefix, sc.sensors, sc.interval);
  // Fill the caches as if the pusher had been sampling for a full cache span.
  {
    const auto& topics = tester->topics();
    pusher.agent().ensure_sensors(topics, sc.interval);
    const Timestamp now = wall_now();
    const Timestamp aligned = now - now % sc.interval;
    const std::size_t history = sc.cache / sc.interval;
    for (const auto& t : topics) {
      std::vector<SensorReading> rs;
      rs.reserve(history);
      for (std::size_t j = history; j > 0; --j) rs.push_back({static_cast<std::int64_t>(history - j), aligned - j * sc.interval});
      pusher.agent().ingest(t, rs);
    }
  }
  pusher.add_source(std::move(tester));
  pusher.start();

  OverheadResult result;
  sleep_for(sc.warmup);
  {
    const auto a = sample_process();
    sleep_for(sc.cell);
    const auto b = sample_process();
    result.baseline_cpu_percent = cpu_percent(a, b);
    result.baseline_rss_mb = static_cast<double>(b.rss_bytes) / (1024.0 * 1024.0);
  }

  for (const auto mode : sc.modes) {
    for (const auto q : sc.queries) {
      for (const auto r : sc.ranges) {
        const std::string config = fmt::format(R"(operator qt {{
    interval_ms {}
    queries {}
    range_ms {}
    query_mode {}
    prefix {}/
    template {{
        operator_output:
            latency-p50
    }}
}}
)",
                                               sc.interval / kNsPerMs, q, r / kNsPerMs,
                                               mode == QueryMode::kRelative ? "relative" : "absolute", prefix);
        auto& om = pusher.agent().operators();
        om.load_plugin("querytest", config);
        om.start("querytest", "qt");
        auto op = find_operator<QuerytestOperator>(pusher.agent(), "querytest", "qt");
        sleep_for(sc.warmup);
        op->take_latencies();
        const auto a = sample_process();
        sleep_for(sc.cell);
        const auto b = sample_process();
        auto latencies = op->take_latencies();
        om.stop("querytest", "qt");

        OverheadCell cell;
        cell.queries = q;
        cell.range = r;
        cell.mode = mode;
        cell.samples = latencies.size();
        cell.median_latency_us = percentile_us(latencies, 0.5);
        cell.p99_latency_us = percentile_us(latencies, 0.99);
        cell.cpu_percent = cpu_percent(a, b);
        cell.rss_mb = static_cast<double>(b.rss_bytes) / (1024.0 * 1024.0);
        spdlog::info("overhead: Q={} R={}s {} median {:.2f}us cpu {:.2f}% rss {:.1f}MB", q, r / kNsPerSec,
                     mode == QueryMode::kRelative ? "relative" : "absolute", cell.median_latency_us,
                     cell.cpu_percent, cell.rss_mb);
        result.cells.push_back(cell);
      }
    }
  }
  pusher.agent().operators().unload_plugin("querytest");
  pusher.stop();
  sink.stop();
  spdlog::info("overhead: collector received {} readings", received.load());
  return result;
}

// --- CSV -------------------------------------------------------------------

void write_power_csv(const PowerResult& result, const std::filesystem::path& dir) {
  auto out = open_output(dir, "predictions.csv");
  out << "time_s,node,predicted_w,actual_w,relative_error\n";
  for (const auto& p : result.predictions) {
    out << fmt::format("{:.3f},{},{:.3f},{:.0f},{:.6f}\n", seconds_since_epoch(p.time), p.node, p.predicted_w,
                       p.actual_w, std::abs(p.predicted_w - p.actual_w) / std::abs(p.actual_w));
  }
  auto bands = open_output(dir, "error_by_band.csv");
  bands << "band_low_w,band_high_w,samples,mean_relative_error\n";
  for (const auto& b : result.bands)
    bands << fmt::format("{:.0f},{:.0f},{},{:.6f}\n", b.low_w, b.high_w, b.samples, b.mean_relative_error);
}

void write_jobs_csv(const JobsResult& result, const std::filesystem::path& dir) {
  auto out = open_output(dir, "job_deciles.csv");
  out << "time_s,job_id";
  for (std::size_t k = 0; k < kDecileCount; ++k) out << ",cpi_d" << k;
  out << "\n";
  for (const auto& row : result.deciles) {
    out << fmt::format("{:.3f},{}", seconds_since_epoch(row.time), row.job_id);
    for (const auto v : row.deciles) out << fmt::format(",{:.3f}", from_fixed_point(v));
    out << "\n";
  }
}

void write_clustering_csv(const ClusteringResult& result, const std::filesystem::path& dir) {
  auto out = open_output(dir, "node_clusters.csv");
  out << "node,power_w,temperature_c,idle_pct,label,group\n";
  for (const auto& n : result.nodes) {
    out << fmt::format("{},{:.4f},{:.4f},{:.4f},{},{}\n", n.node, n.power_w, n.temperature_c, n.idle_pct, n.label,
                       n.truth);
  }
}

void write_overhead_csv(const OverheadResult& result, const std::filesystem::path& dir) {
  auto out = open_output(dir, "overhead_grid.csv");
  out << "queries,range_s,mode,samples,median_latency_us,p99_latency_us,cpu_percent,rss_mb\n";
  out << fmt::format("0,0,none,0,0,0,{:.3f},{:.2f}\n", result.baseline_cpu_percent, result.baseline_rss_mb);
  for (const auto& c : result.cells) {
    out << fmt::format("{},{},{},{},{:.3f},{:.3f},{:.3f},{:.2f}\n", c.queries, c.range / kNsPerSec,
                       c.mode == QueryMode::kRelative ? "relative" : "absolute", c.samples, c.median_latency_us,
                       c.p99_latency_us, c.cpu_percent, c.rss_mb);
  }
}

std::map<std::string, double> run_scenario(CaseStudy c, std::uint64_t seed, const std::filesystem::path& out_dir) {
  std::map<std::string, double> metrics;
  std::vector<std::string> files;
  switch (c) {
    case CaseStudy::kPower: {
      PowerScenario sc;
      sc.seed = seed;
      const auto r = run_power_scenario(sc);
      write_power_csv(r, out_dir);
      files = {"predictions.csv", "error_by_band.csv"};
      metrics["mean_relative_error"] = r.mean_relative_error;
      metrics["predictions"] = static_cast<double>(r.predictions.size());
      if (r.trained_at) metrics["trained_at_s"] = seconds_since_epoch(*r.trained_at);
      break;
    }
    case CaseStudy::kJobs: {
      JobsScenario sc;
      sc.seed = seed;
      const auto r = run_jobs_scenario(sc);
      write_jobs_csv(r, out_dir);
      files = {"job_deciles.csv"};
      metrics["jobs"] = static_cast<double>(r.jobs.size());
      metrics["decile_rows"] = static_cast<double>(r.deciles.size());
      break;
    }
    case CaseStudy::kClustering: {
      ClusteringScenario sc;
      sc.seed = seed;
      const auto r = run_clustering_scenario(sc);
      write_clustering_csv(r, out_dir);
      files = {"node_clusters.csv"};
      metrics["components"] = static_cast<double>(r.components);
      metrics["outliers_flagged"] = static_cast<double>(
          std::count_if(r.nodes.begin(), r.nodes.end(), [](const auto& n) { return n.label == kOutlierLabel; }));
      break;
    }
    case CaseStudy::kOverhead: {
      const auto r = run_overhead_scenario(OverheadScenario{});
      write_overhead_csv(r, out_dir);
      files = {"overhead_grid.csv"};
      double cpu = r.baseline_cpu_percent, rss = r.baseline_rss_mb, lat = 0.0;
      for (const auto& cell : r.cells) {
        cpu = std::max(cpu, cell.cpu_percent);
        rss = std::max(rss, cell.rss_mb);
        lat = std::max(lat, cell.median_latency_us);
      }
      metrics["max_cpu_percent"] = cpu;
      metrics["max_rss_mb"] = rss;
      metrics["max_median_latency_us"] = lat;
      break;
    }
  }
  nlohmann::json manifest = {{"case", std::string(to_string(c))}, {"seed", seed}, {"schema_version", 1}};
  manifest["files"] = files;
  manifest["metrics"] = metrics;
  auto out = open_output(out_dir, "manifest.json");
  out << manifest.dump(2) << "\n";
  return metrics;
}

}  // namespace oda
