// Copyright 2026 The odaframe Authors
// SPDX-License-Identifier: Apache-2.0

#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <regex>
#include <set>
#include <tuple>

namespace oda::testing {

CacheModel cache_model(const std::vector<SensorReading>& stores, Duration capacity) {
  CacheModel m;
  std::vector<SensorReading> accepted;
  for (const auto& r : stores) {
    if (!accepted.empty() && r.timestamp < accepted.back().timestamp) {
      ++m.dropped;
      continue;
    }
    accepted.push_back(r);
  }
  if (accepted.empty()) return m;
  const Timestamp newest = accepted.back().timestamp;
  const Timestamp floor = newest > capacity ? newest - capacity : 0;
  for (const auto& r : accepted)
    if (r.timestamp >= floor) m.retained.push_back(r);
  return m;
}

std::vector<SensorReading> scan_absolute(const std::vector<SensorReading>& entries, Timestamp t0,
                                         Timestamp t1) {
  std::vector<SensorReading> out;
  for (const auto& r : entries)
    if (r.timestamp >= t0 && r.timestamp <= t1) out.push_back(r);
  return out;
}

std::vector<SensorReading> scan_relative(const std::vector<SensorReading>& entries, Duration offset) {
  if (entries.empty()) return {};
  Timestamp newest = 0;
  for (const auto& r : entries) newest = std::max(newest, r.timestamp);
  return scan_absolute(entries, newest > offset ? newest - offset : 0, newest);
}

namespace {

struct RawNode {
  std::string path;  // "/a/b/"
  int depth = 0;
};

// Every strict path prefix of every topic, as "/a/", "/a/b/", ...
std::vector<RawNode> all_nodes(const std::vector<std::string>& topics) {
  std::set<std::string> paths;
  for (const auto& t : topics) {
    for (std::size_t i = 1; i < t.size(); ++i)
      if (t[i] == '/') paths.insert(t.substr(0, i + 1));
  }
  std::vector<RawNode> out;
  for (const auto& p : paths) out.push_back({p, static_cast<int>(std::count(p.begin(), p.end(), '/')) - 1});
  return out;
}

int max_depth(const std::vector<RawNode>& nodes) {
  int d = 0;
  for (const auto& n : nodes) d = std::max(d, n.depth);
  return d;
}

int level_depth(const LevelSpec& level, int deepest) {
  return level.anchor == LevelSpec::Anchor::kTopDown ? 1 + level.offset : deepest + level.offset;
}

bool node_matches(const RawNode& n, const SensorExpression& expr, int deepest) {
  if (n.depth != level_depth(expr.level, deepest)) return false;
  if (expr.filter && !std::regex_search(n.path, std::regex(*expr.filter))) return false;
  return true;
}

std::string parent_of(const std::string& topic) { return topic.substr(0, topic.rfind('/') + 1); }
std::string name_of(const std::string& topic) { return topic.substr(topic.rfind('/') + 1); }

bool starts_with(const std::string& s, const std::string& prefix) {
  return s.size() >= prefix.size() && s.compare(0, prefix.size(), prefix) == 0;
}

}  // namespace

std::vector<std::string> brute_force_domain(const std::vector<std::string>& topics,
                                            const SensorExpression& expr) {
  const auto nodes = all_nodes(topics);
  const int deepest = max_depth(nodes);
  std::set<std::string> out;
  for (const auto& t : topics) {
    if (name_of(t) != expr.sensor_name) continue;
    const std::string parent = parent_of(t);
    for (const auto& n : nodes) {
      if (n.path == parent && node_matches(n, expr, deepest)) out.insert(t);
    }
  }
  return {out.begin(), out.end()};
}

OracleBlocks brute_force_blocks(const std::vector<std::string>& topics, const BlockTemplate& tmpl) {
  const auto nodes = all_nodes(topics);
  const int deepest = max_depth(nodes);

  std::set<std::string> block_paths;
  for (const auto& n : nodes)
    for (const auto& e : tmpl.outputs)
      if (node_matches(n, e, deepest)) block_paths.insert(n.path);

  OracleBlocks result;
  for (const auto& path : block_paths) {
    Block b;
    b.name = path;
    bool ok = !tmpl.inputs.empty();
    std::set<std::string> seen;
    for (const auto& e : tmpl.inputs) {
      std::vector<std::string> hits;
      for (const auto& t : brute_force_domain(topics, e)) {
        const std::string owner = parent_of(t);
        if (starts_with(owner, path) || starts_with(path, owner)) hits.push_back(t);
      }
      if (hits.empty()) ok = false;
      for (const auto& h : hits)
        if (seen.insert(h).second) b.input_topics.emplace_back(h);
    }
    if (!ok) {
      result.skipped.push_back(path);
      continue;
    }
    std::set<std::string> out_seen;
    for (const auto& e : tmpl.outputs) {
      bool owns = false;
      for (const auto& n : nodes)
        if (n.path == path && node_matches(n, e, deepest)) owns = true;
      if (owns && out_seen.insert(path + e.sensor_name).second) b.output_topics.emplace_back(path + e.sensor_name);
    }
    result.blocks.push_back(std::move(b));
  }
  return result;
}

std::vector<std::string> example_system_topics() {
  std::vector<std::string> out = {"/r03/c01/power", "/r03/c02/power"};
  for (int s = 1; s <= 4; ++s) {
    const std::string server = "/r03/c02/s0" + std::to_string(s) + "/";
    out.push_back(server + "memory-used");
    for (int c = 0; c < 2; ++c) {
      const std::string cpu = server + "cpu" + std::to_string(c) + "/";
      out.push_back(cpu + "cpu-cycles");
      out.push_back(cpu + "cache-misses");
    }
  }
  return out;
}

std::vector<std::string> random_topics(std::mt19937_64& rng, std::size_t max_leaves) {
  static const char* kPrefixes[] = {"r", "c", "s", "cpu"};
  static const char* kSensors[] = {"power", "temp", "cpu-cycles", "healthy", "cpi"};
  std::uniform_int_distribution<std::size_t> leaves(1, max_leaves);
  std::uniform_int_distribution<int> depth(1, 4);
  std::uniform_int_distribution<int> index(0, 2);
  std::uniform_int_distribution<int> sensor(0, 4);
  std::set<std::string> out;
  const std::size_t n = leaves(rng);
  for (std::size_t i = 0; i < n; ++i) {
    std::string t;
    const int d = depth(rng);
    for (int level = 0; level < d; ++level) t += "/" + std::string(kPrefixes[level]) + std::to_string(index(rng));
    t += "/" + std::string(kSensors[sensor(rng)]);
    out.insert(t);
  }
  return {out.begin(), out.end()};
}

BlockTemplate random_template(std::mt19937_64& rng) {
  static const char* kSensors[] = {"power", "temp", "cpu-cycles", "healthy", "cpi"};
  static const char* kFilters[] = {"cpu", "c1", "^/r0/", "s[12]", "1/$"};
  std::uniform_int_distribution<int> count(1, 3);
  std::uniform_int_distribution<int> coin(0, 1);
  std::uniform_int_distribution<int> offset(0, 3);
  std::uniform_int_distribution<int> sensor(0, 4);
  std::uniform_int_distribution<int> filter(0, 4);
  auto expr = [&] {
    SensorExpression e;
    e.level = coin(rng) ? LevelSpec::topdown(offset(rng)) : LevelSpec::bottomup(offset(rng));
    if (coin(rng) && coin(rng)) e.filter = kFilters[filter(rng)];
    e.sensor_name = kSensors[sensor(rng)];
    return e;
  };
  BlockTemplate t;
  for (int i = count(rng); i > 0; --i) t.inputs.push_back(expr());
  for (int i = count(rng) % 2 + 1; i > 0; --i) t.outputs.push_back(expr());
  return t;
}

std::array<double, 11> sorted_deciles(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  std::array<double, 11> out{};
  const double last = static_cast<double>(values.size() - 1);
  for (int k = 0; k <= 10; ++k) {
    const double pos = last * k / 10.0;
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = static_cast<std::size_t>(std::ceil(pos));
    const double frac = pos - static_cast<double>(lo);
    out[static_cast<std::size_t>(k)] = values[lo] + (values[hi] - values[lo]) * frac;
  }
  return out;
}

double gaussian_pdf(const Eigen::VectorXd& mean, const Eigen::MatrixXd& cov, const Eigen::VectorXd& x) {
  const Eigen::FullPivLU<Eigen::MatrixXd> lu(cov);
  const Eigen::VectorXd d = x - mean;
  const double m = d.dot(lu.inverse() * d);
  const double k = static_cast<double>(mean.size());
  return std::exp(-0.5 * m) / std::sqrt(std::pow(2.0 * M_PI, k) * lu.determinant());
}

double permutation_agreement(const std::vector<int>& labels, const std::vector<int>& truth) {
  std::set<int> label_values;
  std::set<int> truth_values;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    if (truth[i] < 0) continue;
    label_values.insert(labels[i]);
    truth_values.insert(truth[i]);
  }
  std::vector<int> lv(label_values.begin(), label_values.end());
  std::vector<int> tv(truth_values.begin(), truth_values.end());
  // Pad so every truth value can map to some label, possibly a dummy.
  while (lv.size() < tv.size()) lv.push_back(std::numeric_limits<int>::min() + static_cast<int>(lv.size()));
  std::sort(lv.begin(), lv.end());
  std::size_t considered = 0;
  for (int t : truth) considered += t >= 0 ? 1 : 0;
  if (considered == 0) return 1.0;
  std::size_t best = 0;
  do {
    std::map<int, int> mapping;  // truth -> label
    for (std::size_t i = 0; i < tv.size(); ++i) mapping[tv[i]] = lv[i];
    std::size_t agree = 0;
    for (std::size_t i = 0; i < truth.size(); ++i)
      if (truth[i] >= 0 && mapping[truth[i]] == labels[i]) ++agree;
    best = std::max(best, agree);
  } while (std::next_permutation(lv.begin(), lv.end()));
  return static_cast<double>(best) / static_cast<double>(considered);
}

std::vector<OracleDecileRow> cpi_decile_oracle(const JobsResult& result, Duration perf_interval) {
  // Stage 1: CPI per core and perf tick, fixed-point.
  struct CoreCpi {
    std::string cpu_path;
    std::vector<std::pair<Timestamp, std::int64_t>> values;
  };
  std::vector<CoreCpi> cores;
  for (const auto& trace : result.counters) {
    CoreCpi core{trace.cpu_path, {}};
    const auto& cyc = trace.cycle_readings;
    const auto& ins = trace.instruction_readings;
    for (std::size_t i = 0; i < cyc.size(); ++i) {
      const Timestamp t = cyc[i].timestamp;
      if ((t - kScenarioEpoch) % perf_interval != 0) continue;
      const Timestamp from = t >= result.perf_window ? t - result.perf_window : 0;
      std::optional<std::size_t> first;
      for (std::size_t j = 0; j <= i; ++j)
        if (cyc[j].timestamp >= from) {
          first = j;
          break;
        }
      if (!first || *first == i) continue;
      const double dc = static_cast<double>(cyc[i].value - cyc[*first].value);
      const double di = static_cast<double>(ins[i].value - ins[*first].value);
      if (di == 0.0) continue;
      core.values.emplace_back(t, std::llround(dc / di * 1000.0));
    }
    cores.push_back(std::move(core));
  }

  // Stage 2: pool per active job and persyst tick.
  std::vector<OracleDecileRow> rows;
  for (Timestamp tick : result.persyst_ticks) {
    const Timestamp from = tick >= result.persyst_window ? tick - result.persyst_window : 0;
    for (const auto& job : result.jobs) {
      if (!(job.start <= tick && (!job.end || tick < *job.end))) continue;
      std::vector<double> pool;
      for (const auto& core : cores) {
        bool on_job = false;
        for (const auto& node : job.node_list) on_job = on_job || starts_with(core.cpu_path, node);
        if (!on_job) continue;
        for (const auto& [t, v] : core.values)
          if (t > from && t <= tick) pool.push_back(static_cast<double>(v));
      }
      if (pool.empty()) continue;
      rows.push_back({tick, job.job_id, sorted_deciles(pool)});
    }
  }
  std::sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) {
    return std::tie(a.time, a.job_id) < std::tie(b.time, b.job_id);
  });
  return rows;
}

}  // namespace oda::testing
