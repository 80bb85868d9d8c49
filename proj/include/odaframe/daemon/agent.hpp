// Copyright 2026 The odaframe Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <atomic>
#include <functional>
#include <memory>
#include <optional>
#include <shared_mutex>
#include <span>
#include <unordered_map>

#include "odaframe/ops/job.hpp"
#include "odaframe/ops/operator_manager.hpp"
#include "odaframe/query/query_engine.hpp"
#include "odaframe/sensor/sensor_cache.hpp"
#include "odaframe/transport/store.hpp"
#include "odaframe/tree/sensor_tree.hpp"

namespace oda {

struct AgentOptions {
  Duration cache_capacity = 180 * kNsPerSec;
  Duration default_interval = kNsPerSec;
  std::size_t workers = 4;
  std::optional<HierarchySpec> hierarchy;
};

/// Where streaming outputs go: the publisher in a pusher, the store in a
/// collector.
using ReadingSink = std::function<void(const Topic& topic, std::span<const SensorReading> readings)>;

/// The sensor space plus its analytics: caches, sensor tree, query engine,
/// operator manager and job registry. Pushers and collectors are built on
/// it.
class Agent {
 public:
  explicit Agent(AgentOptions options = {}, PluginRegistry& registry = PluginRegistry::builtin());
  ~Agent();

  Agent(const Agent&) = delete;
  Agent& operator=(const Agent&) = delete;

  /// Creates caches for unknown topics; `interval` 0 uses the default.
  void ensure_sensors(std::span<const Topic> topics, Duration interval = 0);
  /// Stores readings into the topic's cache, creating it when needed. Does
  /// not forward anywhere.
  void ingest(const Topic& topic, std::span<const SensorReading> readings);

  std::shared_ptr<SensorCache> cache(const Topic& topic) const;
  std::vector<Topic> sensors() const;
  std::size_t sensor_count() const;

  /// Rebuilds the sensor tree if sensors were added since the last build.
  void refresh_tree();

  /// Attach before operators run; queries older than the caches then reach
  /// the store.
  void attach_store(std::shared_ptr<TimeSeriesStore> store);
  std::shared_ptr<TimeSeriesStore> store() const;
  void set_output_sink(ReadingSink sink);

  /// Refreshes the tree and runs the operators due at `now`.
  void tick(Timestamp now);

  QueryEngine& engine() noexcept { return engine_; }
  OperatorManager& operators() noexcept { return *manager_; }
  JobRegistry& jobs() noexcept { return jobs_; }
  const AgentOptions& options() const noexcept { return options_; }

  std::uint64_t outputs_published() const noexcept { return outputs_.load(); }

 private:
  void publish_outputs(const Operator& op, std::vector<OutputReading> outputs);

  AgentOptions options_;
  QueryEngine engine_;
  JobRegistry jobs_;

  mutable std::shared_mutex sensors_mutex_;
  std::unordered_map<Topic, std::shared_ptr<SensorCache>> caches_;
  std::atomic<bool> tree_dirty_{false};
  std::mutex tree_mutex_;

  std::shared_ptr<TimeSeriesStore> store_;
  mutable std::mutex sink_mutex_;
  ReadingSink sink_;
  std::atomic<std::uint64_t> outputs_{0};

  std::unique_ptr<OperatorManager> manager_;
};

}  // namespace oda
