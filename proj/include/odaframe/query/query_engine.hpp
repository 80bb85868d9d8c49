// Copyright 2026 The odaframe Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <variant>
#include <vector>

#include "odaframe/ops/job.hpp"
#include "odaframe/sensor/sensor_cache.hpp"
#include "odaframe/tree/sensor_tree.hpp"

namespace oda {

struct RelativeRange {
  Duration offset_ns = 0;
};

struct AbsoluteRange {
  Timestamp t0 = 0;
  Timestamp t1 = 0;
};

struct QueryRequest {
  Topic topic;
  std::variant<RelativeRange, AbsoluteRange> range;

  static QueryRequest relative(Topic topic, Duration offset_ns) {
    return {std::move(topic), RelativeRange{offset_ns}};
  }
  static QueryRequest absolute(Topic topic, Timestamp t0, Timestamp t1) {
    return {std::move(topic), AbsoluteRange{t0, t1}};
  }
};

enum class DataSource { kCache, kStore };

struct QueryResult {
  std::vector<SensorReading> readings;
  /// Range reached past the oldest cached reading and no store could fill it.
  bool partial = false;
  DataSource source = DataSource::kCache;
};

/// Callbacks through which the hosting daemon exposes its data. Only
/// `cache_lookup` is mandatory.
struct DataSourceBinding {
  /// nullptr when the topic has no local cache.
  std::function<std::shared_ptr<const SensorCache>(const Topic&)> cache_lookup;
  /// nullopt when the store has never seen the topic.
  std::function<std::optional<std::vector<SensorReading>>(const Topic&, Timestamp, Timestamp)>
      store_query;
  std::function<std::optional<Timestamp>(const Topic&)> store_newest;
  /// Every known job; the engine filters by activity.
  std::function<std::vector<JobInfo>()> job_lookup;
};

/// Access point through which operators see the sensor space.
///
/// Queries prefer the local cache: a range is served from it when its start
/// is not older than the oldest cached reading. Otherwise the whole range
/// comes from the store if one is bound, or the cached part is returned with
/// `partial` set. Ranges are never stitched from both sources.
///
/// Each daemon owns one engine; `instance()` is the process-wide engine used
/// by a standalone daemon. Bindings are set once; the sensor tree snapshot is
/// swapped atomically.
class QueryEngine {
 public:
  QueryEngine() = default;
  explicit QueryEngine(DataSourceBinding binding) { bind(std::move(binding)); }

  QueryEngine(const QueryEngine&) = delete;
  QueryEngine& operator=(const QueryEngine&) = delete;

  static QueryEngine& instance();

  /// Throws Error(kInvalidArgument) when already bound or cache_lookup is unset.
  void bind(DataSourceBinding binding);
  bool bound() const;

  /// Throws Error(kUnknownSensor), Error(kInvalidRange) or Error(kNotReady).
  QueryResult query(const QueryRequest& request) const;

  /// Current immutable tree; holders keep their snapshot across updates.
  std::shared_ptr<const SensorTree> navigator() const;
  void set_tree(std::shared_ptr<const SensorTree> tree);

  /// Jobs active at `now`. Throws Error(kFeatureUnavailable) without a job
  /// lookup.
  std::vector<JobInfo> jobs(Timestamp now) const;

 private:
  QueryResult from_store(const Topic& topic, Timestamp t0, Timestamp t1) const;

  mutable std::mutex mutex_;
  std::shared_ptr<const DataSourceBinding> binding_;
  std::shared_ptr<const SensorTree> tree_ = std::make_shared<const SensorTree>();
};

}  // namespace oda
