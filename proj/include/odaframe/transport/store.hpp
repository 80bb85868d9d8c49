// Copyright 2026 The odaframe Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <atomic>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <span>
#include <vector>

#include "odaframe/sensor/topic.hpp"

namespace oda {

/// Persistent time series: one append-only file of 16-byte big-endian
/// (timestamp, value) records per topic, plus an index file of
/// "<file id> <topic>" lines.
///
/// Appends to one topic are serialized; readers run concurrently and see the
/// records committed before their query started.
class TimeSeriesStore {
 public:
  struct AppendResult {
    std::size_t appended = 0;
    std::size_t rejected = 0;
  };

  /// Opens or creates the store in `directory`. A torn trailing record from
  /// an interrupted write is truncated. Throws Error(kIoError).
  explicit TimeSeriesStore(std::filesystem::path directory);
  ~TimeSeriesStore();

  TimeSeriesStore(const TimeSeriesStore&) = delete;
  TimeSeriesStore& operator=(const TimeSeriesStore&) = delete;

  /// Sorts the batch by timestamp and appends it; records older than the
  /// newest stored one are rejected and counted. Throws Error(kIoError).
  AppendResult append(const Topic& topic, std::span<const SensorReading> readings);

  /// Stored readings with t0 <= t <= t1, or nullopt for a topic never
  /// stored. Throws Error(kInvalidRange) when t0 > t1.
  std::optional<std::vector<SensorReading>> query(const Topic& topic, Timestamp t0,
                                                  Timestamp t1) const;
  std::optional<Timestamp> newest(const Topic& topic) const;
  std::size_t record_count(const Topic& topic) const;

  std::vector<Topic> topics() const;
  std::uint64_t rejected() const noexcept { return rejected_.load(); }
  const std::filesystem::path& directory() const noexcept { return directory_; }

  /// Forces written records to stable storage.
  void sync();

 private:
  struct Segment;

  Segment* find(const Topic& topic) const;
  Segment& find_or_create(const Topic& topic);

  std::filesystem::path directory_;
  int index_fd_ = -1;
  mutable std::shared_mutex mutex_;
  std::map<Topic, std::unique_ptr<Segment>> segments_;
  std::uint64_t next_id_ = 0;
  std::atomic<std::uint64_t> rejected_{0};
};

}  // namespace oda
