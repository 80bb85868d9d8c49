// Copyright 2026 The odaframe Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <memory>
#include <vector>

#include "odaframe/daemon/daemon_config.hpp"
#include "odaframe/sensor/source.hpp"

namespace oda {

/// Replays recorded readings from a CSV file of "topic,timestamp_ns,value"
/// lines. Timestamps are taken relative to the earliest one and replayed
/// relative to the first sample() call. Lines starting with '#' are skipped.
class FileReplaySource : public SensorSource {
 public:
  /// Throws Error(kConfigError) for unreadable files or malformed lines.
  FileReplaySource(const std::filesystem::path& file, Duration interval);

  std::string name() const override { return "replay"; }
  const std::vector<Topic>& topics() const override { return topics_; }
  Duration interval() const override { return interval_; }
  void sample(Timestamp now, const Sink& sink) override;

  bool finished() const noexcept { return next_ >= records_.size(); }

 private:
  struct Record {
    Duration offset;
    std::size_t topic;
    std::int64_t value;
  };
  std::vector<Topic> topics_;
  std::vector<Record> records_;
  Duration interval_;
  std::optional<Timestamp> start_;
  std::size_t next_ = 0;
};

/// Builds a source from its config section:
///   source tester { prefix /node01  sensors 1000  interval_ms 1000 }
///   source replay { file trace.csv  interval_ms 1000 }
/// `default_interval` applies when interval_ms is absent.
std::unique_ptr<SensorSource> make_source(const SourceConfig& config, Duration default_interval);

}  // namespace oda
