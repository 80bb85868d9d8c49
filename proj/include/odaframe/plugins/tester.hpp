// Copyright 2026 The odaframe Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>

#include "odaframe/sensor/source.hpp"

namespace oda {

/// Monotonic counters: every sample writes the tick number (1, 2, ...) to all
/// sensors "<prefix>/t<index>". State is not persisted.
class TesterSource : public SensorSource {
 public:
  TesterSource(std::string prefix, std::size_t sensors, Duration interval);

  std::string name() const override { return "tester"; }
  const std::vector<Topic>& topics() const override { return topics_; }
  Duration interval() const override { return interval_; }
  void sample(Timestamp now, const Sink& sink) override;

  std::int64_t ticks() const noexcept { return counter_; }

 private:
  std::vector<Topic> topics_;
  Duration interval_;
  std::int64_t counter_ = 0;
};

}  // namespace oda
