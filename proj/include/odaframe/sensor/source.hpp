// Copyright 2026 The odaframe Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <functional>
#include <string>
#include <vector>

#include "odaframe/sensor/topic.hpp"

namespace oda {

/// A sampler owned by a pusher. Sources are sampled from one thread.
class SensorSource {
 public:
  using Sink = std::function<void(std::size_t index, SensorReading reading)>;

  virtual ~SensorSource() = default;

  virtual std::string name() const = 0;
  /// Fixed for the lifetime of the source; `index` in the sink refers to it.
  virtual const std::vector<Topic>& topics() const = 0;
  virtual Duration interval() const = 0;
  /// Emits the readings due at `now`.
  virtual void sample(Timestamp now, const Sink& sink) = 0;
};

}  // namespace oda
