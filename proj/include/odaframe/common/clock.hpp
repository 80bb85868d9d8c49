// Copyright 2026 The odaframe Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <chrono>

#include "odaframe/sensor/topic.hpp"

namespace oda {

inline Timestamp wall_now() {
  return static_cast<Timestamp>(std::chrono::duration_cast<std::chrono::nanoseconds>(
                                    std::chrono::system_clock::now().time_since_epoch())
                                    .count());
}

inline std::chrono::system_clock::time_point to_time_point(Timestamp t) {
  return std::chrono::system_clock::time_point(
      std::chrono::duration_cast<std::chrono::system_clock::duration>(
          std::chrono::nanoseconds(t)));
}

/// First multiple of `interval` after `epoch` that is strictly later than `now`.
inline Timestamp next_aligned(Timestamp epoch, Duration interval, Timestamp now) {
  if (now < epoch) return epoch;
  return epoch + ((now - epoch) / interval + 1) * interval;
}

}  // namespace oda
