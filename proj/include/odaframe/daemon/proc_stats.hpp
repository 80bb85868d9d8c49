// Copyright 2026 The odaframe Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <chrono>
#include <cstdint>

namespace oda {

struct ProcSample {
  /// User plus system CPU time of the whole process.
  double cpu_seconds = 0.0;
  std::chrono::steady_clock::time_point wall;
  /// Resident set size; 0 when unavailable.
  std::uint64_t rss_bytes = 0;
};

ProcSample sample_process();

/// CPU use between two samples in percent of one core.
double cpu_percent(const ProcSample& from, const ProcSample& to);

}  // namespace oda
