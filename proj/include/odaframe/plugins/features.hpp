// Copyright 2026 The odaframe Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>
#include <span>
#include <vector>

#include "odaframe/sensor/topic.hpp"

namespace oda {

inline constexpr std::size_t kFeaturesPerInput = 5;

struct WindowStats {
  double mean = 0.0;
  double stddev = 0.0;  // population
  double min = 0.0;
  double max = 0.0;
  double last = 0.0;
};

/// nullopt for an empty window.
std::optional<WindowStats> window_stats(std::span<const SensorReading> window);

/// Concatenated (mean, std, min, max, last) per window in input order, or
/// nullopt when any window is empty.
std::optional<std::vector<double>> feature_vector(
    const std::vector<std::vector<SensorReading>>& windows);

}  // namespace oda
