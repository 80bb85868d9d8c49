// Copyright 2026 The odaframe Authors
// SPDX-License-Identifier: Apache-2.0

#include "odaframe/plugins/features.hpp"

#include <algorithm>
#include <cmath>

namespace oda {

std::optional<WindowStats> window_stats(std::span<const SensorReading> window) {
  if (window.empty()) return std::nullopt;
  WindowStats s;
  s.min = s.max = static_cast<double>(window.front().value);
  double sum = 0.0;
  for (const auto& r : window) {
    double v = static_cast<double>(r.value);
    sum += v;
    s.min = std::min(s.min, v);
    s.max = std::max(s.max, v);
  }
  s.mean = sum / static_cast<double>(window.size());
  double sq = 0.0;
  for (const auto& r : window) {
    double d = static_cast<double>(r.value) - s.mean;
    sq += d * d;
  }
  s.stddev = std::sqrt(sq / static_cast<double>(window.size()));
  s.last = static_cast<double>(window.back().value);
  return s;
}

std::optional<std::vector<double>> feature_vector(
    const std::vector<std::vector<SensorReading>>& windows) {
  std::vector<double> out;
  out.reserve(windows.size() * kFeaturesPerInput);
  for (const auto& w : windows) {
    auto s = window_stats(w);
    if (!s) return std::nullopt;
    out.insert(out.end(), {s->mean, s->stddev, s->min, s->max, s->last});
  }
  return out;
}

}  // namespace oda
