// Copyright 2026 The odaframe Authors
// SPDX-License-Identifier: Apache-2.0

#include "odaframe/plugins/deciles.hpp"

#include <algorithm>
#include <cmath>

#include "odaframe/common/error.hpp"

namespace oda {

std::array<double, kDecileCount> deciles(std::vector<double> values) {
  if (values.empty()) throw Error(ErrorCode::kInvalidArgument, "deciles of an empty set");
  const std::size_t n = values.size();
  std::array<double, kDecileCount> out{};
  // Selection on a shrinking suffix: after placing order statistic `lo`,
  // [lo, n) holds exactly the statistics lo..n-1.
  std::size_t start = 0;
  for (std::size_t k = 0; k < kDecileCount; ++k) {
    const double pos = static_cast<double>(k) * static_cast<double>(n - 1) / 10.0;
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const double frac = pos - static_cast<double>(lo);
    std::nth_element(values.begin() + static_cast<std::ptrdiff_t>(start),
                     values.begin() + static_cast<std::ptrdiff_t>(lo), values.end());
    start = lo;
    const double a = values[lo];
    if (frac == 0.0 || lo + 1 >= n) {
      out[k] = a;
      continue;
    }
    const double b = *std::min_element(values.begin() + static_cast<std::ptrdiff_t>(lo + 1), values.end());
    out[k] = a + frac * (b - a);
  }
  return out;
}

}  // namespace oda
