// Copyright 2026 The odaframe Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <vector>

namespace oda {

inline constexpr std::size_t kDecileCount = 11;

/// Deciles 0..10 with linear interpolation between order statistics
/// (position k/10 * (n-1)). Throws Error(kInvalidArgument) when empty.
std::array<double, kDecileCount> deciles(std::vector<double> values);

}  // namespace oda
