// Copyright 2026 The odaframe Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <atomic>
#include <span>
#include <vector>

#include "odaframe/ops/operator.hpp"

namespace oda {

enum class PerfKind { kRatio, kRate };

struct PerfOutcome {
  enum class Status { kOk, kInsufficient, kZeroDenominator, kReset };
  Status status = Status::kInsufficient;
  double value = 0.0;
};

/// Last-minus-first difference of each window, summed. kReset when any
/// window decreases, kInsufficient when any window has fewer than two
/// readings.
PerfOutcome counter_delta(std::span<const std::vector<SensorReading>> windows);

/// sum(delta numerator) / sum(delta denominator).
PerfOutcome perf_ratio(std::span<const std::vector<SensorReading>> numerators,
                       std::span<const std::vector<SensorReading>> denominators);

/// sum(delta counter) per second of window span.
PerfOutcome perf_rate(std::span<const std::vector<SensorReading>> counters);

/// Derived metrics from monotonic counters, written as fixed-point values.
///
/// Keys: kind (ratio | rate), numerator and denominator (sensor names, for
/// ratios such as CPI or vectorization ratio), counter (for rates such as
/// FLOPS), window_ms (default: the operator interval).
class PerfmetricsOperator : public Operator {
 public:
  explicit PerfmetricsOperator(OperatorConfig config);

  void compute(const Block& block, ComputeContext& ctx) override;

  std::uint64_t resets() const noexcept { return resets_.load(); }
  PerfKind kind() const noexcept { return kind_; }

 private:
  PerfKind kind_;
  std::string numerator_;
  std::string denominator_;
  std::string counter_;
  Duration window_;
  std::atomic<std::uint64_t> resets_{0};
};

}  // namespace oda
