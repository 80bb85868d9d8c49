// Copyright 2026 The odaframe Authors
// SPDX-License-Identifier: Apache-2.0

#include "odaframe/plugins/perfmetrics.hpp"

#include "odaframe/common/error.hpp"

namespace oda {

PerfOutcome counter_delta(std::span<const std::vector<SensorReading>> windows) {
  if (windows.empty()) return {};
  double total = 0.0;
  bool reset = false;
  for (const auto& w : windows) {
    if (w.size() < 2) return {};
    if (w.back().value < w.front().value) reset = true;
    total += static_cast<double>(w.back().value - w.front().value);
  }
  if (reset) return {PerfOutcome::Status::kReset, 0.0};
  return {PerfOutcome::Status::kOk, total};
}

PerfOutcome perf_ratio(std::span<const std::vector<SensorReading>> numerators,
                       std::span<const std::vector<SensorReading>> denominators) {
  auto num = counter_delta(numerators);
  auto den = counter_delta(denominators);
  if (num.status == PerfOutcome::Status::kReset || den.status == PerfOutcome::Status::kReset)
    return {PerfOutcome::Status::kReset, 0.0};
  if (num.status != PerfOutcome::Status::kOk || den.status != PerfOutcome::Status::kOk) return {};
  if (den.value == 0.0) return {PerfOutcome::Status::kZeroDenominator, 0.0};
  return {PerfOutcome::Status::kOk, num.value / den.value};
}

PerfOutcome perf_rate(std::span<const std::vector<SensorReading>> counters) {
  auto delta = counter_delta(counters);
  if (delta.status != PerfOutcome::Status::kOk) return delta;
  // Span of the first window; all counters of a block share a sampler.
  const auto& w = counters.front();
  const Timestamp span = w.back().timestamp - w.front().timestamp;
  if (span == 0) return {PerfOutcome::Status::kZeroDenominator, 0.0};
  return {PerfOutcome::Status::kOk,
          delta.value / (static_cast<double>(span) / static_cast<double>(kNsPerSec))};
}

PerfmetricsOperator::PerfmetricsOperator(OperatorConfig config) : Operator(std::move(config)) {
  const auto& p = this->config().params;
  const std::string kind = p.get_or("kind", "ratio");
  if (kind == "ratio") {
    kind_ = PerfKind::kRatio;
  } else if (kind == "rate") {
    kind_ = PerfKind::kRate;
  } else {
    throw ParseError(p.child("kind")->line, 1, "unknown perfmetrics kind '" + kind + "'");
  }
  numerator_ = p.get_or("numerator", "cpu-cycles");
  denominator_ = p.get_or("denominator", "instructions");
  counter_ = p.get_or("counter", "flops");
  const std::int64_t window_ms = p.get_int("window_ms", 0);
  window_ = window_ms > 0 ? static_cast<Duration>(window_ms) * kNsPerMs : this->config().interval_ns;
}

void PerfmetricsOperator::compute(const Block& block, ComputeContext& ctx) {
  std::vector<std::vector<SensorReading>> first, second;
  for (const auto& topic : block.input_topics) {
    const std::string_view name = topic.name();
    if (kind_ == PerfKind::kRatio) {
      if (name == numerator_) first.push_back(ctx.query_relative(topic, window_));
      else if (name == denominator_) second.push_back(ctx.query_relative(topic, window_));
    } else if (name == counter_) {
      first.push_back(ctx.query_relative(topic, window_));
    }
  }
  if (first.empty() || (kind_ == PerfKind::kRatio && second.empty()))
    throw Error(ErrorCode::kInvalidArgument, "block " + block.name + " lacks its counter inputs");

  const PerfOutcome outcome = kind_ == PerfKind::kRatio ? perf_ratio(first, second) : perf_rate(first);
  if (outcome.status == PerfOutcome::Status::kReset) resets_.fetch_add(1);
  if (outcome.status != PerfOutcome::Status::kOk) return;
  const std::int64_t value = to_fixed_point(outcome.value);
  for (const auto& out : block.output_topics) ctx.emit(out, value);
}

}  // namespace oda
