// Copyright 2026 The odaframe Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <mutex>

#include "odaframe/ops/operator.hpp"

namespace oda {

enum class QueryMode { kRelative, kAbsolute };

/// Query load generator. Each tick issues `queries` queries of `range_ms`
/// over the sensors under `prefix`, cycling through them, and records the
/// per-query latency. Declared operator outputs among latency-p50,
/// latency-p99, latency-max (nanoseconds) and readings receive the tick's
/// statistics.
///
/// Keys: prefix ("/"), queries (10), range_ms (0), query_mode
/// (relative | absolute).
class QuerytestOperator : public Operator {
 public:
  explicit QuerytestOperator(OperatorConfig config);

  void compute_all(ComputeContext& ctx) override;
  void compute(const Block& block, ComputeContext& ctx) override;

  /// All latencies recorded since the last call, in nanoseconds.
  std::vector<std::uint64_t> take_latencies();
  std::uint64_t readings_returned() const;

 private:
  void run_queries(ComputeContext& ctx, const std::vector<Topic>& topics);

  std::string prefix_;
  std::size_t queries_;
  Duration range_;
  QueryMode mode_;

  mutable std::mutex mutex_;
  std::vector<Topic> topics_;
  std::size_t cursor_ = 0;
  std::vector<std::uint64_t> latencies_;
  std::uint64_t readings_ = 0;
};

}  // namespace oda
