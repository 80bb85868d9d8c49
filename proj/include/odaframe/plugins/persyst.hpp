// Copyright 2026 The odaframe Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "odaframe/ops/operator.hpp"
#include "odaframe/plugins/deciles.hpp"

namespace oda {

/// Topic of decile `k` for a block output topic: "<topic>-d<k>".
Topic decile_topic(const Topic& output, std::size_t k);

/// Job-level aggregation: every tick, the readings of all block inputs that
/// fall in (now - window, now] are pooled and their deciles written to
/// "<output>-d0" .. "<output>-d10", rounded to the input's integer scale.
///
/// Keys: window_ms (default: the operator interval).
class PersystOperator : public Operator {
 public:
  explicit PersystOperator(OperatorConfig config);

  bool is_job_operator() const override { return true; }
  std::vector<Topic> block_outputs(const Block& block) const override;
  void compute(const Block& block, ComputeContext& ctx) override;

 private:
  Duration window_;
};

}  // namespace oda
